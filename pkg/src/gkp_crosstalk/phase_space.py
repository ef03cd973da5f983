"""Phase-space vectors and two-dimensional GKP stabilizer lattices.

Units follow hbar = 1; every quantity here is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateLatticeError
from .modular import as_rational

DEFAULT_TOL = 1e-9
DEGENERATE_AREA = 1e-12


@dataclass(frozen=True)
class PhaseVector:
    """A displacement ``(q, p)`` in phase space."""

    q: float
    p: float

    def __post_init__(self):
        q, p = float(self.q), float(self.p)
        if not (math.isfinite(q) and math.isfinite(p)):
            raise ValueError(f"phase vector components must be finite, got ({q}, {p})")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def __add__(self, other: PhaseVector) -> PhaseVector:
        return PhaseVector(self.q + other.q, self.p + other.p)

    def __sub__(self, other: PhaseVector) -> PhaseVector:
        return PhaseVector(self.q - other.q, self.p - other.p)

    def __neg__(self) -> PhaseVector:
        return PhaseVector(-self.q, -self.p)

    def __mul__(self, c: float) -> PhaseVector:
        return PhaseVector(c * self.q, c * self.p)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> PhaseVector:
        return PhaseVector(self.q / c, self.p / c)

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.p])

    def norm_inf(self) -> float:
        return max(abs(self.q), abs(self.p))


ZERO = PhaseVector(0.0, 0.0)


def symplectic_form(u: PhaseVector, v: PhaseVector) -> float:
    """Oriented area ``u_q v_p - u_p v_q`` of the parallelogram spanned by u and v."""
    return u.q * v.p - u.p * v.q


@dataclass(frozen=True)
class GkpLattice:
    """Stabilizer lattice ``Span_Z{gen_a, gen_b}``."""

    gen_a: PhaseVector
    gen_b: PhaseVector

    def __post_init__(self):
        if abs(symplectic_form(self.gen_a, self.gen_b)) < DEGENERATE_AREA:
            raise DegenerateLatticeError(
                f"generators {self.gen_a} and {self.gen_b} span no area"
            )

    @property
    def area(self) -> float:
        return symplectic_form(self.gen_a, self.gen_b)

    def point(self, s: int, t: int) -> PhaseVector:
        return s * self.gen_a + t * self.gen_b

    def scaled(self, c: float) -> GkpLattice:
        return GkpLattice(c * self.gen_a, c * self.gen_b)


@dataclass(frozen=True)
class GkpCode:
    """A GKP code of logical dimension ``dim`` with normalized basis matrix ``S``.

    The rows of ``sqrt(2*pi*dim) * basis_matrix`` are the lattice generators.
    """

    lattice: GkpLattice
    dim: int
    basis_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"code dimension must be >= 1, got {self.dim}")
        s = np.array(self.basis_matrix, dtype=float)
        if s.shape != (2, 2):
            raise ValueError(f"basis matrix must be 2x2, got shape {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "basis_matrix", s)

        area = symplectic_form(self.lattice.gen_a, self.lattice.gen_b)
        if abs(area - 2 * math.pi * self.dim) > DEFAULT_TOL:
            raise ValueError(f"lattice area {area} != 2*pi*{self.dim}")
        if abs(np.linalg.det(s) - 1.0) > DEFAULT_TOL:
            raise ValueError(f"basis matrix determinant {np.linalg.det(s)} != 1")
        rows = math.sqrt(2 * math.pi * self.dim) * s
        gens = np.array([self.lattice.gen_a.as_array(), self.lattice.gen_b.as_array()])
        if np.max(np.abs(rows - gens)) > DEFAULT_TOL:
            raise ValueError("basis matrix does not reproduce the lattice generators")

    @property
    def logical_x(self) -> PhaseVector:
        return self.lattice.gen_a / self.dim

    @property
    def logical_z(self) -> PhaseVector:
        return self.lattice.gen_b / self.dim


def make_square_code(d: int, scale: float = 1.0) -> GkpCode:
    """Square-lattice code ``C_{d, diag(scale, 1/scale)}``; ``d = 1`` is the qunaught code."""
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    a = math.sqrt(2 * math.pi * d)
    lattice = GkpLattice(PhaseVector(scale * a, 0.0), PhaseVector(0.0, a / scale))
    return GkpCode(lattice, d, np.diag([scale, 1.0 / scale]))


def lattice_coordinates(lat: GkpLattice, x: PhaseVector) -> tuple[float, float]:
    """Real coefficients ``(s, t)`` with ``x = s*gen_a + t*gen_b`` (Cramer's rule)."""
    area = symplectic_form(lat.gen_a, lat.gen_b)
    if abs(area) < DEGENERATE_AREA:
        raise DegenerateLatticeError("cannot solve against a degenerate lattice")
    return symplectic_form(x, lat.gen_b) / area, symplectic_form(lat.gen_a, x) / area


def lattice_contains(lat: GkpLattice, x: PhaseVector, tol: float = DEFAULT_TOL) -> bool:
    """True iff some integer combination of the generators lies within ``tol`` of ``x``."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    s, t = lattice_coordinates(lat, x)
    nearest = lat.point(round(s), round(t))
    return (nearest - x).norm_inf() <= tol


def is_sublattice(inner: GkpLattice, outer: GkpLattice, tol: float = DEFAULT_TOL) -> bool:
    return lattice_contains(outer, inner.gen_a, tol) and lattice_contains(outer, inner.gen_b, tol)


def induced_partner_lattice(source: GkpLattice, eta) -> GkpLattice:
    """Lattice ``sqrt(eta/(1-eta)) * source`` that a partner mode's stabilizers induce through the splitter."""
    eta = as_rational(eta)
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta}")
    return source.scaled(math.sqrt(eta / (1 - eta)))


def matching_scaling_matrix(q1: int, q2: int, p1: int, p2: int) -> np.ndarray:
    """Area-preserving ``diag(s, 1/s)`` with ``s = sqrt(p2*q1 / (p1*q2))``.

    Relates the two basis matrices as ``S2 = M @ S1`` for the factorization
    ``q = q1*q2``, ``p = p1*p2``.
    """
    for name, v in (("q1", q1), ("q2", q2), ("p1", p1), ("p2", p2)):
        if v < 1:
            raise ValueError(f"{name} must be >= 1, got {v}")
    s = math.sqrt(Fraction(p2 * q1, p1 * q2))
    return np.diag([s, 1.0 / s])


def matched_code_pair(
    d1: int, d2: int, q1: int, q2: int, p1: int, p2: int
) -> tuple[GkpCode, GkpCode]:
    """Mode-1 square code and the mode-2 code rescaled by the matching matrix."""
    code1 = make_square_code(d1)
    m = matching_scaling_matrix(q1, q2, p1, p2)
    s2 = m @ code1.basis_matrix
    return code1, make_square_code(d2, scale=float(s2[0, 0]))
