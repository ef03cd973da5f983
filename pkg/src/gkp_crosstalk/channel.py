"""Beam-splitter crosstalk between two GKP modes.

Two pictures are provided.  In phase space a splitter of transmissivity
``eta`` mixes displacement vectors linearly.  In the discrete coset picture
an input pair of logical basis states ``|mu1>|mu2>`` is mapped, for an
admissible rational ``eta = q / (q + p*d1*d2)``, to a uniform superposition
over ``n = q + p*d1*d2`` gauge labels in ``C_{n*d1} (x) C_{n*d2}``.
States are stored as finite complex amplitude arrays over coset labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .errors import InadmissibleEtaError, InvalidStateError, TooLargeError
from .modular import (
    as_rational,
    bezout,
    classify_eta,
    inadmissibility_reason,
    mod_inverse,
)
from .phase_space import PhaseVector

STATE_TOL = 1e-9
NORM_GUARD = 1e-6
EPR_SIZE_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class DiscreteState:
    """Pure state over a product of cyclic index sets, amplitudes in row-major order."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) not in (2, 4) or any(d < 1 for d in dims):
            raise InvalidStateError(f"expected 2 or 4 positive subsystem dims, got {dims}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != math.prod(dims):
            raise InvalidStateError(f"{amps.size} amplitudes do not fit dims {dims}")
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_GUARD:
            raise InvalidStateError(f"state norm {norm} deviates from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_tensor(cls, tensor: np.ndarray) -> DiscreteState:
        return cls(tensor.shape, tensor.reshape(-1))

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def support(self, tol: float = STATE_TOL) -> list[tuple[int, ...]]:
        """Multi-indices of the amplitudes with magnitude above ``tol``."""
        flat = np.flatnonzero(np.abs(self.amps) > tol)
        return [tuple(int(i) for i in np.unravel_index(k, self.dims)) for k in flat]

    def amplitude(self, *index: int) -> complex:
        return complex(self.tensor[index])

    def inner(self, other: DiscreteState) -> complex:
        if self.dims != other.dims:
            raise ValueError(f"dims differ: {self.dims} vs {other.dims}")
        return complex(np.vdot(self.amps, other.amps))

    def allclose(self, other: DiscreteState, tol: float = STATE_TOL) -> bool:
        return self.dims == other.dims and bool(np.max(np.abs(self.amps - other.amps)) <= tol)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
        }

    @classmethod
    def from_json(cls, obj: dict) -> DiscreteState:
        amps = np.array([complex(re, im) for re, im in obj["amps"]])
        return cls(tuple(obj["dims"]), amps)


def basis_state(dims: tuple[int, ...], index: tuple[int, ...]) -> DiscreteState:
    tensor = np.zeros(dims, dtype=complex)
    tensor[tuple(index)] = 1.0
    return DiscreteState.from_tensor(tensor)


@dataclass(frozen=True)
class CrosstalkParams:
    """Everything the output-state construction and the decoder need for one admissible eta."""

    q: int
    p: int
    d1: int
    d2: int
    n: int
    alpha1: int
    beta1: int
    alpha2: int
    beta2: int
    r1: int
    r2: int

    def __post_init__(self):
        dd = self.d1 * self.d2
        if min(self.q, self.p, self.d1, self.d2) < 1:
            raise ValueError("q, p, d1, d2 must all be positive")
        if self.n != self.q + self.p * dd:
            raise ValueError(f"n = {self.n} but q + p*d1*d2 = {self.q + self.p * dd}")
        for i, (a, b) in enumerate(((self.alpha1, self.beta1), (self.alpha2, self.beta2)), 1):
            if a * self.q + b * self.p * dd != 1:
                raise ValueError(f"Bezout identity {i} fails: {a}*{self.q} + {b}*{self.p * dd} != 1")
        if (self.r1, self.r2) != (self.p * dd, self.q * self.d2):
            raise ValueError(f"gauge steps must be (p*d1*d2, q*d2), got ({self.r1}, {self.r2})")
        for r in (self.r1, self.r2):
            if gcd(r % self.n, self.n) != 1:
                raise ValueError(f"gauge step {r} is not invertible modulo n = {self.n}")
        for mode in (1, 2):
            size = self.n * self.dim(mode)
            a, r = self.alpha(mode), self.step(mode)
            for mu in range(self.dim(mode)):
                idx = {(mu * a * self.n + j * r) % size for j in range(self.n)}
                if len(idx) != self.n:
                    raise ValueError(f"mode {mode} support indices collide for mu = {mu}")

    @classmethod
    def from_qp(cls, q: int, p: int, d1: int, d2: int) -> CrosstalkParams:
        dd = d1 * d2
        pair = bezout(q, p * dd)
        return cls(
            q=q, p=p, d1=d1, d2=d2, n=q + p * dd,
            alpha1=pair.alpha, beta1=pair.beta,
            alpha2=pair.alpha, beta2=pair.beta,
            r1=p * dd, r2=q * d2,
        )

    @classmethod
    def from_eta(cls, eta, d1: int, d2: int) -> CrosstalkParams:
        """Like :func:`perfect_transmission_check` but raises with the reason on failure."""
        reason = inadmissibility_reason(eta, d1, d2)
        if reason is not None:
            raise InadmissibleEtaError(reason)
        q, p, _ = classify_eta(eta, d1, d2)
        return cls.from_qp(q, p, d1, d2)

    @property
    def eta(self) -> Fraction:
        return Fraction(self.q, self.n)

    def dim(self, mode: int) -> int:
        return _pick(mode, self.d1, self.d2)

    def alpha(self, mode: int) -> int:
        return _pick(mode, self.alpha1, self.alpha2)

    def step(self, mode: int) -> int:
        return _pick(mode, self.r1, self.r2)

    def out_dim(self, mode: int) -> int:
        return self.n * self.dim(mode)

    @property
    def out_dims(self) -> tuple[int, int]:
        return self.n * self.d1, self.n * self.d2


def _pick(mode: int, first, second):
    if mode == 1:
        return first
    if mode == 2:
        return second
    raise ValueError(f"mode must be 1 or 2, got {mode}")


def _require_eta(eta) -> float:
    eta = float(eta)
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta}")
    return eta


def transform_displacement(
    alpha: PhaseVector, beta: PhaseVector, eta
) -> tuple[PhaseVector, PhaseVector]:
    """Conjugate ``T1(alpha) T2(beta)`` by the splitter; returns the two output displacements."""
    eta = _require_eta(eta)
    t, r = math.sqrt(eta), math.sqrt(1.0 - eta)
    return t * alpha + r * beta, t * beta - r * alpha


def perfect_transmission_check(eta, d1: int, d2: int) -> CrosstalkParams | None:
    """Full parameter set when ``eta`` admits perfect logical transmission, else None."""
    eta = as_rational(eta)
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta}")
    if classify_eta(eta, d1, d2) is None:
        return None
    return CrosstalkParams.from_eta(eta, d1, d2)


def output_basis_index(mu: int, j: int, which_mode: int, params: CrosstalkParams) -> int:
    """Label ``(mu*alpha_i*n + j*r_i) mod (n*d_i)`` of one support term."""
    d = params.dim(which_mode)
    if not 0 <= mu < d:
        raise ValueError(f"mu = {mu} outside [0, {d})")
    if not 0 <= j < params.n:
        raise ValueError(f"j = {j} outside [0, {params.n})")
    return (mu * params.alpha(which_mode) * params.n + j * params.step(which_mode)) % params.out_dim(
        which_mode
    )


def build_output_state(mu1: int, mu2: int, params: CrosstalkParams) -> DiscreteState:
    """Image of ``|mu1>|mu2>`` under the splitter, over dims ``(n*d1, n*d2)``."""
    tensor = np.zeros(params.out_dims, dtype=complex)
    amp = 1.0 / math.sqrt(params.n)
    for j in range(params.n):
        tensor[output_basis_index(mu1, j, 1, params), output_basis_index(mu2, j, 2, params)] = amp
    return DiscreteState.from_tensor(tensor)


def is_symmetric(params: CrosstalkParams) -> bool:
    # alpha * 1 + beta * d^2 = 1 forces alpha = 1 (mod d), so mu * alpha * n = mu * n
    return params.d1 == params.d2 and params.q == params.p == 1


def build_symmetric_output(mu1: int, mu2: int, d: int, params: CrosstalkParams) -> DiscreteState:
    """Closed form ``sum_j |mu1*n + j*d^2> |mu2*n + j*d>`` for ``d1 = d2 = d``, ``q = p = 1``."""
    if not is_symmetric(params) or params.d1 != d:
        raise ValueError(f"params {params} are not the symmetric q = p = 1 family for d = {d}")
    if not (0 <= mu1 < d and 0 <= mu2 < d):
        raise ValueError(f"logical labels ({mu1}, {mu2}) outside [0, {d})")
    n = params.n
    tensor = np.zeros((n * d, n * d), dtype=complex)
    for j in range(n):
        tensor[(mu1 * n + j * d * d) % (n * d), (mu2 * n + j * d) % (n * d)] = 1.0 / math.sqrt(n)
    return DiscreteState.from_tensor(tensor)


def build_multiplexed_epr_state(params: CrosstalkParams) -> DiscreteState:
    """Two EPR pairs with their transmitted halves crosstalked.

    Subsystem order is ``(A, A', B, B')`` with dims ``(d1, n*d1, d2, n*d2)``;
    A and B are the retained halves.
    """
    d1, d2, n = params.d1, params.d2, params.n
    dims = (d1, n * d1, d2, n * d2)
    if math.prod(dims) > EPR_SIZE_LIMIT:
        raise TooLargeError(f"EPR state over {dims} exceeds {EPR_SIZE_LIMIT} amplitudes")
    tensor = np.zeros(dims, dtype=complex)
    amp = 1.0 / math.sqrt(d1 * d2 * n)
    for mu in range(d1):
        for nu in range(d2):
            for j in range(n):
                x = output_basis_index(mu, j, 1, params)
                y = output_basis_index(nu, j, 2, params)
                tensor[mu, x, nu, y] = amp
    return DiscreteState.from_tensor(tensor)


def relabel_table(mode: int, params: CrosstalkParams) -> np.ndarray:
    """Inverse of ``(mu, j) -> mu*alpha_i*n + j*r_i``: row ``x`` holds ``(mu, j)``.

    Built by enumerating the forward map; entries never hit stay at -1.
    """
    size = params.out_dim(mode)
    table = np.full((size, 2), -1, dtype=np.int64)
    for mu in range(params.dim(mode)):
        for j in range(params.n):
            x = output_basis_index(mu, j, mode, params)
            if table[x, 0] >= 0:
                raise ValueError(f"relabeling is not injective at index {x}")
            table[x] = (mu, j)
    return table


def gauge_register_state(n: int) -> np.ndarray:
    """Amplitudes of ``(1/sqrt(n)) sum_j |j>|j>`` as an ``n x n`` matrix."""
    return np.eye(n, dtype=complex) / math.sqrt(n)


def verify_gauge_factorization(
    state: DiscreteState,
    mu1: int,
    mu2: int,
    params: CrosstalkParams,
    tol: float = STATE_TOL,
) -> bool:
    """Check that ``state`` equals ``|mu1>_L |mu2>_L (x) |Phi_n>_G`` after relabeling."""
    if state.dims != params.out_dims:
        raise ValueError(f"state dims {state.dims} do not match {params.out_dims}")
    n = params.n
    t1, t2 = relabel_table(1, params), relabel_table(2, params)
    if np.any(t1 < 0) or np.any(t2 < 0):
        # some physical label has no (mu, j) preimage
        return False
    relabeled = np.zeros((params.d1, n, params.d2, n), dtype=complex)
    relabeled[
        t1[:, 0, None], t1[:, 1, None], t2[None, :, 0], t2[None, :, 1]
    ] = state.tensor
    expected = np.zeros_like(relabeled)
    expected[mu1, :, mu2, :] = gauge_register_state(n)
    return bool(np.max(np.abs(relabeled - expected)) <= tol)


def gauge_group_order(params: CrosstalkParams) -> int:
    """Order of the joint gauge shift ``(r1, r2)`` acting on ``Z_{n d1} x Z_{n d2}``."""
    m1, m2 = params.out_dims
    return lcm(m1 // gcd(params.r1, m1), m2 // gcd(params.r2, m2))


def displace_state(state: DiscreteState, shift1: int, shift2: int) -> DiscreteState:
    """Modular shift ``|x>|y> -> |x + shift1>|y + shift2>`` on a two-mode state."""
    if len(state.dims) != 2:
        raise ValueError(f"expected a two-mode state, got dims {state.dims}")
    tensor = np.roll(state.tensor, (shift1, shift2), axis=(0, 1))
    return DiscreteState.from_tensor(tensor)


def joint_gauge_shift(state: DiscreteState, j0: int, params: CrosstalkParams) -> DiscreteState:
    """Apply ``j0`` steps of the gauge action on both modes simultaneously."""
    return displace_state(state, j0 * params.r1, j0 * params.r2)


def logical_shift(state: DiscreteState, mode: int, params: CrosstalkParams) -> DiscreteState:
    """Logical X on one output mode: shift that mode's label by ``alpha_i * n``."""
    s = params.alpha(mode) * params.n
    return displace_state(state, s if mode == 1 else 0, s if mode == 2 else 0)


def gauge_labels(mode: int, params: CrosstalkParams) -> np.ndarray:
    """Gauge index ``x * r_i^{-1} mod n`` of every physical label ``x`` of one mode."""
    inv = mod_inverse(params.step(mode), params.n)
    return (np.arange(params.out_dim(mode)) * inv) % params.n
