"""Noise models and fidelity estimates.

Closed forms assume ideal (infinite-energy) GKP decoding: per quadrature the
decoder succeeds while the displacement error stays below ``sqrt(pi/d)``,
which is the half-width that reproduces ``erf(sqrt(pi / (2 d sigma^2)))``.
Monte Carlo estimates split the shots into fixed-size blocks, each fed by a
sub-stream keyed on its block index, so results do not depend on how many
workers run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import CrosstalkParams
from .errors import DegenerateDistributionError
from .modular import AdmissibleEta
from .phase_space import PhaseVector

MAX_REJECTIONS = 1000
MC_BLOCK = 10_000


@dataclass(frozen=True)
class NoiseParams:
    sigma: float
    lognormal_mu: float = math.log(0.2)
    sigma_c: float = 0.4
    depol_p: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.sigma_c > 0:
            raise ValueError(f"sigma_c must be positive, got {self.sigma_c}")
        if not 0 <= self.depol_p <= 1:
            raise ValueError(f"depol_p must lie in [0, 1], got {self.depol_p}")


@dataclass(frozen=True)
class FidelityBoundParams:
    lattice_scale_L: float
    rational_points: tuple[AdmissibleEta, ...]

    def __post_init__(self):
        if not self.lattice_scale_L > 0:
            raise ValueError(f"lattice scale must be positive, got {self.lattice_scale_L}")
        pts = tuple(self.rational_points)
        if not pts:
            raise ValueError("at least one rational alignment point is required")
        if any(a.eta >= b.eta for a, b in zip(pts, pts[1:])):
            raise ValueError("rational points must be sorted by eta without repeats")
        object.__setattr__(self, "rational_points", pts)


def sample_eta_lognormal(params: NoiseParams, rng: np.random.Generator) -> float:
    """Draw a transmissivity from the log-normal model, rejecting draws outside (0, 1)."""
    for _ in range(MAX_REJECTIONS):
        eta = float(rng.lognormal(params.lognormal_mu, params.sigma_c))
        if 0.0 < eta < 1.0:
            return eta
    raise DegenerateDistributionError(
        f"{MAX_REJECTIONS} consecutive draws fell outside (0, 1) for "
        f"mu = {params.lognormal_mu}, sigma_c = {params.sigma_c}"
    )


def sample_displacements(sigma: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent isotropic displacements as a ``(size, 2)`` array of ``(q, p)``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return rng.normal(0.0, sigma, size=(size, 2))


def sample_displacement(sigma: float, rng: np.random.Generator) -> PhaseVector:
    q, p = sample_displacements(sigma, rng, 1)[0]
    return PhaseVector(q, p)


def _erf_factor(sigma: float, d: int) -> float:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return math.erf(math.sqrt(math.pi / (2 * d * sigma**2)))


def f_single(sigma: float, d: int) -> float:
    """Probability that one square-lattice mode decodes correctly under Gaussian displacement."""
    return _erf_factor(sigma, d) ** 2


def f_ideal(sigma: float, d1: int, d2: int) -> float:
    return (_erf_factor(sigma, d1) * _erf_factor(sigma, d2)) ** 2


def fidelity_upper_bound(
    eta: float, sigma: float, d1: int, d2: int, bound: FidelityBoundParams
) -> float:
    """Gaussian-envelope bound ``max_i exp(-delta_i^2 / 2 sigma^2) * f_ideal``.

    ``delta_i = |eta - eta_i| * L`` is the mismatch to rational alignment point ``i``.
    """
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta}")
    if not bound.rational_points:
        raise ValueError("no rational alignment points")
    envelope = max(
        math.exp(-((abs(eta - float(pt.eta)) * bound.lattice_scale_L) ** 2) / (2 * sigma**2))
        for pt in bound.rational_points
    )
    return envelope * f_ideal(sigma, d1, d2)


def _block_seed(root: np.random.SeedSequence, block: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + (block,))


def as_seed_sequence(rng) -> np.random.SeedSequence:
    """Normalize an int seed, SeedSequence, or Generator into a root SeedSequence.

    A Generator contributes one 63-bit draw, so it advances deterministically.
    """
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, np.random.Generator):
        return np.random.SeedSequence(int(rng.integers(0, 2**63)))
    return np.random.SeedSequence(int(rng))


def _count_successes(
    seed: np.random.SeedSequence, shots: int, sigma: float, half_widths: tuple[float, ...]
) -> int:
    gen = np.random.default_rng(seed)
    ok = np.ones(shots, dtype=bool)
    for w in half_widths:
        eps = gen.normal(0.0, sigma, size=(shots, 2))
        ok &= np.all(np.abs(eps) < w, axis=1)
    return int(np.count_nonzero(ok))


def mc_success_count(
    d1: int, d2: int, sigma: float, shots: int, rng, workers: int = 1
) -> int:
    """Number of shots in which both modes stay inside their decoding cells."""
    root = as_seed_sequence(rng)
    widths = (math.sqrt(math.pi / d1), math.sqrt(math.pi / d2))
    blocks = [(b, min(MC_BLOCK, shots - b * MC_BLOCK)) for b in range(-(-shots // MC_BLOCK))]

    def run(block):
        b, size = block
        return _count_successes(_block_seed(root, b), size, sigma, widths)

    if workers <= 1:
        return sum(map(run, blocks))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(run, blocks))


def binomial_stderr(successes: int, shots: int) -> float:
    """Standard error of a success fraction, using ``(k + 1/2) / (N + 1)`` so it never collapses to 0."""
    p = (successes + 0.5) / (shots + 1)
    return math.sqrt(p * (1 - p) / shots)


def mc_fidelity_estimate(
    params: CrosstalkParams, noise: NoiseParams, shots: int, rng, workers: int = 1
) -> tuple[float, float]:
    """Monte Carlo estimate of the ideal-decoder fidelity and its standard error.

    ``rng`` may be an int seed, a SeedSequence, or a Generator.
    """
    if shots < 100:
        raise ValueError(f"need at least 100 shots, got {shots}")
    k = mc_success_count(params.d1, params.d2, noise.sigma, shots, rng, workers)
    return k / shots, binomial_stderr(k, shots)


_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)


def _embed(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for k in range(n_qubits):
        out = np.kron(out, op if k == site else _I2)
    return out


def _depolarize(rho: np.ndarray, site: int, p: float, n_qubits: int) -> np.ndarray:
    # (1 - p) rho + p * I/2 (x) Tr_site(rho), in Kraus form
    out = (1 - 0.75 * p) * rho
    for pauli in (_X, _Y, _Z):
        k = _embed(pauli, site, n_qubits)
        out = out + 0.25 * p * (k @ rho @ k.conj().T)
    return out


def coupling_angle(eta: float) -> float:
    return math.pi * math.sqrt(eta * (1 - eta))


def dv_baseline_fidelity(eta: float, depol_p: float) -> float:
    """Joint Bell fidelity of two unencoded EPR pairs after XX crosstalk and depolarizing noise.

    Qubits are ordered ``(A, A', B, B')``; ``A'`` and ``B'`` are coupled by
    ``exp(-i theta X X)`` with ``theta = pi * sqrt(eta (1 - eta))`` and then
    depolarized independently with probability ``depol_p``.
    """
    if not 0 <= eta <= 1:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if not 0 <= depol_p <= 1:
        raise ValueError(f"depol_p must lie in [0, 1], got {depol_p}")
    bell = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    # (A, A') (x) (B, B') is already in qubit order A, A', B, B'
    target = np.kron(bell, bell)
    theta = coupling_angle(eta)
    xx = _embed(_X, 1, 4) @ _embed(_X, 3, 4)
    u = math.cos(theta) * np.eye(16) - 1j * math.sin(theta) * xx
    psi = u @ target
    rho = np.outer(psi, psi.conj())
    for site in (1, 3):
        rho = _depolarize(rho, site, depol_p, 4)
    return float(np.real(target.conj() @ rho @ target))
