"""Gauge-fixing decoder for the crosstalked output state.

The measurement-based protocol copies each output label onto an ancilla with a
modular CX and measures the ancilla.  Copies of computational-basis labels are
classical, so it is simulated here as a direct measurement of the gauge
index of each mode.  The coherent version is :func:`gauge_fix_permutation`,
a basis permutation that both pictures are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import STATE_TOL, CrosstalkParams, DiscreteState, gauge_labels
from .errors import InvalidStateError, ResidualGaugeError, TooLargeError
from .modular import mod_inverse

PERMUTATION_LIMIT = 10**6


@dataclass(frozen=True)
class DecodeOutcome:
    mu1: int
    mu2: int
    gauge_j: int
    consistent: bool
    corrected_state: DiscreteState
    outcome: tuple[int, int]


def _require_output_dims(state: DiscreteState, params: CrosstalkParams) -> None:
    if state.dims != params.out_dims:
        raise InvalidStateError(f"state dims {state.dims} do not match {params.out_dims}")


def sample_ancilla_outcomes(
    state: DiscreteState, params: CrosstalkParams, rng: np.random.Generator, shots: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``shots`` joint ancilla readouts ``(x, y)`` with Born probabilities."""
    _require_output_dims(state, params)
    cum = np.cumsum(state.probabilities())
    cum /= cum[-1]
    flat = np.searchsorted(cum, rng.random(shots), side="right")
    flat = np.minimum(flat, cum.size - 1)
    xs, ys = np.unravel_index(flat, state.dims)
    return xs, ys


def simulate_ancilla_measurement(
    state: DiscreteState, params: CrosstalkParams, rng: np.random.Generator
) -> tuple[int, int, DiscreteState]:
    """One run of the CX-copy-and-measure step.

    Returns the readout and the state projected onto the measured gauge
    sector of both modes.  Logical coherence inside that sector survives.
    """
    xs, ys = sample_ancilla_outcomes(state, params, rng, 1)
    x, y = int(xs[0]), int(ys[0])
    g1, g2 = gauge_labels(1, params), gauge_labels(2, params)
    mask = (g1[:, None] == g1[x]) & (g2[None, :] == g2[y])
    projected = state.tensor * mask
    projected = projected / np.linalg.norm(projected)
    return x, y, DiscreteState.from_tensor(projected)


def gauge_index_from_outcome(x: int, y: int, params: CrosstalkParams) -> tuple[int, bool]:
    """Gauge index ``x * r1^{-1} mod n`` and whether mode 2's readout agrees with it."""
    m1, m2 = params.out_dims
    if not (0 <= x < m1 and 0 <= y < m2):
        raise ValueError(f"outcome ({x}, {y}) outside [0, {m1}) x [0, {m2})")
    n = params.n
    j = (x * mod_inverse(params.r1, n)) % n
    j2 = (y * mod_inverse(params.r2, n)) % n
    return j, j == j2


def _split_logical_gauge(tensor: np.ndarray, params: CrosstalkParams) -> np.ndarray:
    """Reorder a two-mode tensor into ``[mu1, mu2, g1, g2]`` via ``Z_{n d} = Z_d x Z_n``."""
    d1, d2, n = params.d1, params.d2, params.n
    out = np.zeros((d1, d2, n, n), dtype=complex)
    x = np.arange(params.out_dim(1))
    y = np.arange(params.out_dim(2))
    g1, g2 = gauge_labels(1, params), gauge_labels(2, params)
    out[(x % d1)[:, None], (y % d2)[None, :], g1[:, None], g2[None, :]] = tensor
    return out


def apply_correction_and_reduce(
    collapsed: DiscreteState, j: int, params: CrosstalkParams, strict: bool = True
) -> DiscreteState:
    """Undo ``j`` gauge steps on both modes and discard the gauge registers.

    Every corrected label ``x`` maps to the logical value ``x mod d_i``, since
    ``alpha_i * n = 1 (mod d_i)`` and ``r_i = 0 (mod d_i)``.  With ``strict``
    the gauge content left after correction must be aligned between the two
    modes and unentangled with the logical part; otherwise
    :class:`ResidualGaugeError` is raised.  Non-strict mode keeps the dominant
    gauge component as a best-effort answer.
    """
    _require_output_dims(collapsed, params)
    if not 0 <= j < params.n:
        raise ValueError(f"gauge index {j} outside [0, {params.n})")
    n = params.n
    shifted = np.roll(collapsed.tensor, (-j * params.r1, -j * params.r2), axis=(0, 1))
    split = _split_logical_gauge(shifted, params)
    logical_by_gauge = split.reshape(params.d1 * params.d2, n * n)

    if strict:
        weight = np.sum(np.abs(split) ** 2, axis=(0, 1))
        off_orbit = weight.copy()
        np.fill_diagonal(off_orbit, 0.0)
        if off_orbit.max() > STATE_TOL:
            g1, g2 = np.unravel_index(np.argmax(off_orbit), off_orbit.shape)
            raise ResidualGaugeError(
                f"corrected gauge labels ({g1}, {g2}) are not on a common orbit"
            )

    col = int(np.argmax(np.sum(np.abs(logical_by_gauge) ** 2, axis=0)))
    logical = logical_by_gauge[:, col] / np.linalg.norm(logical_by_gauge[:, col])
    if strict:
        residual = logical_by_gauge - np.outer(logical, logical.conj() @ logical_by_gauge)
        if np.max(np.abs(residual)) > STATE_TOL:
            raise ResidualGaugeError("logical content remains entangled with the gauge registers")
    return DiscreteState((params.d1, params.d2), logical)


def _most_likely_labels(state: DiscreteState) -> tuple[int, int]:
    k = int(np.argmax(state.probabilities()))
    mu1, mu2 = np.unravel_index(k, state.dims)
    return int(mu1), int(mu2)


def decode(state: DiscreteState, params: CrosstalkParams, rng: np.random.Generator) -> DecodeOutcome:
    """Measure the gauge index, correct it, and read out the logical pair.

    An inconsistent readout is reported through ``consistent = False``; the
    correction then uses mode 1's gauge index and the labels are best effort.
    """
    x, y, collapsed = simulate_ancilla_measurement(state, params, rng)
    j, consistent = gauge_index_from_outcome(x, y, params)
    corrected = apply_correction_and_reduce(collapsed, j, params, strict=consistent)
    mu1, mu2 = _most_likely_labels(corrected)
    return DecodeOutcome(mu1, mu2, j, consistent, corrected, (x, y))


def gauge_fix_permutation(params: CrosstalkParams, subtract: bool = True) -> np.ndarray:
    """Basis permutation realizing the coherent gauge fix.

    Entry ``k`` is the destination of flat source index ``k`` over
    ``(n*d1, n*d2)``; destinations are flat indices over ``(d1, n, d2, n)``
    holding ``(mu1, g1, mu2, g2)``.  Each label is split by modular inverse
    multiplication into logical and gauge parts; with ``subtract`` the
    controlled subtraction ``g1 -> g1 - g2`` then maps ``|j>|j>`` to ``|0>|j>``.
    """
    m1, m2 = params.out_dims
    if m1 * m2 > PERMUTATION_LIMIT:
        raise TooLargeError(f"permutation over {m1 * m2} labels exceeds {PERMUTATION_LIMIT}")
    d1, d2, n = params.d1, params.d2, params.n
    x = np.arange(m1)[:, None]
    y = np.arange(m2)[None, :]
    g1 = gauge_labels(1, params)[:, None]
    g2 = gauge_labels(2, params)[None, :]
    if subtract:
        g1 = (g1 - g2) % n
    dest = np.ravel_multi_index(
        np.broadcast_arrays(x % d1, g1, y % d2, g2), (d1, n, d2, n)
    )
    return dest.reshape(-1)


def apply_gauge_fix(
    state: DiscreteState, params: CrosstalkParams, subtract: bool = True
) -> DiscreteState:
    """Apply :func:`gauge_fix_permutation`; the result has dims ``(d1, n, d2, n)``."""
    _require_output_dims(state, params)
    perm = gauge_fix_permutation(params, subtract)
    out = np.zeros(state.amps.size, dtype=complex)
    out[perm] = state.amps
    return DiscreteState((params.d1, params.n, params.d2, params.n), out)


def trace_gauge(fixed: DiscreteState) -> np.ndarray:
    """Reduced density matrix of ``(mu1, mu2)`` from a ``(d1, n, d2, n)`` state."""
    d1, n, d2, _ = fixed.dims
    m = fixed.tensor.transpose(0, 2, 1, 3).reshape(d1 * d2, n * n)
    return m @ m.conj().T


def gauge_fixed_epr_fidelity(epr: DiscreteState, params: CrosstalkParams) -> float:
    """Fidelity of the retained/transmitted halves with two ideal EPR pairs after gauge fixing.

    ``epr`` is ordered ``(A, A', B, B')`` as built by ``build_multiplexed_epr_state``.
    """
    d1, d2, n = params.d1, params.d2, params.n
    if epr.dims != (d1, n * d1, d2, n * d2):
        raise InvalidStateError(f"unexpected EPR dims {epr.dims}")
    perm = gauge_fix_permutation(params)
    # (A, B, A'B') with the transmitted pair flattened for the permutation
    joint = epr.tensor.transpose(0, 2, 1, 3).reshape(d1 * d2, -1)
    fixed = np.zeros_like(joint)
    fixed[:, perm] = joint
    # axes: A, B, L1, G1, L2, G2
    t = fixed.reshape(d1, d2, d1, n, d2, n).transpose(0, 2, 1, 4, 3, 5)
    m = t.reshape(d1 * d1 * d2 * d2, n * n)
    rho = m @ m.conj().T
    phi1 = np.eye(d1).reshape(-1) / math.sqrt(d1)
    phi2 = np.eye(d2).reshape(-1) / math.sqrt(d2)
    target = np.kron(phi1, phi2)
    return float(np.real(target.conj() @ rho @ target))
