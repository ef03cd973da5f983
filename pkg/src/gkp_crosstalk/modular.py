"""Exact rational and modular integer arithmetic.

Transmissivities are carried as :class:`fractions.Fraction` so that every
divisibility decision is exact.  Python integers never wrap, but values are
still bounded to 128 bits so that parameter sets which would overflow a
fixed-width implementation are rejected instead of silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

from .errors import NotInvertibleError

INT_LIMIT = 1 << 127


def _checked(*values: int) -> None:
    for v in values:
        if abs(v) >= INT_LIMIT:
            raise OverflowError(f"integer {v} exceeds the 128-bit working range")


def _require_positive(**kwargs: int) -> None:
    for name, v in kwargs.items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise TypeError(f"{name} must be an int, got {type(v).__name__}")
        if v < 1:
            raise ValueError(f"{name} must be >= 1, got {v}")


def as_rational(eta) -> Fraction:
    """Coerce ``eta`` to a Fraction.  Floats are converted via their shortest repr."""
    if isinstance(eta, Fraction):
        return eta
    if isinstance(eta, float):
        return Fraction(repr(eta))
    return Fraction(eta)


def _require_unit_interval(eta: Fraction) -> None:
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta}")


class EtaClass(NamedTuple):
    q: int
    p: int
    n: int


class AdmissibleEta(NamedTuple):
    eta: Fraction
    q: int
    p: int
    n: int


@dataclass(frozen=True)
class BezoutPair:
    """Integers with ``alpha * modulus_q + beta * modulus_m == 1``."""

    alpha: int
    beta: int
    modulus_q: int
    modulus_m: int

    def __post_init__(self):
        if self.alpha * self.modulus_q + self.beta * self.modulus_m != 1:
            raise ValueError(
                f"{self.alpha}*{self.modulus_q} + {self.beta}*{self.modulus_m} != 1"
            )


def eta_for(q: int, p: int, d1: int, d2: int) -> Fraction:
    """Transmissivity ``q / (q + p*d1*d2)`` in lowest terms."""
    _require_positive(q=q, p=p, d1=d1, d2=d2)
    den = q + p * d1 * d2
    _checked(den)
    return Fraction(q, den)


def _candidate(eta: Fraction, d1: int, d2: int) -> EtaClass:
    # eta = a/b = q/(q + pD)  <=>  q*(b - a) = p*D*a; the primitive solution
    # is the only one that can satisfy gcd(q, pD) = 1.
    a, b = eta.numerator, eta.denominator
    dd = d1 * d2
    g = gcd(a * dd, b - a)
    q = a * dd // g
    p = (b - a) // g
    n = b * dd // g
    _checked(q, p, n)
    return EtaClass(q, p, n)


def inadmissibility_reason(eta, d1: int, d2: int) -> str | None:
    """Return why ``eta`` fails the perfect-transmission form, or None if it passes."""
    eta = as_rational(eta)
    _require_positive(d1=d1, d2=d2)
    _require_unit_interval(eta)
    q, p, n = _candidate(eta, d1, d2)
    g = gcd(q, p * d1 * d2)
    if g != 1:
        return (
            f"eta={eta} with d1={d1}, d2={d2} needs q={q}, p={p}, but "
            f"gcd(q, p*d1*d2) = {g} != 1 so the Bezout identity has no solution"
        )
    return None


def classify_eta(eta, d1: int, d2: int) -> EtaClass | None:
    """Write ``eta`` as ``q / (q + p*d1*d2)`` with coprime ``q`` and ``p*d1*d2``.

    Returns ``(q, p, n)`` with ``n = q + p*d1*d2``, or None when no such
    representation exists (see :func:`inadmissibility_reason` for the cause).
    """
    if inadmissibility_reason(eta, d1, d2) is not None:
        return None
    return _candidate(as_rational(eta), d1, d2)


def enumerate_admissible_etas(d1: int, d2: int, q_max: int, p_max: int) -> list[AdmissibleEta]:
    """All admissible transmissivities with ``q <= q_max`` and ``p <= p_max``, ascending."""
    _require_positive(d1=d1, d2=d2, q_max=q_max, p_max=p_max)
    dd = d1 * d2
    best: dict[Fraction, AdmissibleEta] = {}
    for q in range(1, q_max + 1):
        for p in range(1, p_max + 1):
            if gcd(q, p * dd) != 1:
                continue
            n = q + p * dd
            eta = Fraction(q, n)
            if eta not in best or n < best[eta].n:
                best[eta] = AdmissibleEta(eta, q, p, n)
    return [best[k] for k in sorted(best)]


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) > 0`` and ``a*x + b*y == g``."""
    if a == 0 and b == 0:
        raise ValueError("extended_gcd(0, 0) is undefined")
    _checked(a, b)
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_x, x = x, old_x - k * x
        old_y, y = y, old_y - k * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def bezout(q: int, m: int) -> BezoutPair:
    """Bezout coefficients for coprime ``q`` and ``m``."""
    g, x, y = extended_gcd(q, m)
    if g != 1:
        raise NotInvertibleError(f"gcd({q}, {m}) = {g}; no Bezout pair summing to 1")
    return BezoutPair(x, y, q, m)


def mod_inverse(r: int, n: int) -> int:
    """Inverse of ``r`` modulo ``n`` in ``[0, n)``."""
    _require_positive(n=n)
    if n == 1:
        return 0
    g, x, _ = extended_gcd(r % n, n)
    if g != 1:
        raise NotInvertibleError(f"{r} has no inverse modulo {n} (gcd = {g})")
    return x % n
