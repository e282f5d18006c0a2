"""Renewal coefficients, the series criterion with an integral tail, and bisection on delta.

With ``s = d * delta``:

* ``b_k = ((k+2)/(k+3))**s``
* ``a_k = ((k+1)/(2k+1))**s + (d-2) * 2**(-s)``
* ``lambda_k = a_k * prod_{j<k} b_j = a_k * (3/(k+2))**s``

The series ``sum_k lambda_k`` is bounded above by a partial sum plus the
integral of ``g(x) = (3/(2x+1))**s + (d-2) * (3/(2(x+2)))**s``, which dominates
``lambda_k`` term by term because ``(k+1)/(k+2) < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .core import check_dimension
from .enumeration import EXACT, DeltaLike, DeltaMode, as_mode, fraction_sum

Value = Union[Fraction, float]

DEFAULT_K = 10**5
DEFAULT_TOL = 1e-9
BRACKET_OFFSET = 1e-6
DOMINATION_CHECK_K = 10**4


class DomainError(ValueError):
    """A precondition on d, delta, K or the tail limit does not hold."""


class NoCertificateError(RuntimeError):
    """The criterion fails even at delta = 1."""


def exponent(d: int, mode: DeltaMode):
    return d if mode.exact else d * mode.delta


def _pow(base: Fraction, d: int, mode: DeltaMode) -> Value:
    return mode.power(base, d)


def b_coeff(d: int, delta: DeltaLike, k: int) -> Value:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return _pow(Fraction(k + 2, k + 3), d, as_mode(delta))


def a_coeff(d: int, delta: DeltaLike, k: int) -> Value:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    mode = as_mode(delta)
    return _pow(Fraction(k + 1, 2 * k + 1), d, mode) + (d - 2) * _pow(Fraction(1, 2), d, mode)


def lambda_coeff(d: int, delta: DeltaLike, k: int) -> Value:
    """a_k times the product of b_1..b_{k-1}, evaluated literally."""
    mode = as_mode(delta)
    out = a_coeff(d, mode, k)
    for j in range(1, k):
        out *= b_coeff(d, mode, j)
    return out


def lambda_telescoped(d: int, delta: DeltaLike, k: int) -> Value:
    """Closed form a_k * (3/(k+2))**s of :func:`lambda_coeff`."""
    mode = as_mode(delta)
    return a_coeff(d, mode, k) * _pow(Fraction(3, k + 2), d, mode)


def tail_integrand(d: int, delta: DeltaLike, x) -> Value:
    """g(x), the decreasing majorant of lambda_k used for the tail."""
    mode = as_mode(delta)
    x = Fraction(x) if mode.exact else x
    return _pow(Fraction(3) / (2 * x + 1), d, mode) + (d - 2) * _pow(Fraction(3) / (2 * (x + 2)), d, mode)


def tail_bound(d: int, delta: DeltaLike, lower_limit: int) -> Value:
    """Closed-form integral of g from ``lower_limit`` to infinity."""
    check_dimension(d)
    mode = as_mode(delta)
    s = exponent(d, mode)
    if s <= 1:
        raise DomainError(f"tail integral diverges for d*delta = {s} <= 1")
    if lower_limit < 1:
        raise DomainError(f"lower limit must be >= 1, got {lower_limit}")
    L = lower_limit
    if mode.exact:
        return Fraction(3**s, 2 * (s - 1) * (2 * L + 1) ** (s - 1)) + Fraction(
            (d - 2) * 3**s, 2**s * (s - 1) * (L + 2) ** (s - 1)
        )
    return 3**s * (2 * L + 1) ** (1 - s) / (2 * (s - 1)) + (d - 2) * 1.5**s * (L + 2) ** (1 - s) / (s - 1)


# -- vectorised float evaluation ------------------------------------------------


def _lambda_array(d: int, s: float, K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=np.float64)
    shared = (d - 2) * (1.5 / (k + 2)) ** s
    return ((k + 1) / (2 * k + 1)) ** s * (3 / (k + 2)) ** s + shared


def _g_array(d: int, s: float, K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=np.float64)
    return (3 / (2 * k + 1)) ** s + (d - 2) * (1.5 / (k + 2)) ** s


def domination_holds(d: int, delta: DeltaLike, k_max: int = DOMINATION_CHECK_K) -> bool:
    """Check lambda_k <= g(k) for k = 1..k_max (exactly in exact mode)."""
    mode = as_mode(delta)
    if mode.exact:
        return all(lambda_telescoped(d, mode, k) <= tail_integrand(d, mode, k) for k in range(1, k_max + 1))
    s = exponent(d, mode)
    return bool(np.all(_lambda_array(d, s, k_max) <= _g_array(d, s, k_max)))


# -- the criterion ------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionReport:
    d: int
    delta: DeltaMode
    K: int
    partial_sum: Value
    tail_bound: Value
    upper_bound: Value
    verdict: bool
    tail_lower_limit: int
    domination_checked_to: int = 0
    notes: tuple[str, ...] = field(default=())


def partial_sum(d: int, delta: DeltaLike, K: int) -> Value:
    mode = as_mode(delta)
    if mode.exact:
        return fraction_sum(lambda_telescoped(d, mode, k) for k in range(1, K + 1))
    return math.fsum(_lambda_array(d, exponent(d, mode), K).tolist())


def criterion_sum(d: int, delta: DeltaLike, K: int, tail_lower_limit: int | None = None) -> CriterionReport:
    """Partial sum of lambda_k up to K plus the integral tail from ``tail_lower_limit``.

    ``tail_lower_limit`` defaults to K, which bounds the terms k > K. The
    value K - 1 is accepted only to reproduce the looser printed variant.
    """
    check_dimension(d)
    mode = as_mode(delta)
    if not mode.delta > 1 / (d - 1):
        raise DomainError(f"delta must exceed 1/(d-1) = {1 / (d - 1):.6g}, got {mode.delta}")
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    L = K if tail_lower_limit is None else tail_lower_limit
    if L not in (K, K - 1) or L < 1:
        raise DomainError(f"tail lower limit must be K or K-1 (and >= 1), got {L}")
    # The domination check always runs in floats; exact mode just uses s = d.
    check_to = max(K, DOMINATION_CHECK_K)
    if not domination_holds(d, DeltaMode(mode.delta), check_to):
        raise DomainError("lambda_k <= g(k) failed; the tail bound would be invalid")
    part = partial_sum(d, mode, K)
    tail = tail_bound(d, mode, L)
    upper = part + tail
    notes = () if L == K else ("tail starts at K-1: the K-th band is counted twice",)
    return CriterionReport(
        d=d,
        delta=mode,
        K=K,
        partial_sum=part,
        tail_bound=tail,
        upper_bound=upper,
        verdict=bool(upper < 1),
        tail_lower_limit=L,
        domination_checked_to=check_to,
        notes=notes,
    )


@dataclass(frozen=True)
class BisectionResult:
    d: int
    delta_star: float
    dim_upper_bound: float
    iterations: int
    final_report: CriterionReport
    lower_probe: float
    lower_report: CriterionReport | None
    tol: float


def min_delta(d: int, tol: float = DEFAULT_TOL, K: int = DEFAULT_K) -> BisectionResult:
    """Smallest delta (within ``tol``) at which the criterion certifies, by bisection.

    Every lambda_k and the tail bound decrease strictly in delta, so the set of
    certifying deltas is an interval ending at 1.
    """
    check_dimension(d)
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    hi = 1.0
    top = criterion_sum(d, DeltaMode(hi), K)
    if not top.verdict:
        raise NoCertificateError(f"criterion fails at delta = 1 for d = {d}, K = {K}")
    lo = 1 / (d - 1) + BRACKET_OFFSET
    lo_report = criterion_sum(d, DeltaMode(lo), K)
    if lo_report.verdict:
        return BisectionResult(d, lo, d - 2 + lo, 0, lo_report, lo, None, tol)
    best, it = top, 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        rep = criterion_sum(d, DeltaMode(mid), K)
        it += 1
        if rep.verdict:
            hi, best = mid, rep
        else:
            lo, lo_report = mid, rep
    return BisectionResult(d, hi, d - 2 + hi, it, best, lo, lo_report, tol)


def d_monotonicity_check(d_max: int, k_max: int) -> bool:
    """Exact check that lambda_k(d+1, 1) <= lambda_k(d, 1) for 3 <= d < d_max, k <= k_max."""
    if d_max < 4:
        raise DomainError(f"d_max must be >= 4, got {d_max}")
    return all(
        lambda_telescoped(d + 1, EXACT, k) <= lambda_telescoped(d, EXACT, k)
        for d in range(3, d_max)
        for k in range(1, k_max + 1)
    )
