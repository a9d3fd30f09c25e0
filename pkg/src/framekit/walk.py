"""Closed-form analysis of the T-gate correction random walk.

The walk starts one level above the absorbing state. Each step goes down
with probability ``1 - p`` (buffer Clifford in C-) and up with probability
``p`` (buffer Clifford in C+). The first passage to the absorbing state takes
``2j + 1`` steps with probability ``K_j p^j (1-p)^(j+1)`` where ``K_j`` is the
j-th Catalan number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

MAX_SERIES_TERMS = 10**6
# Beyond this many estimated series terms, evaluate the 2F1 through the
# Catalan partial sum instead (only happens for z within ~4e-4 of 1).
_SERIES_BUDGET = 10**5
_LOG_SPACE_ABOVE = 100


class UnattainableTarget(ValueError):
    """Raised when no cutoff reaches the requested success probability."""


@dataclass(frozen=True)
class WalkParameters:
    p: float
    n: int = 0
    q: float = 0.5

    def __post_init__(self):
        _check_p(self.p)
        if self.n < 0:
            raise ValueError("cutoff n must be non-negative")
        if not 0 < self.q < 1:
            raise ValueError("target q must lie in (0, 1)")

    @property
    def epsilon(self) -> float:
        return 1.0 - self.q


def _check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability p={p} outside [0, 1]")


def catalan(j: int) -> int:
    if j < 0:
        raise ValueError("Catalan index must be non-negative")
    return math.comb(2 * j, j) // (j + 1)


def _log_catalan(j: int) -> float:
    return math.lgamma(2 * j + 1) - 2 * math.lgamma(j + 1) - math.log(j + 1)


def return_probability(p: float, j: int) -> float:
    """Probability that the first return happens after exactly ``2j + 1`` steps."""
    _check_p(p)
    if j < 0:
        raise ValueError("j must be non-negative")
    if p == 1.0:
        return 0.0
    if j == 0:
        return 1.0 - p
    if p == 0.0:
        return 0.0
    if j <= _LOG_SPACE_ABOVE:
        return catalan(j) * p**j * (1.0 - p) ** (j + 1)
    return math.exp(_log_catalan(j) + j * math.log(p) + (j + 1) * math.log1p(-p))


def termination_probability(p: float) -> float:
    """Total probability that the walk is ever absorbed: ``min((1-p)/p, 1)``."""
    _check_p(p)
    if p <= 0.5:
        return 1.0
    return (1.0 - p) / p


def cutoff_probability_direct(p: float, n: int) -> float:
    """Sum of ``return_probability(p, k)`` for ``k = 0..n``, by term recurrence."""
    _check_p(p)
    if n < 0:
        raise ValueError("n must be non-negative")
    x = p * (1.0 - p)
    term = 1.0  # K_k x^k
    total = 0.0
    for k in range(n + 1):
        total += term
        term *= 2.0 * (2 * k + 1) / (k + 2) * x
    return (1.0 - p) * total


def _catalan_generating(x: float) -> float:
    """Generating function sum_k K_k x^k for 0 <= x <= 1/4."""
    if x == 0.0:
        return 1.0
    return 2.0 / (1.0 + math.sqrt(max(0.0, 1.0 - 4.0 * x)))


def _hyp2f1_from_partial_sum(n: int, z: float) -> float:
    # 2F1(1, 3/2+n; 3+n; z) = (c(x) - sum_{k<=n} K_k x^k) / (K_{n+1} x^{n+1}),  x = z/4.
    # Terms are carried normalised by the leading one so nothing underflows.
    x = z / 4.0
    # u_k = K_k x^k / (K_{n+1} x^{n+1}), computed backwards from u_{n+1} = 1.
    head = 0.0
    u = 1.0
    for k in range(n, -1, -1):
        # K_{k+1}/K_k = 2(2k+1)/(k+2)
        u /= 2.0 * (2 * k + 1) / (k + 2) * x
        head += u
    log_lead = _log_catalan(n + 1) + (n + 1) * math.log(x)
    return _catalan_generating(x) * math.exp(-log_lead) - head


def hyp2f1_special(n: int, z: float) -> float:
    """Gauss hypergeometric ``2F1(1, 3/2 + n; 3 + n; z)`` for ``0 <= z <= 1``.

    Summed with the term recurrence ``t_{k+1} = t_k (3/2+n+k)/(3+n+k) z``.
    At ``z = 1`` the Gauss summation value ``2(n + 2)`` is returned; very
    close to 1, where the series needs more than ~1e5 terms, the value is
    recovered from the Catalan partial sum.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not (0.0 <= z <= 1.0):
        raise ValueError(f"z={z} outside [0, 1]")
    if z == 0.0:
        return 1.0
    if z == 1.0:
        return 2.0 * (n + 2)
    if 37.0 / -math.log(z) > _SERIES_BUDGET:
        return _hyp2f1_from_partial_sum(n, z)
    b = 1.5 + n
    c = 3.0 + n
    term = 1.0
    total = 1.0
    for k in range(MAX_SERIES_TERMS):
        term *= (b + k) / (c + k) * z
        total += term
        if abs(term) < 1e-16 * abs(total):
            return total
    return _hyp2f1_from_partial_sum(n, z)


def tail_probability(p: float, n: int) -> float:
    """``f(p, n)``: probability of first return strictly after ``2n + 1`` steps."""
    _check_p(p)
    if n < 0:
        raise ValueError("n must be non-negative")
    if p == 0.0 or p == 1.0:
        return 0.0
    x = p * (1.0 - p)
    hyp = hyp2f1_special(n, 4.0 * x)
    if n <= _LOG_SPACE_ABOVE:
        return (1.0 - p) / (n + 2) * math.comb(2 * (n + 1), n + 1) * x ** (n + 1) * hyp
    log_f = (
        math.log1p(-p)
        - math.log(n + 2)
        + math.lgamma(2 * n + 3)
        - 2 * math.lgamma(n + 2)
        + (n + 1) * math.log(x)
        + math.log(hyp)
    )
    return math.exp(log_f)


def cutoff_probability(p: float, n: int) -> float:
    """``F(p, n)``: probability that the walk is absorbed within ``2n + 1`` steps.

    ``F = termination_probability(p) - f(p, n)``; for ``p <= 1/2`` this is
    ``1 - f(p, n)``.
    """
    return termination_probability(p) - tail_probability(p, n)


def min_steps_for_target(p: float, q: float) -> int:
    """Smallest ``n`` with ``F(p, n) > q``.

    Raises UnattainableTarget when ``q`` is not below the termination probability.
    """
    _check_p(p)
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    if q >= termination_probability(p):
        raise UnattainableTarget(
            f"q={q} is not below the termination probability {termination_probability(p)} at p={p}"
        )
    if cutoff_probability(p, 0) > q:
        return 0
    lo, hi = 0, 1
    while cutoff_probability(p, hi) <= q:
        lo, hi = hi, hi * 2
    # invariant: F(lo) <= q < F(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cutoff_probability(p, mid) > q:
            hi = mid
        else:
            lo = mid
    return hi


def upper_bound(p: float, n: int) -> float:
    """Analytic upper bound ``1 - (1-p)(2p+1)/(n+2) [2p(1-p)]^(n+1)`` on F(p, n)."""
    _check_p(p)
    return 1.0 - (1.0 - p) * (2.0 * p + 1.0) / (n + 2) * (2.0 * p * (1.0 - p)) ** (n + 1)


def binomial_bound_holds(n: int) -> bool:
    return math.comb(2 * (n + 1), n + 1) >= 2 ** (n + 1)


def upper_bound_check(p: float, n: int) -> bool:
    """True iff both the binomial bound and the F(p, n) upper bound hold (n >= 1)."""
    if n < 1:
        raise ValueError("the bound is stated for n >= 1")
    return binomial_bound_holds(n) and cutoff_probability(p, n) <= upper_bound(p, n) + 1e-15


def hyp2f1_lower_bound_holds(p: float, n: int) -> bool:
    """Whether ``2F1(1, 3/2+n; 3+n; 4p(1-p)) >= 2p + 1`` at this point."""
    _check_p(p)
    return hyp2f1_special(n, 4.0 * p * (1.0 - p)) >= 2.0 * p + 1.0


FIG6_TARGETS = (0.9, 0.99, 0.999)


def fig6_rows(ps, qs=FIG6_TARGETS) -> list[tuple[float, float, int]]:
    """``(q, p, n)`` rows with ``n = min_steps_for_target(p, q)``; unattainable points are skipped."""
    rows = []
    for q in qs:
        for p in ps:
            try:
                rows.append((q, p, min_steps_for_target(p, q)))
            except UnattainableTarget:
                continue
    return rows
