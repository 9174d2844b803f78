"""Scalar numerics shared by the contest solvers.

Conventions
-----------
* Binomial(n, p) counts successes among n independent trials; the pmf at k is
  C(n, k) p^k (1-p)^(n-k), zero outside 0 <= k <= n.
* ``poisson_cdf_partial(lam, j)`` is the partial sum sum_{k=0}^{j-1}
  e^(-lam) lam^k / k!, i.e. Pr[Poisson(lam) < j].
* Root finders return a :class:`BracketedRoot`; saturation flags mark targets
  that fall outside the value range on the bracket instead of raising.

Everything here is scalar and deterministic. Vectorised binomial evaluations
used by the hot solver loops live with their callers and are cross-checked
against these scalar routines in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import special

from .errors import BracketFailure, IterationLimit, NonFinite

__all__ = [
    "BracketedRoot",
    "log_factorial",
    "log_binom_pmf",
    "binom_pmf",
    "binom_tail_geq",
    "poisson_cdf_partial",
    "poisson_cdf_partial_deriv",
    "bisect_decreasing",
    "find_positive_root_sign_change",
]

# Exact comb() products are both faster and exact up to here; beyond, the
# log-space route avoids overflow of the binomial coefficient.
_LOG_SPACE_THRESHOLD = 30

_MAX_BISECT_ITER = 200
_MAX_DOUBLINGS = 128
_REL_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class BracketedRoot:
    """Result of a one-dimensional bracketed solve.

    ``saturated_low``/``saturated_high`` mean the target lay outside the
    function's range on the bracket and the corresponding endpoint was
    returned; ``residual`` is f(root) - target (or the raw polynomial value
    for sign-change solves).
    """

    root: float
    residual: float
    iterations: int
    saturated_low: bool = False
    saturated_high: bool = False


def log_factorial(n: int) -> float:
    """Natural log of n! for integer n >= 0."""
    if n < 0 or n != int(n):
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return math.lgamma(n + 1.0)


def log_binom_pmf(n: int, k: int, p: float) -> float:
    """log Pr[X = k] for X ~ Binomial(n, p); -inf outside 0 <= k <= n.

    Exact in log space, so deep-tail points that underflow ``binom_pmf``
    stay comparable.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n!r}")
    if k < 0 or k > n:
        return -math.inf
    if p == 0.0:
        return 0.0 if k == 0 else -math.inf
    if p == 1.0:
        return 0.0 if k == n else -math.inf
    out = log_factorial(n) - log_factorial(k) - log_factorial(n - k)
    if k > 0:
        out += k * math.log(p)
    if k < n:
        out += (n - k) * math.log1p(-p)
    return out


def binom_pmf(n: int, k: int, p: float) -> float:
    """Pr[X = k] for X ~ Binomial(n, p); 0.0 outside 0 <= k <= n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n!r}")
    if k < 0 or k > n:
        return 0.0
    if 0.0 < p < 1.0 and n <= _LOG_SPACE_THRESHOLD:
        return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    return math.exp(log_binom_pmf(n, k, p))


def binom_tail_geq(n: int, j: int, p: float) -> float:
    """Pr[X >= j] for X ~ Binomial(n, p).

    Summed over whichever tail has fewer terms, complementing when the lower
    tail is shorter. The result is clipped to [0, 1].
    """
    if j <= 0:
        return 1.0
    if j > n:
        return 0.0
    upper_terms = n - j + 1
    if upper_terms <= j:
        total = math.fsum(binom_pmf(n, k, p) for k in range(j, n + 1))
    else:
        total = 1.0 - math.fsum(binom_pmf(n, k, p) for k in range(j))
    return min(1.0, max(0.0, total))


def poisson_cdf_partial(lam: float, j: int) -> float:
    """sum_{k=0}^{j-1} e^(-lam) lam^k / k!  (requires j >= 1, lam >= 0)."""
    if j < 1:
        raise ValueError(f"j must be a positive integer, got {j!r}")
    if lam < 0.0:
        raise ValueError(f"lam must be nonnegative, got {lam!r}")
    # Regularised upper incomplete gamma Q(j, lam) equals this partial sum
    # exactly for integer j.
    return float(special.gammaincc(j, lam))


def poisson_cdf_partial_deriv(lam: float, j: int) -> float:
    """d/dlam of ``poisson_cdf_partial``: the sum telescopes to a single term."""
    if j < 1:
        raise ValueError(f"j must be a positive integer, got {j!r}")
    if lam < 0.0:
        raise ValueError(f"lam must be nonnegative, got {lam!r}")
    if lam == 0.0:
        return -1.0 if j == 1 else 0.0
    log_term = -lam + (j - 1) * math.log(lam) - log_factorial(j - 1)
    return -math.exp(log_term)


def bisect_decreasing(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float,
) -> BracketedRoot:
    """Solve f(x) = target for weakly decreasing f on [lo, hi].

    Stops when |f(mid) - target| <= tol. Targets above f(lo) return lo with
    ``saturated_low`` set; targets below f(hi) return hi with
    ``saturated_high``. Raises :class:`NonFinite` if f produces a non-finite
    value and :class:`IterationLimit` after 200 bisection steps without
    meeting the residual tolerance.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    if tol < 0.0:
        raise ValueError(f"tol must be nonnegative, got {tol!r}")

    f_lo = f(lo)
    f_hi = f(hi)
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)):
        raise NonFinite(f"f non-finite at bracket endpoints: f({lo})={f_lo}, f({hi})={f_hi}")
    if target > f_lo:
        return BracketedRoot(lo, f_lo - target, 0, saturated_low=True)
    if target < f_hi:
        return BracketedRoot(hi, f_hi - target, 0, saturated_high=True)
    if abs(f_lo - target) <= tol:
        return BracketedRoot(lo, f_lo - target, 0)
    if abs(f_hi - target) <= tol:
        return BracketedRoot(hi, f_hi - target, 0)

    for iteration in range(1, _MAX_BISECT_ITER + 1):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if not math.isfinite(f_mid):
            raise NonFinite(f"f({mid}) = {f_mid}")
        if abs(f_mid - target) <= tol:
            return BracketedRoot(mid, f_mid - target, iteration)
        if f_mid > target:
            lo = mid
        else:
            hi = mid
    raise IterationLimit(
        f"bisection did not reach |f - target| <= {tol} in {_MAX_BISECT_ITER} steps"
    )


def find_positive_root_sign_change(
    poly_eval: Callable[[float], float],
    x_start: float,
) -> BracketedRoot:
    """Locate the unique positive root of a function negative near 0+.

    Doubles ``x_start`` until the sign changes (at most 128 doublings, else
    :class:`BracketFailure`), then bisects to relative tolerance 1e-12 on the
    argument. Intended for polynomials with a single sign change on (0, inf).
    """
    if x_start <= 0.0:
        raise ValueError(f"x_start must be positive, got {x_start!r}")

    lo = 0.0
    f_lo = poly_eval(lo)
    if not math.isfinite(f_lo):
        raise NonFinite(f"poly({lo}) = {f_lo}")
    if f_lo >= 0.0:
        raise BracketFailure(f"expected poly(0) < 0, got {f_lo}")

    x = x_start
    doublings = 0
    while True:
        f_x = poly_eval(x)
        if not math.isfinite(f_x):
            raise NonFinite(f"poly({x}) = {f_x}")
        if f_x == 0.0:
            return BracketedRoot(x, 0.0, doublings)
        if f_x > 0.0:
            hi = x
            break
        lo = x
        doublings += 1
        if doublings > _MAX_DOUBLINGS:
            raise BracketFailure(
                f"no sign change within {_MAX_DOUBLINGS} doublings from {x_start}"
            )
        x *= 2.0

    iterations = doublings
    while hi - lo > _REL_ROOT_TOL * hi:
        iterations += 1
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at float resolution
            break
        f_mid = poly_eval(mid)
        if not math.isfinite(f_mid):
            raise NonFinite(f"poly({mid}) = {f_mid}")
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return BracketedRoot(root, poly_eval(root), iterations)
