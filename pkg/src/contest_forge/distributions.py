"""Type distributions: quality marginals, joint (q, c) laws, and finite surrogates.

Quality marginals are atomless (strictly increasing continuous CDFs); joint
laws are mixtures of axis-aligned rectangles with uniform mass, which is
enough to express every worked example while keeping all integrals closed
form. The finite-support surrogate :class:`EmpiricalTypes` requires pairwise
distinct qualities so that rank comparisons never tie; the discretizer
enforces that with a deterministic micro-jitter (at most 1e-9 of the support
width, applied only to colliding points). This distinct-q convention is the
finite stand-in for an atomless marginal and is relied on by the solvers'
strict comparisons.

Convention used throughout: the maximum over an empty participant set is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NoLowCostMass, NumericalError, ValidationError

__all__ = [
    "Uniform",
    "PiecewiseLinearCDF",
    "QualityDistribution",
    "RectComponent",
    "RectMixture",
    "EmpiricalTypes",
    "cdf",
    "quantile",
    "sample_joint",
    "low_cost_max_cdf",
    "median_max_quality",
    "discretize",
    "distribution_to_dict",
    "distribution_from_dict",
]

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Uniform:
    """Uniform quality on [a, b), a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.a >= self.b:
            raise ValidationError(f"need finite a < b, got [{self.a!r}, {self.b!r}]")

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0.0) or np.any(u > 1.0):
            raise ValidationError("quantile argument outside [0, 1]")
        return self.a + u * (self.b - self.a)

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.b)


@dataclass(frozen=True)
class PiecewiseLinearCDF:
    """Continuous strictly increasing CDF through the given knots.

    ``knots`` is a sequence of (quality, probability) pairs with strictly
    increasing qualities and probabilities running from 0 to 1.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.knots) < 2:
            raise ValidationError("need at least two knots")
        qs = [k[0] for k in self.knots]
        us = [k[1] for k in self.knots]
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValidationError("knot qualities must be strictly increasing")
        if any(b <= a for a, b in zip(us, us[1:])):
            raise ValidationError("knot probabilities must be strictly increasing")
        if abs(us[0]) > _WEIGHT_TOL or abs(us[-1] - 1.0) > _WEIGHT_TOL:
            raise ValidationError("knot probabilities must run from 0 to 1")

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        arr = np.asarray(self.knots, dtype=float)
        return arr[:, 0], arr[:, 1]

    def cdf(self, x):
        qs, us = self._arrays()
        return np.interp(np.asarray(x, dtype=float), qs, us, left=0.0, right=1.0)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0.0) or np.any(u > 1.0):
            raise ValidationError("quantile argument outside [0, 1]")
        qs, us = self._arrays()
        return np.interp(u, us, qs)

    @property
    def support(self) -> tuple[float, float]:
        return (self.knots[0][0], self.knots[-1][0])


QualityDistribution = Uniform | PiecewiseLinearCDF


def cdf(qd: QualityDistribution, x):
    """F(x); scalar in, scalar out."""
    out = qd.cdf(x)
    return float(out) if np.ndim(x) == 0 else out


def quantile(qd: QualityDistribution, u):
    """F^{-1}(u): right inverse of cdf; endpoints map to support endpoints."""
    out = qd.quantile(u)
    return float(out) if np.ndim(u) == 0 else out


@dataclass(frozen=True)
class RectComponent:
    q_lo: float
    q_hi: float
    c_lo: float
    c_hi: float
    weight: float

    def __post_init__(self):
        if self.q_lo < 0.0 or self.c_lo < 0.0:
            raise ValidationError("rectangle endpoints must be nonnegative")
        if self.q_hi < self.q_lo or self.c_hi < self.c_lo:
            raise ValidationError("rectangle intervals must be nonempty")
        if self.weight < 0.0:
            raise ValidationError("component weight must be nonnegative")


@dataclass(frozen=True)
class RectMixture:
    """Mixture of uniform rectangles in the (q, c) plane; weights sum to 1."""

    components: tuple[RectComponent, ...]

    def __post_init__(self):
        if len(self.components) == 0:
            raise ValidationError("mixture needs at least one component")
        total = math.fsum(comp.weight for comp in self.components)
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise ValidationError(f"component weights sum to {total}, expected 1")

    @property
    def q_support(self) -> tuple[float, float]:
        return (
            min(c.q_lo for c in self.components),
            max(c.q_hi for c in self.components),
        )

    def _weight_array(self) -> np.ndarray:
        w = np.array([c.weight for c in self.components], dtype=float)
        return w / w.sum()


@dataclass(frozen=True)
class EmpiricalTypes:
    """Weighted finite support of (q, c) types with pairwise distinct q.

    ``n`` is the contest population size the support will be paired with; it
    may be left as None and supplied by the contest at solve time.
    """

    q: np.ndarray
    c: np.ndarray
    w: np.ndarray
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        if not (self.q.shape == self.c.shape == self.w.shape) or self.q.ndim != 1:
            raise ValidationError("q, c, w must be 1-d arrays of equal length")
        if self.q.size == 0:
            raise ValidationError("empty support")
        if np.any(self.w <= 0.0):
            raise ValidationError("support weights must be positive")
        if abs(math.fsum(self.w.tolist()) - 1.0) > _WEIGHT_TOL:
            raise ValidationError("support weights must sum to 1")
        if np.unique(self.q).size != self.q.size:
            raise ValidationError("support qualities must be pairwise distinct")

    @property
    def support_size(self) -> int:
        return int(self.q.size)

    def with_n(self, n: int) -> "EmpiricalTypes":
        return replace(self, n=int(n))


def sample_joint(jd: RectMixture, rng: np.random.Generator, size: int | None = None):
    """Draw (q, c) pairs: pick a rectangle by weight, then uniform inside it.

    ``size=None`` returns a scalar pair; an integer returns two arrays.
    """
    w = jd._weight_array()
    k = len(jd.components)
    q_lo = np.array([c.q_lo for c in jd.components])
    q_hi = np.array([c.q_hi for c in jd.components])
    c_lo = np.array([c.c_lo for c in jd.components])
    c_hi = np.array([c.c_hi for c in jd.components])
    m = 1 if size is None else int(size)
    idx = rng.choice(k, size=m, p=w)
    qs = q_lo[idx] + rng.random(m) * (q_hi[idx] - q_lo[idx])
    cs = c_lo[idx] + rng.random(m) * (c_hi[idx] - c_lo[idx])
    if size is None:
        return float(qs[0]), float(cs[0])
    return qs, cs


def _pr_q_above(comp: RectComponent, x: float) -> float:
    if comp.q_hi <= x:
        return 0.0
    if comp.q_lo > x:
        return 1.0
    return (comp.q_hi - x) / (comp.q_hi - comp.q_lo)


def _pr_c_at_most(comp: RectComponent, cap: float) -> float:
    if comp.c_lo > cap:
        return 0.0
    if comp.c_hi <= cap:
        return 1.0
    return (cap - comp.c_lo) / (comp.c_hi - comp.c_lo)


def low_cost_max_cdf(jd: RectMixture, cost_cap: float, m: int, x: float) -> float:
    """Pr[max{q_i : c_i <= cap} <= x] over m independent draws.

    Equals [Pr(q <= x or c > cap)]^m; the empty max counts as 0, so a cap
    below every cost gives 1 for any x >= 0.
    """
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m!r}")
    beat = math.fsum(
        comp.weight * _pr_q_above(comp, x) * _pr_c_at_most(comp, cost_cap)
        for comp in jd.components
    )
    base = min(1.0, max(0.0, 1.0 - beat))
    return base**m


def median_max_quality(jd: RectMixture, cost_cap: float, m: int) -> float:
    """Median of max{q_i : c_i <= cap} over m draws, by bisection on the CDF.

    Returns inf{x : CDF(x) >= 1/2}; when the CDF crosses 1/2 continuously
    this solves low_cost_max_cdf(mu) = 1/2 to float resolution.
    """
    qualifying = math.fsum(
        comp.weight * _pr_c_at_most(comp, cost_cap) for comp in jd.components
    )
    if qualifying <= 0.0:
        raise NoLowCostMass(f"no mass with cost <= {cost_cap}")
    if low_cost_max_cdf(jd, cost_cap, m, 0.0) >= 0.5:
        return 0.0
    hi = max(
        comp.q_hi for comp in jd.components if _pr_c_at_most(comp, cost_cap) > 0.0
    )
    lo = 0.0
    # invariant: CDF(lo) < 1/2 <= CDF(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if low_cost_max_cdf(jd, cost_cap, m, mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    return hi


def _stratified_counts(weights: np.ndarray, m: int) -> np.ndarray:
    """Largest-remainder apportionment of m points; each count within +-1 of m*w."""
    exact = weights * m
    counts = np.floor(exact).astype(int)
    remainder = m - counts.sum()
    if remainder > 0:
        order = np.argsort(-(exact - counts), kind="stable")
        counts[order[:remainder]] += 1
    return counts


def _force_distinct(q: np.ndarray, scale: float) -> np.ndarray:
    """Deterministically separate duplicate values by multiples of ``scale``."""
    q = q.copy()
    for _ in range(100):
        values, inverse, counts = np.unique(q, return_inverse=True, return_counts=True)
        if values.size == q.size:
            return q
        for v_idx in np.nonzero(counts > 1)[0]:
            members = np.nonzero(inverse == v_idx)[0]
            for rank, point in enumerate(members[1:], start=1):
                q[point] += rank * scale / counts[v_idx]
        scale *= 2.0
    raise NumericalError("could not separate duplicate support qualities")


def discretize(
    jd: RectMixture,
    m: int,
    seed,
    *,
    n: int | None = None,
    stratified: bool = True,
) -> EmpiricalTypes:
    """Finite weighted support of m points drawn from the mixture.

    Stratified mode (default) allocates points to components by largest
    remainder, so per-component counts stay within +-1 of m * weight;
    ``stratified=False`` draws i.i.d. instead. Weights are uniform 1/m.
    Duplicate q values (possible with degenerate rectangles) are separated by
    a deterministic jitter of at most 1e-9 of the support width.
    """
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m!r}")
    rng = np.random.default_rng(seed)
    if stratified:
        counts = _stratified_counts(jd._weight_array(), m)
        qs_parts, cs_parts = [], []
        for comp, count in zip(jd.components, counts):
            if count == 0:
                continue
            qs_parts.append(comp.q_lo + rng.random(count) * (comp.q_hi - comp.q_lo))
            cs_parts.append(comp.c_lo + rng.random(count) * (comp.c_hi - comp.c_lo))
        qs = np.concatenate(qs_parts)
        cs = np.concatenate(cs_parts)
    else:
        qs, cs = sample_joint(jd, rng, size=m)

    q_lo, q_hi = jd.q_support
    width = q_hi - q_lo
    jitter_scale = 1e-9 * max(width, 1.0, abs(q_hi))
    qs = _force_distinct(qs, jitter_scale)
    weights = np.full(m, 1.0 / m)
    return EmpiricalTypes(q=qs, c=cs, w=weights, n=n)


# --- JSON wire formats ----------------------------------------------------


def distribution_to_dict(dist) -> dict:
    if isinstance(dist, Uniform):
        return {"kind": "uniform_quality", "a": dist.a, "b": dist.b}
    if isinstance(dist, PiecewiseLinearCDF):
        return {"kind": "piecewise_cdf", "knots": [list(k) for k in dist.knots]}
    if isinstance(dist, RectMixture):
        return {
            "kind": "rect_mixture",
            "components": [
                {"q": [c.q_lo, c.q_hi], "c": [c.c_lo, c.c_hi], "weight": c.weight}
                for c in dist.components
            ],
        }
    if isinstance(dist, EmpiricalTypes):
        points = np.column_stack([dist.q, dist.c, dist.w])
        return {"kind": "empirical", "points": points.tolist()}
    raise ValidationError(f"unknown distribution object: {type(dist).__name__}")


def distribution_from_dict(doc: dict):
    try:
        kind = doc["kind"]
        if kind == "uniform_quality":
            return Uniform(float(doc["a"]), float(doc["b"]))
        if kind == "piecewise_cdf":
            return PiecewiseLinearCDF(
                tuple((float(q), float(u)) for q, u in doc["knots"])
            )
        if kind == "rect_mixture":
            comps = tuple(
                RectComponent(
                    q_lo=float(c["q"][0]),
                    q_hi=float(c["q"][1]),
                    c_lo=float(c["c"][0]),
                    c_hi=float(c["c"][1]),
                    weight=float(c["weight"]),
                )
                for c in doc["components"]
            )
            return RectMixture(comps)
        if kind == "empirical":
            pts = np.asarray(doc["points"], dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 3:
                raise ValidationError("empirical points must be [q, c, w] triples")
            return EmpiricalTypes(q=pts[:, 0], c=pts[:, 1], w=pts[:, 2])
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise ValidationError(f"malformed distribution document: {exc}") from exc
    raise ValidationError(f"unknown distribution kind: {kind!r}")
