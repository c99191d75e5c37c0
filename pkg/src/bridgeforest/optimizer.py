"""Constrained maximization of the linear piece objective.

The problem: over non-negative weight vectors z on the catalog's u0,
maximize the linear objective sum z[U]/aut_u(U) subject to the truncated
rooted partition function rooted_series(z, k) staying at or below a cap
(1.5 by default; any constant above 1 works), restricted to closure fixed
points z[U] = maxweight(U, z).

Closing a vector never changes the partition function and never lowers the
objective, and the scaled multiplication lam*z with Y(lam*z) =
sum lam^s y_s maps closed points to closed points; the search alternates
closure, a scaling projection back to the cap, and coordinate ascent.
Returned objectives are certified lower bounds for the true maximum: the
final point is re-validated in exact rational arithmetic, never claimed
optimal.

Float arithmetic drives the inner loop; the exact re-validation rounds the
float vector to dyadic rationals, closes it exactly, and scales by the
rational factor cap/Y when needed (for lam <= 1, sum lam^s y_s <= lam *
sum y_s, so one exact scaling restores feasibility).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import treekit, weights
from .treekit import Catalog
from .weights import TruncatedSeriesEvaluator, WeightVector

__all__ = [
    "OptimizerConfig",
    "FeasiblePoint",
    "FeasibilityResult",
    "MaximizeResult",
    "BoundCheck",
    "feasibility",
    "project_scale",
    "single_var_threshold",
    "maximize",
    "bound_check",
]

DEFAULT_CAP = 1.5


@dataclass
class OptimizerConfig:
    catalog: Catalog
    k: int
    budget: int = 10_000
    tol: float = 1e-9
    restarts: int = 32
    seed: int = 0
    y_cap: float = DEFAULT_CAP

    def __post_init__(self):
        if self.k < self.catalog.u_max:
            raise ValueError("truncation order k must be >= u_max")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.y_cap <= 1.0:
            raise ValueError("the partition-function cap must exceed 1")


@dataclass
class FeasiblePoint:
    z: WeightVector
    y_value: object
    objective: object
    closed: bool


@dataclass
class FeasibilityResult:
    feasible: bool
    point: FeasiblePoint | None
    violations: list


@dataclass
class MaximizeResult:
    point: FeasiblePoint
    objective_float: float
    trace: list
    evaluations: int
    restarts_used: int
    budget_exhausted: bool
    y_per_size: dict  # exact per-size contributions at the certified point


@dataclass
class BoundCheck:
    ok: bool
    objective: object
    limit: Fraction
    epsilon: float


_EVALUATORS: dict = {}


def _evaluator(catalog: Catalog, k: int) -> TruncatedSeriesEvaluator:
    key = (catalog.key, k)
    ev = _EVALUATORS.get(key)
    if ev is None:
        ev = TruncatedSeriesEvaluator(catalog, k)
        _EVALUATORS[key] = ev
    return ev


def _exact_layers(z: WeightVector, k: int, catalog: Catalog):
    """Per-size contributions of rooted_series(z, k), exact."""
    table = weights.MaxWeightTable(catalog, z)
    layers = [Fraction(0)] * (k + 1)
    for t in treekit.enumerate_rooted(k):
        layers[t.size] += table.value(weights._unrooted_code_of(t.code)) / Fraction(t.aut_r)
    return layers


def feasibility(z: WeightVector, config: OptimizerConfig) -> FeasibilityResult:
    """Evaluate the cap constraint and the closure fixed-point constraint.

    Exact vectors are checked exactly; float vectors within config.tol.
    """
    violations = []
    cat, k = config.catalog, config.k
    if z.exact:
        y = weights.rooted_series(z, k, cat)
        cap = Fraction(config.y_cap)
        if y > cap:
            violations.append(f"rooted series {float(y):.12g} exceeds cap {config.y_cap}")
        closed_vec = weights.closure(z, cat)
        closed = closed_vec.entries == z.entries
        if not closed:
            violations.append("not a closure fixed point")
        objective = weights.piece_series_linear(z, cat)
    else:
        ev = _evaluator(cat, k)
        zv = z.to_floats()
        om, layers = ev.evaluate(zv)
        y = float(layers[1:].sum())
        if y > config.y_cap + config.tol:
            violations.append(f"rooted series {y:.12g} exceeds cap {config.y_cap}")
        closed = bool(np.max(np.abs(om[ev.u0_positions] - zv[ev.u0_zslots])) <= config.tol)
        if not closed:
            violations.append("not a closure fixed point (beyond tol)")
        objective = ev.objective(zv)
    if violations:
        return FeasibilityResult(feasible=False, point=None, violations=violations)
    return FeasibilityResult(
        feasible=True,
        point=FeasiblePoint(z=z, y_value=y, objective=objective, closed=closed),
        violations=[],
    )


def _scale_to_cap(layers, cap: float, tol: float) -> float:
    """Largest lam in (0, 1] with sum lam^s layers[s] <= cap, to within
    bracket width ~1e-16 (bisection; the polynomial is strictly increasing)."""
    sizes = np.arange(len(layers))

    def value(lam):
        return float(np.sum(layers * lam**sizes))

    if value(1.0) <= cap:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if value(mid) <= cap:
            lo = mid
        else:
            hi = mid
    return lo


def project_scale(z: WeightVector, config: OptimizerConfig) -> WeightVector:
    """Scale z by the lam making rooted_series(lam*z, k) equal to the cap
    (lam = 1 if already within it).  The scaled series is
    sum lam^s y_s with y_s the per-size contributions, a strictly
    increasing polynomial in lam, so bisection pins lam to the cap within
    config.tol."""
    if all(v == 0 for _, v in z.entries):
        raise ValueError("cannot project the zero vector")
    cat, k = config.catalog, config.k
    if z.exact:
        layers = _exact_layers(z, k, cat)
        total = sum(layers)
        cap = Fraction(config.y_cap)
        if total <= cap:
            return z
        tol_frac = Fraction(config.tol)
        lo, hi = Fraction(0), Fraction(1)
        val_lo = Fraction(0)
        for _ in range(200):
            mid = (lo + hi) / 2
            val = sum(c * mid**s for s, c in enumerate(layers))
            if val <= cap:
                lo, val_lo = mid, val
            else:
                hi = mid
            if cap - val_lo <= tol_frac:
                break
        return weights.scale_weights(lo, z)
    ev = _evaluator(cat, k)
    zv = z.to_floats()
    _, layers = ev.evaluate(zv)
    lam = _scale_to_cap(layers, config.y_cap, config.tol)
    if lam == 1.0:
        return z
    scaled = weights.scale_weights(lam, z)
    return scaled


def single_var_threshold(k: int, cap: float = DEFAULT_CAP, tol: float = 1e-12) -> float:
    """The unique x > 0 with sum over n <= k of n^(n-1) x^n / n! equal to
    `cap`, by bisection to within tol."""
    if k < 1:
        raise ValueError("k must be >= 1")
    coeffs = [float(weights._rooted_coefficient(n)) for n in range(1, k + 1)]

    def value(x):
        total = 0.0
        for c in reversed(coeffs):
            total = (total + c) * x
        return total

    lo, hi = 0.0, cap
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if value(mid) <= cap:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _certify(zv: np.ndarray, config: OptimizerConfig) -> FeasiblePoint:
    """Exact feasible point from a float vector: round to dyadic rationals,
    close exactly, and rescale by cap/Y when the cap is exceeded.

    Scaling by a constant keeps closure fixed points closed (closing and
    scaling commute), so the certified point is exactly closed and its
    series value is exactly at or below the cap.
    """
    cat, k = config.catalog, config.k
    denom = 1 << 40
    rounded = WeightVector.over(
        cat,
        {
            u.code: Fraction(max(0, round(float(v) * denom)), denom)
            for u, v in zip(cat.u0, zv)
        },
    )
    table = weights.MaxWeightTable(cat, rounded)
    closed_entries = {u.code: table.value(u.code) for u in cat.u0}
    layers = _exact_layers(rounded, k, cat)
    y = sum(layers)
    cap = Fraction(config.y_cap)
    lam = Fraction(1)
    if y > cap:
        lam = cap / y
    z_cert = WeightVector.over(
        cat, {code: lam**code.count("(") * v for code, v in closed_entries.items()}
    )
    y_cert = sum(c * lam**s for s, c in enumerate(layers))
    objective = weights.piece_series_linear(z_cert, cat)
    point = FeasiblePoint(z=z_cert, y_value=y_cert, objective=objective, closed=True)
    per_size = {s: c * lam**s for s, c in enumerate(layers) if s >= 1}
    return point, per_size


def maximize(config: OptimizerConfig, warm_starts=()) -> MaximizeResult:
    """Multi-start local search for the constrained maximum.

    Each restart settles its iterate (closure, then scaling projection to
    the cap) and runs coordinate ascent with step halving on the linear
    objective until no coordinate improves by more than tol.  Starts are a
    deterministic embedding of the single-variable threshold, any supplied
    warm starts, and seeded random vectors.  The best point is re-validated
    in exact arithmetic; the result is a certified feasible lower bound for
    the maximum, not a certificate of optimality.
    """
    cat, k = config.catalog, config.k
    ev = _evaluator(cat, k)
    d = len(cat.u0)
    sizes_u0 = np.array([u.size for u in cat.u0], dtype=np.int64)
    lin = np.array([1.0 / u.aut_u for u in cat.u0])
    cap = config.y_cap
    state = {"evals": 0}
    trace = []

    def settle(zv):
        """Close and project; returns (closed projected vector, objective)."""
        om, layers = ev.evaluate(zv)
        state["evals"] += 1
        zc = np.zeros(d)
        zc[ev.u0_zslots] = om[ev.u0_positions]
        total = float(layers[1:].sum())
        if total > cap:
            lam = _scale_to_cap(layers, cap, config.tol)
            zc = zc * lam**sizes_u0
        return zc, float(np.dot(zc, lin))

    starts = []
    x_embed = single_var_threshold(k, cap=cap)
    embed = np.zeros(d)
    embed[cat.u0_index[treekit.SINGLE_VERTEX_CODE]] = x_embed
    starts.append(embed)
    for wst in warm_starts:
        if isinstance(wst, WeightVector):
            starts.append(wst.to_floats())
        else:
            starts.append(np.asarray(wst, dtype=float))
    for r in range(config.restarts):
        rng = random.Random(f"{config.seed}:{r}")
        starts.append(np.array([rng.uniform(0.0, 1.0) for _ in range(d)]))

    best_z = None
    best_obj = -1.0
    budget_exhausted = False
    restarts_used = 0
    for idx, z0 in enumerate(starts):
        if state["evals"] >= config.budget:
            budget_exhausted = True
            break
        restarts_used += 1
        zv, obj = settle(z0)
        improved = True
        while improved and state["evals"] < config.budget:
            improved = False
            for j in range(d):
                step = max(abs(zv[j]), 0.25)
                while step > config.tol and state["evals"] < config.budget:
                    moved = False
                    for sign in (1.0, -1.0):
                        cand_j = max(0.0, zv[j] + sign * step)
                        if cand_j == zv[j]:
                            continue
                        cand = zv.copy()
                        cand[j] = cand_j
                        new_zv, new_obj = settle(cand)
                        if new_obj > obj + config.tol:
                            zv, obj = new_zv, new_obj
                            moved = True
                            improved = True
                            break
                    if not moved:
                        step *= 0.5
        if state["evals"] >= config.budget:
            budget_exhausted = True
        if obj > best_obj:
            best_obj = obj
            best_z = zv
            trace.append({"start": idx, "objective": obj, "evaluations": state["evals"]})

    point, per_size = _certify(best_z, config)
    return MaximizeResult(
        point=point,
        objective_float=float(point.objective),
        trace=trace,
        evaluations=state["evals"],
        restarts_used=restarts_used,
        budget_exhausted=budget_exhausted,
        y_per_size=per_size,
    )


def bound_check(point: FeasiblePoint, epsilon) -> BoundCheck:
    """Compare the objective against (1 + epsilon)/2.

    Float epsilons are read decimally (0.1 means 1/10)."""
    eps = epsilon if isinstance(epsilon, (int, Fraction)) else Fraction(str(epsilon))
    limit = (1 + eps) / 2
    obj = point.objective if isinstance(point.objective, Fraction) else Fraction(point.objective)
    return BoundCheck(ok=obj <= limit, objective=point.objective, limit=limit, epsilon=float(epsilon))
