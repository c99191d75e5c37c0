"""Max-weight tree decompositions over a catalog of pieces, and the
truncated partition functions of rooted and unrooted trees they induce.

A decomposition of a tree assembles it edge by edge from pieces drawn from
the catalog's unrooted family u0: the first piece is a member of u0, and
each later step joins one more u0 piece by a single new edge.  Given a
weight vector z over u0, the weight of a decomposition is the product of
its piece weights, and the max weight of a tree is the largest weight over
all of its decompositions.  The max weight does not depend on any choice
of root, and it is supermultiplicative under removing an edge.

Partition functions:

    rooted_series(z, k)        sum of maxweight(T)/aut_r(T) over rooted trees, size <= k
    unrooted_series(z, k)      same over unrooted trees with aut_u
    piece_series_linear(z)     sum of z[U]/aut_u(U) over u0
    piece_series_weighted(z)   sum of maxweight(U)/aut_u(U) over u0

All sums are exact when the weight vector holds Fractions; float vectors
are accepted for approximate work and flagged by WeightVector.exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import treekit
from .treekit import (
    Catalog,
    CatalogError,
    RootedTreeCode,
    UnrootedTreeCode,
    SINGLE_VERTEX_CODE,
    code_to_adjacency,
)

__all__ = [
    "WeightVector",
    "DecompositionStep",
    "DecompositionTrace",
    "MaxWeightTable",
    "max_weight",
    "enumerate_decompositions",
    "replay_trace",
    "rooted_series",
    "rooted_series_term",
    "rooted_series_family",
    "unrooted_series",
    "series_report",
    "piece_series_linear",
    "piece_series_weighted",
    "scale_weights",
    "closure",
    "verify_dissymmetry_trunc",
    "verify_supermultiplicativity",
    "single_variable_series",
    "single_variable_series_unrooted",
    "TruncatedSeriesEvaluator",
]


@dataclass(frozen=True)
class WeightVector:
    """Non-negative weights over a catalog's u0, in (size, code) order.

    entries is a tuple of (code, value) pairs; values are Fractions/ints in
    exact mode or floats in approximate mode (see `exact`).
    """

    entries: tuple

    def __post_init__(self):
        for code, value in self.entries:
            if value < 0:
                raise ValueError(f"negative weight {value} for {code}")

    @classmethod
    def over(cls, catalog: Catalog, mapping) -> "WeightVector":
        """Build a vector over catalog.u0; mapping may omit codes (taken
        as 0) but must not mention codes outside u0."""
        extra = set(mapping) - set(catalog.u0_index)
        if extra:
            raise ValueError(f"weights given for codes outside u0: {sorted(extra)}")
        return cls(tuple((u.code, mapping.get(u.code, 0)) for u in catalog.u0))

    @classmethod
    def zero(cls, catalog: Catalog) -> "WeightVector":
        return cls.over(catalog, {})

    def __getitem__(self, code: str):
        for c, v in self.entries:
            if c == code:
                return v
        raise KeyError(code)

    def get(self, code: str, default=0):
        for c, v in self.entries:
            if c == code:
                return v
        return default

    @property
    def codes(self):
        return tuple(c for c, _ in self.entries)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for _, v in self.entries)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def to_floats(self) -> np.ndarray:
        return np.array([float(v) for _, v in self.entries])


@dataclass(frozen=True)
class DecompositionStep:
    """One piece of a decomposition.  attach_from indexes the canonical
    representative of the partial tree built so far, attach_to the
    canonical representative of the piece; both are None on the first
    step."""

    piece: str
    attach_from: int | None
    attach_to: int | None


@dataclass(frozen=True)
class DecompositionTrace:
    steps: tuple[DecompositionStep, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    def piece_counts(self) -> dict:
        out: dict[str, int] = {}
        for s in self.steps:
            out[s.piece] = out.get(s.piece, 0) + 1
        return out

    def weight(self, z: WeightVector):
        total = Fraction(1) if z.exact else 1.0
        for s in self.steps:
            total = total * z[s.piece]
        return total


def replay_trace(trace: DecompositionTrace) -> UnrootedTreeCode:
    """Rebuild the decomposed tree by applying the steps with treekit.attach,
    re-canonicalizing the partial tree after each step."""
    if not trace.steps:
        raise ValueError("cannot replay an empty trace")
    cur = trace.steps[0].piece
    for step in trace.steps[1:]:
        base_adj = code_to_adjacency(cur)
        base = treekit._rooted_from_adj(base_adj, 0)
        piece = treekit._unrooted_from_adj(code_to_adjacency(step.piece))
        grown = treekit.attach(base, step.attach_from, piece, step.attach_to)
        cur = treekit._unrooted_from_adj(code_to_adjacency(grown.code)).code
    return treekit._unrooted_from_adj(code_to_adjacency(cur))


# ---------------------------------------------------------------------------
# single-edge removal structure, cached per unrooted code

# Oriented move: removing one edge of W leaves (piece, remainder); the move
# records canonical codes, canonical attachment indices, and the marked
# codes used for deduplication of equivalent edges.
_MOVES: dict[str, tuple] = {}

# Code-only variant without attachment bookkeeping: enough for computing
# values (a move's value depends only on the two codes), much cheaper to
# build, and used by the DP and the vectorized evaluator.
_MOVES_FAST: dict[str, tuple] = {}


def _unrooted_with_index(adj, vertex):
    """Canonical unrooted code of adj, plus the canonical index of the
    orbit representative of `vertex` and its marked code."""
    u = treekit._unrooted_from_adj(adj)
    marked = treekit._unrooted_marked_code(adj, vertex)
    rep = code_to_adjacency(u.code)
    for i in range(len(rep)):
        if treekit._unrooted_marked_code(rep, i) == marked:
            return u, i, marked
    raise AssertionError(f"orbit representative not found for {u.code}")


def _moves(code: str):
    """Deduplicated oriented single-edge removals of the unrooted tree
    `code`: tuples (piece_code, piece_idx, rem_code, rem_idx, piece_size).

    Two edges inducing isomorphic (piece, remainder) pairs with matching
    attachment orbits yield one move.
    """
    cached = _MOVES.get(code)
    if cached is not None:
        return cached
    adj = code_to_adjacency(code)
    _, parent = treekit._dfs_order(adj, 0)
    oriented: dict[tuple, tuple] = {}
    for v in range(1, len(adj)):
        below = treekit._component_vertices(adj, v, blocked=parent[v])
        rest = set(range(len(adj))) - below
        sub_a, old_a = treekit._sub_adjacency(adj, below)
        sub_b, old_b = treekit._sub_adjacency(adj, rest)
        ua, ia, ma = _unrooted_with_index(sub_a, old_a.index(v))
        ub, ib, mb = _unrooted_with_index(sub_b, old_b.index(parent[v]))
        for (pc, pi, pm, rc, ri, rm, ps) in (
            (ua.code, ia, ma, ub.code, ib, mb, ua.size),
            (ub.code, ib, mb, ua.code, ia, ma, ub.size),
        ):
            oriented.setdefault((pm, rm), (pc, pi, rc, ri, ps))
    result = tuple(oriented[k] for k in sorted(oriented))
    _MOVES[code] = result
    return result


def _moves_fast(code: str):
    """Oriented single-edge removals as (piece_code, rest_code) pairs,
    deduplicated by the pair alone."""
    cached = _MOVES_FAST.get(code)
    if cached is not None:
        return cached
    adj = code_to_adjacency(code)
    _, parent = treekit._dfs_order(adj, 0)
    pairs = set()
    for v in range(1, len(adj)):
        below = treekit._component_vertices(adj, v, blocked=parent[v])
        rest = set(range(len(adj))) - below
        sub_a, _ = treekit._sub_adjacency(adj, below)
        sub_b, _ = treekit._sub_adjacency(adj, rest)
        ca = treekit._unrooted_from_adj(sub_a).code
        cb = treekit._unrooted_from_adj(sub_b).code
        pairs.add((ca, cb))
        pairs.add((cb, ca))
    result = tuple(sorted(pairs))
    _MOVES_FAST[code] = result
    return result


# rooted code -> unrooted code of the same tree
_UNROOTED_OF_ROOTED: dict[str, str] = {}


def _unrooted_code_of(rooted_code: str) -> str:
    cached = _UNROOTED_OF_ROOTED.get(rooted_code)
    if cached is None:
        cached = treekit._unrooted_from_adj(code_to_adjacency(rooted_code)).code
        _UNROOTED_OF_ROOTED[rooted_code] = cached
    return cached


class MaxWeightTable:
    """Memoized max decomposition weights for one weight vector.

    value(W) follows the removal recursion

        value(W) = max({z[W] if W in u0}
                       union {z[piece] * value(rest) over moves with piece in u0})

    Entries are pure functions of (catalog, z, code): repeated inserts are
    idempotent, so sharing a table between threads is safe.
    """

    def __init__(self, catalog: Catalog, z: WeightVector):
        if tuple(z.codes) != tuple(u.code for u in catalog.u0):
            raise CatalogError("weight vector domain does not match catalog u0")
        self.catalog = catalog
        self.z = z
        self._zero = Fraction(0) if z.exact else 0.0
        self._value: dict[str, object] = {}
        self._best: dict[str, tuple] = {}  # code -> (kind, payload) of argmax

    def value(self, code: str):
        cached = self._value.get(code)
        if cached is not None:
            return cached
        best = self._zero
        best_move = None
        if code in self.catalog.u0_index:
            zv = self.z[code]
            if zv > best:
                best = zv
                best_move = ("base",)
        for piece, rest in _moves_fast(code):
            if piece not in self.catalog.u0_index:
                continue
            zp = self.z[piece]
            cand = zp * self.value(rest)
            if cand > best:
                best = cand
                best_move = ("step", piece, rest)
        self._value[code] = best
        self._best[code] = best_move
        return best

    def trace(self, code: str) -> DecompositionTrace:
        """A decomposition attaining value(code); empty when the value is 0."""
        self.value(code)
        steps = []
        cur = code
        while True:
            move = self._best[cur]
            if move is None:
                return DecompositionTrace(steps=())
            if move[0] == "base":
                steps.append(DecompositionStep(piece=cur, attach_from=None, attach_to=None))
                break
            _, piece, rest = move
            p_idx, r_idx = self._attachment(cur, piece, rest)
            steps.append(DecompositionStep(piece=piece, attach_from=r_idx, attach_to=p_idx))
            cur = rest
        return DecompositionTrace(steps=tuple(reversed(steps)))

    @staticmethod
    def _attachment(code: str, piece: str, rest: str):
        """Canonical attachment indices of one edge realizing the
        (piece, rest) split of `code`."""
        for p, p_idx, r, r_idx, _ in _moves(code):
            if p == piece and r == rest:
                return p_idx, r_idx
        raise AssertionError(f"no edge of {code} splits into ({piece}, {rest})")


def _as_unrooted_code(t) -> str:
    if isinstance(t, UnrootedTreeCode):
        return t.code
    if isinstance(t, RootedTreeCode):
        return _unrooted_code_of(t.code)
    if isinstance(t, str):
        return _unrooted_code_of(t)
    raise TypeError(f"expected a tree code, got {type(t).__name__}")


def max_weight(t, z: WeightVector, catalog: Catalog):
    """Max decomposition weight of `t` (rooted or unrooted code) and a
    certifying trace; (0, empty trace) when every decomposition vanishes."""
    table = MaxWeightTable(catalog, z)
    code = _as_unrooted_code(t)
    return table.value(code), table.trace(code)


def enumerate_decompositions(t, catalog: Catalog, max_size: int = 8):
    """Every decomposition of `t` over catalog.u0, as traces, by exhaustive
    reverse search over piece removals.  Brute-force oracle for the
    recursion used by MaxWeightTable; keep inputs at 8 vertices or fewer.
    """
    code = _as_unrooted_code(t)
    size = code.count("(")
    if size > max_size:
        raise treekit.CapacityError(f"tree of size {size} exceeds oracle bound {max_size}")
    memo: dict[str, tuple] = {}

    def search(w: str):
        cached = memo.get(w)
        if cached is not None:
            return cached
        found = []
        if w in catalog.u0_index:
            found.append((DecompositionStep(piece=w, attach_from=None, attach_to=None),))
        for piece, p_idx, rest, r_idx, _ in _moves(w):
            if piece not in catalog.u0_index:
                continue
            step = DecompositionStep(piece=piece, attach_from=r_idx, attach_to=p_idx)
            for prefix in search(rest):
                found.append(prefix + (step,))
        memo[w] = tuple(found)
        return memo[w]

    return tuple(DecompositionTrace(steps=s) for s in search(code))


# ---------------------------------------------------------------------------
# partition functions


def rooted_series(z: WeightVector, k: int, catalog: Catalog):
    """Sum of maxweight(T)/aut_r(T) over all rooted trees with at most k
    vertices."""
    if k < 1:
        raise ValueError("truncation order must be >= 1")
    table = MaxWeightTable(catalog, z)
    total = Fraction(0) if z.exact else 0.0
    for t in treekit.enumerate_rooted(k):
        total += table.value(_unrooted_code_of(t.code)) / t.aut_r
    return total


def rooted_series_term(z: WeightVector, k: int, catalog: Catalog):
    """Contribution of trees with exactly k vertices to rooted_series."""
    table = MaxWeightTable(catalog, z)
    total = Fraction(0) if z.exact else 0.0
    for t in treekit.enumerate_rooted(k):
        if t.size == k:
            total += table.value(_unrooted_code_of(t.code)) / t.aut_r
    return total


def rooted_series_family(z: WeightVector, family, catalog: Catalog):
    """Sum of maxweight(T)/aut_r(T) over an explicit, inclusion-closed
    family of rooted trees."""
    family = tuple(family)
    treekit.check_inclusion_closed(family)
    table = MaxWeightTable(catalog, z)
    total = Fraction(0) if z.exact else 0.0
    for t in family:
        total += table.value(_unrooted_code_of(t.code)) / t.aut_r
    return total


def unrooted_series(z: WeightVector, k: int, catalog: Catalog):
    """Sum of maxweight(U)/aut_u(U) over unrooted trees with at most k
    vertices.

    Also computed in the rooted form sum maxweight(T)/(|T| aut_r(T)); the
    two must agree (exactly in exact mode), otherwise the canonicalization
    or automorphism counts are broken.
    """
    if k < 1:
        raise ValueError("truncation order must be >= 1")
    table = MaxWeightTable(catalog, z)
    total_u = Fraction(0) if z.exact else 0.0
    for u in treekit.enumerate_unrooted(k):
        total_u += table.value(u.code) / u.aut_u
    total_r = Fraction(0) if z.exact else 0.0
    for t in treekit.enumerate_rooted(k):
        total_r += table.value(_unrooted_code_of(t.code)) / (t.size * t.aut_r)
    if z.exact:
        if total_u != total_r:
            raise RuntimeError(
                f"unrooted/rooted forms disagree: {total_u} vs {total_r}"
            )
    elif abs(total_u - total_r) > 1e-9 * (1.0 + abs(total_u)):
        raise RuntimeError(f"unrooted/rooted forms disagree: {total_u} vs {total_r}")
    return total_u


def series_report(z: WeightVector, k: int, catalog: Catalog) -> dict:
    """Partition-function evaluation with per-size contributions, suitable
    for serialization."""
    table = MaxWeightTable(catalog, z)
    zero = Fraction(0) if z.exact else 0.0
    per_size = {s: zero for s in range(1, k + 1)}
    for t in treekit.enumerate_rooted(k):
        per_size[t.size] += table.value(_unrooted_code_of(t.code)) / t.aut_r
    return {
        "k": k,
        "exact": z.exact,
        "weights": z.as_dict(),
        "per_size": per_size,
        "rooted_total": sum(per_size.values(), zero),
        "unrooted_total": unrooted_series(z, k, catalog),
        "linear_piece_total": piece_series_linear(z, catalog),
    }


def piece_series_linear(z: WeightVector, catalog: Catalog):
    """Sum of z[U]/aut_u(U) over u0 (the linear objective)."""
    total = Fraction(0) if z.exact else 0.0
    for u in catalog.u0:
        total += Fraction(z[u.code], u.aut_u) if z.exact else z[u.code] / u.aut_u
    return total


def piece_series_weighted(z: WeightVector, catalog: Catalog):
    """Sum of maxweight(U)/aut_u(U) over u0; always >= piece_series_linear."""
    table = MaxWeightTable(catalog, z)
    total = Fraction(0) if z.exact else 0.0
    for u in catalog.u0:
        v = table.value(u.code)
        total += Fraction(v, u.aut_u) if z.exact else v / u.aut_u
    return total


def scale_weights(lam, z: WeightVector) -> WeightVector:
    """Scaled multiplication: each coordinate is multiplied by
    lam**(piece size), under which maxweight(T) scales by lam**|T|."""
    if lam < 0:
        raise ValueError("scale factor must be >= 0")
    return WeightVector(
        tuple((code, lam ** code.count("(") * value) for code, value in z.entries)
    )


def closure(z: WeightVector, catalog: Catalog) -> WeightVector:
    """Pointwise replacement of each coordinate by the max weight of its
    piece.  Leaves every max weight (hence every partition function)
    unchanged, never decreases any coordinate, and is idempotent."""
    table = MaxWeightTable(catalog, z)
    return WeightVector(tuple((code, table.value(code)) for code, _ in z.entries))


# ---------------------------------------------------------------------------
# inequality checks


@dataclass(frozen=True)
class DissymmetryCheck:
    ok: bool
    k: int
    rooted: object
    unrooted: object
    half_square: object


def verify_dissymmetry_trunc(z: WeightVector, k: int, catalog: Catalog) -> DissymmetryCheck:
    """Check rooted_series(z,k) - unrooted_series(z,k) >=
    (1/2) * rooted_series(z, floor(k/2))**2.

    The difference of the two series is the partition function of trees
    with one marked edge; pairing each marked edge with the ordered pair of
    components it separates and using supermultiplicativity gives the
    bound, restricted here to sizes <= k.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    y = rooted_series(z, k, catalog)
    yu = unrooted_series(z, k, catalog)
    yh = rooted_series(z, k // 2, catalog)
    half_sq = yh * yh / 2
    return DissymmetryCheck(ok=(y - yu) >= half_sq, k=k, rooted=y, unrooted=yu, half_square=half_sq)


@dataclass(frozen=True)
class SupermultCheck:
    ok: bool
    code: str
    failures: tuple


def verify_supermultiplicativity(u, z: WeightVector, catalog: Catalog) -> SupermultCheck:
    """For every edge of `u`, removing the edge leaves two trees whose max
    weights multiply to at most the max weight of `u`."""
    code = _as_unrooted_code(u)
    if code.count("(") < 2:
        raise ValueError("need a tree with at least one edge")
    table = MaxWeightTable(catalog, z)
    whole = table.value(code)
    failures = []
    for piece, rest in _moves_fast(code):
        parts = table.value(piece) * table.value(rest)
        if whole < parts:
            failures.append({"piece": piece, "rest": rest, "whole": whole, "parts": parts})
    return SupermultCheck(ok=not failures, code=code, failures=tuple(failures))


# ---------------------------------------------------------------------------
# single-variable closed forms (u0 = {single vertex})


def _rooted_coefficient(n: int) -> Fraction:
    """n^(n-1)/n!, the rooted labeled tree count over n!."""
    from math import factorial

    return Fraction(n ** (n - 1), factorial(n))


def _unrooted_coefficient(n: int) -> Fraction:
    from math import factorial

    return Fraction(1 if n == 1 else n ** (n - 2), factorial(n))


def single_variable_series(x, k: int):
    """rooted_series for u0 = {single vertex} at z = x, in closed form:
    sum over n <= k of n^(n-1) x^n / n!."""
    if isinstance(x, (int, Fraction)):
        return sum((_rooted_coefficient(n) * Fraction(x) ** n for n in range(1, k + 1)), Fraction(0))
    return float(sum(float(_rooted_coefficient(n)) * x**n for n in range(1, k + 1)))


def single_variable_series_unrooted(x, k: int):
    """unrooted_series for u0 = {single vertex}: sum of n^(n-2) x^n / n!."""
    if isinstance(x, (int, Fraction)):
        return sum((_unrooted_coefficient(n) * Fraction(x) ** n for n in range(1, k + 1)), Fraction(0))
    return float(sum(float(_unrooted_coefficient(n)) * x**n for n in range(1, k + 1)))


# ---------------------------------------------------------------------------
# vectorized float evaluation (optimizer inner loop)


class TruncatedSeriesEvaluator:
    """Float evaluation of max weights and size-layered rooted sums for all
    trees up to k vertices, vectorized over the removal moves.

    evaluate(zvec) returns (om, y) where om[i] is the max weight of the
    i-th unrooted tree and y[s] the contribution of size-s rooted trees to
    rooted_series.  zvec is ordered like catalog.u0.
    """

    def __init__(self, catalog: Catalog, k: int):
        self.catalog = catalog
        self.k = k
        trees = treekit.enumerate_unrooted(k)
        self.codes = [u.code for u in trees]
        index = {c: i for i, c in enumerate(self.codes)}
        self.sizes = np.array([u.size for u in trees], dtype=np.int64)
        self.u0_positions = np.array(
            [index[u.code] for u in catalog.u0 if u.size <= k], dtype=np.int64
        )
        self.u0_zslots = np.array(
            [j for j, u in enumerate(catalog.u0) if u.size <= k], dtype=np.int64
        )
        # rooted multiplicity: coeff[i] = sum of 1/aut_r over rooted trees
        # whose unrooted class is tree i
        coeff = [Fraction(0)] * len(trees)
        for t in treekit.enumerate_rooted(k):
            coeff[index[_unrooted_code_of(t.code)]] += Fraction(1, t.aut_r)
        self.rooted_coeff = np.array([float(c) for c in coeff])
        self.aut_u = np.array([float(u.aut_u) for u in trees])
        # flat move arrays grouped by tree size (pieces are strictly
        # smaller, so a single ascending pass is enough)
        by_size: dict[int, list] = {}
        for i, code in enumerate(self.codes):
            for piece, rest in _moves_fast(code):
                slot = catalog.u0_index.get(piece)
                if slot is None:
                    continue
                by_size.setdefault(int(self.sizes[i]), []).append((i, slot, index[rest]))
        self.passes = []
        for s in sorted(by_size):
            rows = by_size[s]
            self.passes.append(
                (
                    np.array([r[0] for r in rows], dtype=np.int64),
                    np.array([r[1] for r in rows], dtype=np.int64),
                    np.array([r[2] for r in rows], dtype=np.int64),
                )
            )

    def evaluate(self, zvec: np.ndarray):
        om = np.zeros(len(self.codes))
        om[self.u0_positions] = zvec[self.u0_zslots]
        for tree_idx, z_idx, rest_idx in self.passes:
            np.maximum.at(om, tree_idx, zvec[z_idx] * om[rest_idx])
        y = np.zeros(self.k + 1)
        np.add.at(y, self.sizes, self.rooted_coeff * om)
        return om, y

    def objective(self, zvec: np.ndarray) -> float:
        """piece_series_linear for a float vector."""
        return float(
            sum(zvec[j] / u.aut_u for j, u in enumerate(self.catalog.u0))
        )
