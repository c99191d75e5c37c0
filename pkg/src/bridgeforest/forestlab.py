"""Labeled forests and bridge-addable classes at desk scale: exact
component-count statistics, uniform random sampling, pendant-tree
statistics, and exhaustive verification of the counting inequalities that
relate connected and two-component members of a class.

Conventions, applied literally everywhere:

* the pendant side of an edge of a tree is the smaller component left by
  removing the edge, with ties going to the component containing the
  smallest vertex of the tree;
* the reference component of a forest (the one whose pendant statistics
  the forest inherits) is the largest component, ties to the one
  containing the smallest vertex among the largest;
* the distinguished small component of a two-component forest is the
  smallest one, ties to the one containing vertex 1.

Statistics vectors ("alpha" vectors) are tuples of pendant-copy counts in
the coordinate order of the catalog's rooted family t0.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, log

import numpy as np

from . import treekit, weights
from .treekit import (
    CapacityError,
    Catalog,
    RootedTreeCode,
    UnrootedTreeCode,
)
from .weights import WeightVector

__all__ = [
    "LabeledForest",
    "ForestClass",
    "ForestCountTable",
    "PendantStats",
    "Box",
    "ClassHistogram",
    "BridgeAddabilityViolation",
    "enumerate_forests",
    "forest_count",
    "forest_total",
    "labeled_tree_count",
    "connectivity_prob",
    "two_component_ratio",
    "sample_forest",
    "sample_component_sizes",
    "pendant_tree",
    "pendant_stats",
    "all_forests",
    "is_bridge_addable",
    "bridge_addable_closure",
    "random_closure",
    "class_histogram",
    "ratio_weights",
    "verify_simple_counting",
    "verify_local_double_counting",
    "verify_weight_sum_bound",
    "boxing_search",
    "load_class",
    "save_class",
    "write_connectivity_sweep",
    "write_ratio_sweep",
]

# Exhaustive forest enumeration stops here; beyond it the lemma checks are
# out of desk range anyway.
DEFAULT_EXHAUSTIVE_N = 8
EXACT_PROB_MAX_N = 600
LOGFLOAT_MAX_N = 100_000


class BridgeAddabilityViolation(ValueError):
    """A two-component count is positive while the matching connected
    count is zero, which cannot happen for a bridge-addable class."""


# ---------------------------------------------------------------------------
# forests


@dataclass(frozen=True)
class LabeledForest:
    """A forest on vertices 1..n; edges are (u, v) pairs with u < v."""

    n: int
    edges: frozenset

    def __post_init__(self):
        parent = list(range(self.n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            if not (isinstance(u, int) and isinstance(v, int) and 1 <= u < v <= self.n):
                raise ValueError(f"bad edge {(u, v)} for n={self.n}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise ValueError(f"edges contain a cycle through {(u, v)}")
            parent[ru] = rv

    @classmethod
    def make(cls, n: int, edges) -> "LabeledForest":
        norm = frozenset((u, v) if u < v else (v, u) for u, v in edges)
        return cls(n=n, edges=norm)

    def components(self):
        """Vertex sets of the components, ordered by (size desc, min label)."""
        parent = {v: v for v in range(1, self.n + 1)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        groups: dict[int, list] = {}
        for v in range(1, self.n + 1):
            groups.setdefault(find(v), []).append(v)
        comps = [frozenset(g) for g in groups.values()]
        comps.sort(key=lambda c: (-len(c), min(c)))
        return tuple(comps)

    @property
    def component_count(self) -> int:
        return self.n - len(self.edges)

    @property
    def is_connected(self) -> bool:
        return self.component_count == 1

    def largest_component(self):
        """Largest component; ties to the one with the smallest vertex."""
        return self.components()[0]

    def smallest_component(self):
        """Smallest component; among equal-size candidates, the one
        containing vertex 1 if present, else the one with the smallest
        vertex."""
        comps = self.components()
        small = min(len(c) for c in comps)
        candidates = [c for c in comps if len(c) == small]
        for c in candidates:
            if 1 in c:
                return c
        return min(candidates, key=min)

    def component_edges(self, comp):
        return [e for e in self.edges if e[0] in comp]

    def sort_key(self):
        return tuple(sorted(self.edges))


def enumerate_forests(n: int, max_n: int = DEFAULT_EXHAUSTIVE_N):
    """Every labeled forest on vertices 1..n, exactly once."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_n:
        raise CapacityError(f"exhaustive enumeration capped at n={max_n}")
    all_edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    out = []
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def rec(i, chosen):
        if i == len(all_edges):
            out.append(LabeledForest(n=n, edges=frozenset(chosen)))
            return
        rec(i + 1, chosen)
        u, v = all_edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v))
            rec(i + 1, chosen)
            chosen.pop()
            parent[ru] = ru

    rec(0, [])
    return out


# ---------------------------------------------------------------------------
# exact counts


def labeled_tree_count(n: int) -> int:
    return 1 if n == 1 else n ** (n - 2)


_COUNT: dict[tuple, int] = {(0, 0): 1}
_TOTAL: dict[int, int] = {0: 1}


class ForestCountTable:
    """Exact forest counts warmed up to a fixed n.

    count(n', k) and total(n') answer for any n' <= n and refuse larger
    arguments, so a table passed around explicitly documents how much has
    been precomputed (the sampler needs totals for every size below its
    n).
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        forest_total(n)
        for k in range(1, n + 1):
            _forest_count(n, k)

    def count(self, n: int, k: int) -> int:
        if n > self.n:
            raise ValueError(f"table only covers n <= {self.n}")
        return forest_count(n, k)

    def total(self, n: int) -> int:
        if n > self.n:
            raise ValueError(f"table only covers n <= {self.n}")
        return forest_total(n)


def forest_count(n: int, k: int) -> int:
    """Number of labeled forests on n vertices with exactly k components.

    Recurrence on the component containing vertex 1: if it has m vertices
    there are C(n-1, m-1) ways to pick its companions, m^(m-2) trees on it,
    and forest_count(n-m, k-1) ways to finish.
    """
    if n < 1 or not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    return _forest_count(n, k)


def _forest_count(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    if n == 0:
        return 1 if k == 0 else 0
    key = (n, k)
    cached = _COUNT.get(key)
    if cached is None:
        cached = sum(
            comb(n - 1, m - 1) * labeled_tree_count(m) * _forest_count(n - m, k - 1)
            for m in range(1, n - k + 2)
        )
        _COUNT[key] = cached
    return cached


def forest_total(n: int) -> int:
    """Number of labeled forests on n vertices (any component count)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n not in _TOTAL:
        for j in range(1, n + 1):
            if j not in _TOTAL:
                _TOTAL[j] = sum(
                    comb(j - 1, m - 1) * labeled_tree_count(m) * _TOTAL[j - m]
                    for m in range(1, j + 1)
                )
    return _TOTAL[n]


_LOG_TOTAL: list = [0.0]


def _log_forest_total(n: int) -> float:
    """log of forest_total(n) in float arithmetic (log-sum-exp recurrence;
    relative error well below 1e-9 per term at supported sizes)."""
    if n < len(_LOG_TOTAL):
        return _LOG_TOTAL[n]
    have = len(_LOG_TOTAL) - 1
    logfact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n + 1)))))
    m_all = np.arange(0, n + 1)
    lt = np.zeros(n + 1)
    lt[2:] = (m_all[2:] - 2) * np.log(m_all[2:])
    lf = np.empty(n + 1)
    lf[: have + 1] = _LOG_TOTAL
    for j in range(have + 1, n + 1):
        m = m_all[1 : j + 1]
        terms = logfact[j - 1] - logfact[m - 1] - logfact[j - m] + lt[m] + lf[j - m]
        mx = terms.max()
        lf[j] = mx + log(np.exp(terms - mx).sum())
    _LOG_TOTAL[:] = list(lf)
    return _LOG_TOTAL[n]


def connectivity_prob(n: int, mode: str = "exact"):
    """Probability that a uniform random forest on n vertices is connected.

    exact mode returns a Fraction; logfloat mode returns a float computed
    entirely in log space (the recurrence is quadratic in n, so large n
    takes a while but stays accurate).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode == "exact":
        if n > EXACT_PROB_MAX_N:
            raise CapacityError(f"exact mode capped at n={EXACT_PROB_MAX_N}")
        return Fraction(labeled_tree_count(n), forest_total(n))
    if mode == "logfloat":
        if n > LOGFLOAT_MAX_N:
            raise CapacityError(f"logfloat mode capped at n={LOGFLOAT_MAX_N}")
        if n == 1:
            return 1.0
        value = np.exp((n - 2) * log(n) - _log_forest_total(n))
        if not np.isfinite(value):
            raise RuntimeError(f"logfloat connectivity overflowed at n={n}")
        return float(value)
    raise ValueError(f"unknown mode {mode!r}")


def two_component_ratio(n: int) -> Fraction:
    """forest_count(n, 2) / labeled_tree_count(n), exact."""
    if n < 2:
        raise ValueError("need n >= 2")
    return Fraction(forest_count(n, 2), labeled_tree_count(n))


# ---------------------------------------------------------------------------
# uniform sampling (recursive method on the counting recurrence)

_CUMWEIGHTS: dict[int, list] = {}


def _anchor_cumweights(s: int):
    """Cumulative weights of the size m of the component containing the
    smallest remaining vertex, for a uniform forest on s vertices."""
    cached = _CUMWEIGHTS.get(s)
    if cached is None:
        cum = []
        acc = 0
        for m in range(1, s + 1):
            acc += comb(s - 1, m - 1) * labeled_tree_count(m) * forest_total(s - m)
            cum.append(acc)
        assert acc == forest_total(s)
        cached = cum
        _CUMWEIGHTS[s] = cached
    return cached


def _draw_anchor_size(s: int, rng: random.Random) -> int:
    cum = _anchor_cumweights(s)
    return bisect.bisect_right(cum, rng.randrange(cum[-1])) + 1


def sample_component_sizes(n: int, rng=None, seed=None):
    """Component sizes of a uniform random forest on 1..n, in peel order
    (component of the smallest remaining vertex first).

    This is the first stage of sample_forest: the component structure is
    drawn exactly from the uniform-forest distribution before any tree
    shapes or labels are placed, so statistics that depend only on it (for
    instance connectivity, which holds iff the result is [n]) can be
    sampled without building the forests.
    """
    if rng is None:
        rng = random.Random(seed)
    sizes = []
    s = n
    while s:
        m = _draw_anchor_size(s, rng)
        sizes.append(m)
        s -= m
    return sizes


def _prufer_to_edges(seq, m: int):
    degree = [1] * m
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(m) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def _random_labeled_tree(verts, rng: random.Random):
    m = len(verts)
    if m == 1:
        return []
    if m == 2:
        return [(verts[0], verts[1])]
    seq = [rng.randrange(m) for _ in range(m - 2)]
    return [(verts[a], verts[b]) for a, b in _prufer_to_edges(seq, m)]


def sample_forest(n: int, rng=None, seed=None, table: ForestCountTable | None = None) -> LabeledForest:
    """Exactly uniform random labeled forest on 1..n; deterministic for a
    given seed.

    Draws the component of the smallest remaining vertex (size, then
    companion set, then a uniform labeled tree via a random linear-sequence
    code) and recurses on the rest; every choice is made with exact integer
    weights, so the output distribution is exactly uniform.  When a count
    table is supplied it must cover n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if table is not None and table.n < n:
        raise ValueError(f"count table covers n <= {table.n}, need {n}")
    if rng is None:
        rng = random.Random(seed)
    remaining = list(range(1, n + 1))
    edges = []
    while remaining:
        s = len(remaining)
        m = _draw_anchor_size(s, rng)
        comp = [remaining[0]]
        if m > 1:
            comp.extend(rng.sample(remaining[1:], m - 1))
        comp.sort()
        edges.extend(_random_labeled_tree(comp, rng))
        chosen = set(comp)
        remaining = [v for v in remaining if v not in chosen]
    return LabeledForest.make(n, edges)


# ---------------------------------------------------------------------------
# pendant trees and statistics


def pendant_tree(g: LabeledForest, e) -> RootedTreeCode:
    """Pendant tree of edge e in the connected tree g: the smaller
    component of g - e (ties to the side containing the smallest vertex),
    rooted at its endpoint of e and canonicalized."""
    if not g.is_connected:
        raise ValueError("pendant_tree needs a connected tree")
    u, v = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
    if (u, v) not in g.edges:
        raise ValueError(f"edge {(u, v)} is not in the tree")
    verts = set(range(1, g.n + 1))
    side_code, root = _pendant_side(verts, g.edges, (u, v), min(verts))
    return treekit.canonicalize_rooted(side_code, root)


def _pendant_side(vertices, edges, cut, anchor):
    """Edge list and root of the pendant side of `cut` inside the tree on
    `vertices`; `anchor` is the tie-breaking vertex."""
    u, v = cut
    adj: dict[int, list] = {x: [] for x in vertices}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    side_u = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if (x, y) in ((u, v), (v, u)):
                continue
            if y not in side_u:
                side_u.add(y)
                stack.append(y)
    side_v = set(vertices) - side_u
    if len(side_u) < len(side_v):
        pend, root = side_u, u
    elif len(side_v) < len(side_u):
        pend, root = side_v, v
    else:
        pend, root = (side_u, u) if anchor in side_u else (side_v, v)
    return [e for e in edges if e[0] in pend and e[1] in pend], root


@dataclass(frozen=True)
class PendantStats:
    """Pendant-copy counts over the catalog's t0, in t0 order."""

    vector: tuple

    def counts(self, catalog: Catalog) -> dict:
        return {t.code: c for t, c in zip(catalog.t0, self.vector)}

    @property
    def total(self) -> int:
        return sum(self.vector)


# (marked component code, catalog key) -> alpha tuple.  The pendant profile
# of a tree depends only on its shape together with the location of its
# smallest vertex (which settles equal-split ties), which is exactly what
# the marked code captures.
_ALPHA_CACHE: dict[tuple, tuple] = {}


def _component_alpha(comp, edges, catalog: Catalog) -> tuple:
    anchor = min(comp)
    order = sorted(comp)
    index = {x: i for i, x in enumerate(order)}
    adj = [[] for _ in order]
    for a, b in edges:
        adj[index[a]].append(index[b])
        adj[index[b]].append(index[a])
    marked = treekit._unrooted_marked_code(adj, index[anchor])
    key = (marked, catalog.key)
    cached = _ALPHA_CACHE.get(key)
    if cached is not None:
        return cached
    counts = [0] * len(catalog.t0)
    for cut in edges:
        side_edges, root = _pendant_side(comp, edges, cut, anchor)
        code = treekit.canonicalize_rooted(side_edges, root)
        slot = catalog.t0_index.get(code.code)
        if slot is not None:
            counts[slot] += 1
    result = tuple(counts)
    _ALPHA_CACHE[key] = result
    return result


def pendant_stats(g: LabeledForest, catalog: Catalog) -> PendantStats:
    """Pendant-copy counts of the forest's reference (largest) component,
    restricted to the catalog's t0.  The coordinate sum never exceeds n-1.
    """
    comp = g.largest_component()
    edges = g.component_edges(comp)
    vec = _component_alpha(comp, edges, catalog)
    assert sum(vec) <= g.n - 1
    return PendantStats(vector=vec)


# ---------------------------------------------------------------------------
# classes


class ForestClass:
    """An explicit set of labeled forests on a common vertex count."""

    def __init__(self, n: int, members, provenance: str = "explicit"):
        self.n = n
        self.members = frozenset(members)
        self.provenance = provenance
        for f in self.members:
            if f.n != n:
                raise ValueError(f"member with n={f.n} in class with n={n}")
        self._bridge_addable = None
        self._hists: dict = {}

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, f):
        return f in self.members

    def sorted_members(self):
        return sorted(self.members, key=LabeledForest.sort_key)

    def histogram(self, catalog: Catalog) -> "ClassHistogram":
        hist = self._hists.get(catalog.key)
        if hist is None:
            hist = _build_histogram(self, catalog)
            self._hists[catalog.key] = hist
        return hist

    def __repr__(self):
        return f"ForestClass(n={self.n}, members={len(self.members)}, provenance={self.provenance!r})"


def all_forests(n: int, max_n: int = DEFAULT_EXHAUSTIVE_N) -> ForestClass:
    return ForestClass(n, enumerate_forests(n, max_n=max_n), provenance="all-forests")


@dataclass(frozen=True)
class BridgeAddableCheck:
    ok: bool
    witness_forest: LabeledForest | None
    witness_edge: tuple | None


def is_bridge_addable(c: ForestClass) -> BridgeAddableCheck:
    """True iff adding any edge between two components of a member lands in
    the class; otherwise a witness (member, missing edge) is returned."""
    for f in c.sorted_members():
        comps = f.components()
        if len(comps) == 1:
            continue
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                for u in sorted(comps[i]):
                    for v in sorted(comps[j]):
                        e = (u, v) if u < v else (v, u)
                        grown = LabeledForest(n=f.n, edges=f.edges | {e})
                        if grown not in c.members:
                            return BridgeAddableCheck(False, f, e)
    return BridgeAddableCheck(True, None, None)


def _class_is_bridge_addable(c: ForestClass) -> bool:
    if c._bridge_addable is None:
        c._bridge_addable = is_bridge_addable(c).ok
    return c._bridge_addable


def bridge_addable_closure(seeds) -> ForestClass:
    """Smallest bridge-addable class containing the seed forests."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed forest")
    n = seeds[0].n
    if any(f.n != n for f in seeds):
        raise ValueError("seed forests have mixed n")
    seen = set(seeds)
    queue = list(seeds)
    while queue:
        f = queue.pop()
        comps = f.components()
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                for u in comps[i]:
                    for v in comps[j]:
                        e = (u, v) if u < v else (v, u)
                        grown = LabeledForest(n=n, edges=f.edges | {e})
                        if grown not in seen:
                            seen.add(grown)
                            queue.append(grown)
    cls = ForestClass(n, seen, provenance="closure")
    cls._bridge_addable = True
    return cls


def random_closure(n: int, seed: int, num_seeds: int = 3) -> ForestClass:
    """Bridge-addable closure of a few random forests.

    Seeds are uniform forests with each edge then kept with probability
    1/2, which spreads the component counts (uniform forests alone are
    almost always near-trees and give tiny closures).
    """
    rng = random.Random(seed)
    seeds = []
    for _ in range(num_seeds):
        f = sample_forest(n, rng=rng)
        kept = [e for e in sorted(f.edges) if rng.random() < 0.5]
        seeds.append(LabeledForest.make(n, kept))
    cls = bridge_addable_closure(seeds)
    cls.provenance = f"random-closure(seed={seed}, num_seeds={num_seeds})"
    return cls


# ---------------------------------------------------------------------------
# histograms and boxes


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in statistics space: coordinates in
    [lower, lower + width), with a radius-q neighbourhood
    [lower - q, lower + width + q).  Half-open on the upper side."""

    lower: tuple
    width: int
    q: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if any(x < 0 for x in self.lower):
            raise ValueError("lower corner must be non-negative")

    def contains(self, alpha) -> bool:
        return all(l <= a < l + self.width for l, a in zip(self.lower, alpha))

    def contains_neighborhood(self, alpha) -> bool:
        return all(
            l - self.q <= a < l + self.width + self.q
            for l, a in zip(self.lower, alpha)
        )


@dataclass
class ClassHistogram:
    """Exact per-statistics tallies of a class under a catalog."""

    n: int
    size: int
    component_counts: dict
    a_alpha: dict  # alpha tuple -> count of connected members
    b_alpha: dict  # small-component code -> alpha tuple -> count
    b_totals: dict  # small-component code -> count

    def count_components(self, i: int) -> int:
        return self.component_counts.get(i, 0)

    def count_a(self, box: Box, enlarged: bool = False) -> int:
        inside = box.contains_neighborhood if enlarged else box.contains
        return sum(c for a, c in self.a_alpha.items() if inside(a))

    def count_b(self, ucode: str, box: Box) -> int:
        amap = self.b_alpha.get(ucode)
        if not amap:
            return 0
        return sum(c for a, c in amap.items() if box.contains(a))


# (n, catalog key) -> {edge frozenset -> (ncomp, alpha, small code or None)}
_PROFILE_CACHE: dict = {}


def _forest_profile(f: LabeledForest, catalog: Catalog, cache: dict):
    prof = cache.get(f.edges)
    if prof is not None:
        return prof
    comps = f.components()
    ncomp = len(comps)
    big = f.largest_component()
    alpha = _component_alpha(big, f.component_edges(big), catalog)
    ucode = None
    if ncomp == 2:
        small = f.smallest_component()
        ucode = treekit.canonicalize_unrooted(
            f.component_edges(small), vertices=small
        ).code
    prof = (ncomp, alpha, ucode)
    cache[f.edges] = prof
    return prof


def _build_histogram(c: ForestClass, catalog: Catalog) -> ClassHistogram:
    cache = _PROFILE_CACHE.setdefault((c.n, catalog.key), {})
    component_counts: dict[int, int] = {}
    a_alpha: dict[tuple, int] = {}
    b_alpha: dict[str, dict] = {}
    b_totals: dict[str, int] = {}
    for f in c.members:
        ncomp, alpha, ucode = _forest_profile(f, catalog, cache)
        component_counts[ncomp] = component_counts.get(ncomp, 0) + 1
        if ncomp == 1:
            a_alpha[alpha] = a_alpha.get(alpha, 0) + 1
        elif ncomp == 2:
            b_alpha.setdefault(ucode, {})
            b_alpha[ucode][alpha] = b_alpha[ucode].get(alpha, 0) + 1
            b_totals[ucode] = b_totals.get(ucode, 0) + 1
    return ClassHistogram(
        n=c.n,
        size=len(c.members),
        component_counts=component_counts,
        a_alpha=a_alpha,
        b_alpha=b_alpha,
        b_totals=b_totals,
    )


def class_histogram(c: ForestClass, catalog: Catalog) -> ClassHistogram:
    return c.histogram(catalog)


def _candidate_boxes(hist: ClassHistogram, catalog: Catalog, w: int, q: int):
    """Lower corners of every width-w box holding at least one
    two-component member with small component in u0.  All other boxes
    satisfy the counting inequalities vacuously (their two-component
    counts are zero)."""
    d = len(catalog.t0)
    lowers = set()
    for ucode, amap in hist.b_alpha.items():
        if ucode not in catalog.u0_index:
            continue
        for alpha in amap:
            for offs in itertools.product(range(w), repeat=d):
                lower = tuple(a - o for a, o in zip(alpha, offs))
                if all(x >= 0 for x in lower):
                    lowers.add(lower)
    return [Box(lower=l, width=w, q=q) for l in sorted(lowers)]


# ---------------------------------------------------------------------------
# class-derived weight vectors


def ratio_weights(c: ForestClass, catalog: Catalog, box: Box) -> WeightVector:
    """Weight vector of two-component/connected count ratios on a box:

        z[U] = aut_u(U) * B_box(U) / A_boxq * (1 - |U|/n)

    where B_box(U) counts two-component members with small component U and
    statistics in the box, and A_boxq counts connected members with
    statistics in the box's q-neighbourhood.  Coordinates with B_box(U)=0
    are 0 regardless of A_boxq.
    """
    hist = c.histogram(catalog)
    a_count = hist.count_a(box, enlarged=True)
    entries = {}
    for u in catalog.u0:
        b_count = hist.count_b(u.code, box)
        if b_count == 0:
            entries[u.code] = Fraction(0)
            continue
        if a_count == 0:
            raise BridgeAddabilityViolation(
                f"B^{u.code} is {b_count} on {box} but the connected count is 0"
            )
        entries[u.code] = (
            Fraction(u.aut_u * b_count, a_count) * Fraction(c.n - u.size, c.n)
        )
    return WeightVector.over(catalog, entries)


# ---------------------------------------------------------------------------
# verification reports


@dataclass
class SimpleCountingReport:
    ok: bool
    n: int
    comparisons: list  # (i, i*count(i+1), count(i))
    ratios: list  # count(i+1)/count(i) as Fraction, or None when count(i)=0


def verify_simple_counting(c: ForestClass) -> SimpleCountingReport:
    """Check i * |members with i+1 components| <= |members with i
    components| for every i, which double counting on edge deletion
    guarantees for bridge-addable classes."""
    if not _class_is_bridge_addable(c):
        raise ValueError("class is not bridge-addable")
    hist_counts: dict[int, int] = {}
    for f in c.members:
        k = f.component_count
        hist_counts[k] = hist_counts.get(k, 0) + 1
    ok = True
    comparisons = []
    ratios = []
    for i in range(1, c.n):
        lhs = i * hist_counts.get(i + 1, 0)
        rhs = hist_counts.get(i, 0)
        comparisons.append((i, lhs, rhs))
        ratios.append(
            Fraction(hist_counts.get(i + 1, 0), rhs) if rhs else None
        )
        if lhs > rhs:
            ok = False
    return SimpleCountingReport(ok=ok, n=c.n, comparisons=comparisons, ratios=ratios)


# Per-catalog split descriptors feeding the local double counting check.
_SPLIT_DESCRIPTORS: dict = {}


def _admissible_splits(catalog: Catalog):
    """Splits of t0 trees usable in the local counting inequality: regular
    splits need the root side in t0 and the pendant side in u0; the
    degenerate rows cover whole trees of t0 that belong to u0 as unrooted
    trees (the removed piece is the entire tree)."""
    cached = _SPLIT_DESCRIPTORS.get(catalog.key)
    if cached is not None:
        return cached
    rows = []
    for t in catalog.t0:
        if t.size >= 2:
            for s in treekit.splits(t):
                if (
                    s.t_minus.code in catalog.t0_index
                    and s.u_plus.code in catalog.u0_index
                ):
                    rows.append(
                        (
                            "split",
                            t.code,
                            s.t_minus.code,
                            s.u_plus.code,
                            s.m_edge,
                            s.m_vminus,
                            s.n_vplus,
                        )
                    )
        adj = treekit.code_to_adjacency(t.code)
        u = treekit._unrooted_from_adj(adj)
        if u.code in catalog.u0_index:
            root_key = treekit._unrooted_marked_code(adj, 0)
            n_root = sum(
                1
                for v in range(len(adj))
                if treekit._unrooted_marked_code(adj, v) == root_key
            )
            rows.append(("degenerate", t.code, None, u.code, 1, None, n_root))
    cached = tuple(rows)
    _SPLIT_DESCRIPTORS[catalog.key] = cached
    return cached


@dataclass
class LocalCountingReport:
    ok: bool
    n: int
    w: int
    q: int
    boxes_checked: int
    checks: int
    failures: list
    grid_size: int  # total number of grid boxes, checked ones included


def verify_local_double_counting(
    c: ForestClass,
    catalog: Catalog,
    w: int = 1,
    box: Box | None = None,
    split=None,
    q: int | None = None,
) -> LocalCountingReport:
    """Exact check of the box-local double counting inequality

        m_edge * (alpha[T] + w + q) * A_boxq
            >= n_vplus * m_vminus * alpha[T_minus] * B_box(U_plus)

    for every admissible split (plus its degenerate whole-tree form, where
    the right side is n_root * (n - |T|) * B_box(T)), with alpha the box's
    lower corner.  With box=None, sweeps every grid box that holds
    two-component mass; all remaining grid boxes have B_box = 0 and pass
    vacuously.  A `split` (EdgeSplit) restricts the check to that split.
    """
    if not _class_is_bridge_addable(c):
        raise ValueError("class is not bridge-addable")
    if q is None:
        q = catalog.q_star
    hist = c.histogram(catalog)
    boxes = [box] if box is not None else _candidate_boxes(hist, catalog, w, q)
    rows = _admissible_splits(catalog)
    if split is not None:
        rows = [
            r
            for r in rows
            if r[0] == "split"
            and r[1] == split.parent.code
            and r[2] == split.t_minus.code
            and r[3] == split.u_plus.code
        ]
        if not rows:
            raise ValueError("split is not admissible for this catalog")
    t0_at = catalog.t0_index
    failures = []
    checks = 0
    for bx in boxes:
        if bx.width != w:
            raise ValueError("box width disagrees with w")
        a_count = hist.count_a(bx, enlarged=True)
        b_counts = {
            u.code: hist.count_b(u.code, bx) for u in catalog.u0
        }
        alpha = bx.lower
        for row in rows:
            kind, parent_code, tminus_code, uplus_code = row[0], row[1], row[2], row[3]
            b_count = b_counts[uplus_code]
            checks += 1
            if kind == "split":
                m_edge, m_vminus, n_vplus = row[4], row[5], row[6]
                lhs = m_edge * (alpha[t0_at[parent_code]] + w + q) * a_count
                rhs = n_vplus * m_vminus * alpha[t0_at[tminus_code]] * b_count
            else:
                n_root = row[6]
                size_t = parent_code.count("(")
                lhs = (alpha[t0_at[parent_code]] + w + q) * a_count
                rhs = n_root * (c.n - size_t) * b_count
            if lhs < rhs:
                failures.append(
                    {
                        "box": bx,
                        "kind": kind,
                        "parent": parent_code,
                        "t_minus": tminus_code,
                        "u_plus": uplus_code,
                        "lhs": lhs,
                        "rhs": rhs,
                    }
                )
    return LocalCountingReport(
        ok=not failures,
        n=c.n,
        w=w,
        q=q,
        boxes_checked=len(boxes),
        checks=checks,
        failures=failures,
        grid_size=c.n ** len(catalog.t0),
    )


@dataclass
class SumBoundReport:
    ok: bool
    n: int
    w: int
    q: int
    bound_constant: int
    boxes_checked: int
    failures: list
    precondition_violations: list
    max_value: Fraction | None


def verify_weight_sum_bound(
    c: ForestClass,
    catalog: Catalog,
    w: int = 1,
    box: Box | None = None,
    q: int | None = None,
) -> SumBoundReport:
    """Check that the t0 partition function of the class's ratio weights
    stays below 1 + C/n with C = (w+q) * (2 t_max)^(t_max-1) * |t0|, on
    every box whose lower corner satisfies sum(alpha) <= n-1.

    Corners violating that constraint are reported separately (the bound
    is not claimed there).  Boxes without two-component mass have zero
    weights and pass trivially.
    """
    if not _class_is_bridge_addable(c):
        raise ValueError("class is not bridge-addable")
    if q is None:
        q = catalog.q_star
    hist = c.histogram(catalog)
    boxes = [box] if box is not None else _candidate_boxes(hist, catalog, w, q)
    t_max = catalog.t_max
    const = (w + q) * (2 * t_max) ** (t_max - 1) * len(catalog.t0)
    bound = 1 + Fraction(const, c.n)
    failures = []
    precondition_violations = []
    max_value = None
    for bx in boxes:
        if sum(bx.lower) > c.n - 1:
            precondition_violations.append(bx)
            continue
        z = ratio_weights(c, catalog, bx)
        y = weights.rooted_series_family(z, catalog.t0, catalog)
        if max_value is None or y > max_value:
            max_value = y
        if y > bound:
            failures.append({"box": bx, "value": y, "bound": bound})
    return SumBoundReport(
        ok=not failures,
        n=c.n,
        w=w,
        q=q,
        bound_constant=const,
        boxes_checked=len(boxes),
        failures=failures,
        precondition_violations=precondition_violations,
        max_value=max_value,
    )


# ---------------------------------------------------------------------------
# box partitioning search


@dataclass
class BoxingReport:
    ok: bool
    n: int
    w: int
    q: int
    epsilon: float
    shift: tuple | None
    boxes: list
    capture: dict  # small-component code -> (captured, total)
    min_fraction: float
    search_mode: str
    guarantee_applies: bool  # the averaging size condition held


def boxing_search(
    c: ForestClass, catalog: Catalog, w: int, epsilon: float, q: int | None = None
) -> BoxingReport:
    """Deterministic search for a family of width-w boxes, pairwise 2q
    apart, capturing at least a (1-epsilon) fraction of the two-component
    members for every small-component type in u0.

    Candidate families come from shifting a fixed grid whose good region
    is a union of width-w boxes separated by 2q in every coordinate; the
    shift only matters modulo the period w + 2q, so all distinct patterns
    are covered by the
    (w+2q)^d shift classes.  When that space is too large the search
    degrades to diagonal shifts and reports it.  If no shift reaches the
    target the best one found is returned with ok=False.
    """
    if not _class_is_bridge_addable(c):
        raise ValueError("class is not bridge-addable")
    if q is None:
        q = catalog.q_star
    period = w + 2 * q
    d = len(catalog.t0)
    hist = c.histogram(catalog)
    totals = {
        u.code: hist.b_totals.get(u.code, 0) for u in catalog.u0
    }
    relevant = {code: amap for code, amap in hist.b_alpha.items() if code in catalog.u0_index}

    if period**d <= 200_000:
        shift_space = itertools.product(range(period), repeat=d)
        search_mode = "full"
    else:
        shift_space = ((t,) * d for t in range(period))
        search_mode = "diagonal"

    def captured_by(shift):
        out = {}
        for code, amap in relevant.items():
            got = 0
            for alpha, cnt in amap.items():
                good = True
                for a, b in zip(alpha, shift):
                    r = a - b
                    if r < 0 or r % period >= w:
                        good = False
                        break
                if good:
                    got += cnt
            out[code] = got
        return out

    best_shift = None
    best_capture = None
    best_min = -1.0
    ok = False
    for shift in shift_space:
        cap = captured_by(shift)
        fracs = [
            cap[code] / totals[code] for code in cap if totals[code] > 0
        ]
        min_frac = min(fracs) if fracs else 1.0
        if min_frac > best_min:
            best_min = min_frac
            best_shift = tuple(shift)
            best_capture = cap
        if min_frac >= 1.0 - epsilon:
            ok = True
            best_shift = tuple(shift)
            best_capture = cap
            best_min = min_frac
            break

    boxes = set()
    if best_shift is not None:
        for code, amap in relevant.items():
            for alpha in amap:
                offsets = [a - b for a, b in zip(alpha, best_shift)]
                if any(r < 0 or r % period >= w for r in offsets):
                    continue
                lower = tuple(
                    b + period * (r // period) for b, r in zip(best_shift, offsets)
                )
                boxes.add(lower)
    box_list = [Box(lower=l, width=w, q=q) for l in sorted(boxes)]

    n = c.n
    lhs = 1.0 - (1.0 - (w + 2 * q) / n) ** d * (1.0 + 2 * q / w) ** (-d)
    guarantee = lhs <= epsilon / len(catalog.u0)

    return BoxingReport(
        ok=ok,
        n=n,
        w=w,
        q=q,
        epsilon=epsilon,
        shift=best_shift,
        boxes=box_list,
        capture={code: (best_capture.get(code, 0), totals[code]) for code in totals},
        min_fraction=best_min,
        search_mode=search_mode,
        guarantee_applies=guarantee,
    )


# ---------------------------------------------------------------------------
# file formats


def save_class(c: ForestClass, path) -> None:
    """Class file: {"n": n, "forests": [[[u, v], ...], ...]}."""
    payload = {
        "n": c.n,
        "forests": [
            [[u, v] for u, v in sorted(f.edges)] for f in c.sorted_members()
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_class(path) -> ForestClass:
    with open(path) as fh:
        payload = json.load(fh)
    n = payload["n"]
    members = [
        LabeledForest.make(n, [tuple(e) for e in edges]) for edges in payload["forests"]
    ]
    return ForestClass(n, members, provenance=f"file:{path}")


def write_connectivity_sweep(path, n_values, mode: str = "exact") -> None:
    """CSV of connectivity probabilities over a range of n."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if mode == "exact":
            writer.writerow(["n", "probability", "num", "den"])
            for n in n_values:
                p = connectivity_prob(n, mode="exact")
                writer.writerow([n, float(p), p.numerator, p.denominator])
        else:
            writer.writerow(["n", "probability"])
            for n in n_values:
                writer.writerow([n, connectivity_prob(n, mode=mode)])


def write_ratio_sweep(path, n_values) -> None:
    """CSV of two-component/connected ratios over a range of n."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "ratio", "num", "den"])
        for n in n_values:
            r = two_component_ratio(n)
            writer.writerow([n, float(r), r.numerator, r.denominator])
