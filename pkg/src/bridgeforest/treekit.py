"""Canonical forms, enumeration, automorphism counts, and edge splits for
unlabeled trees.

A rooted tree is encoded as a balanced-parentheses string: a vertex is
``"(" + <child codes> + ")"`` with the child codes concatenated in
non-increasing lexicographic order.  Two rooted trees are isomorphic as
rooted trees iff their codes are equal.  An unrooted tree is encoded by
rooting it at its weight centroid (the lexicographically smaller of the
two codes when the tree has a centroid pair), which again makes string
equality coincide with isomorphism.

Vertex indices accepted by `attach` and reported by `splits` refer to the
depth-first preorder of the canonical representative, i.e. the order in
which the ``"("`` characters appear in the code string.  The representative
of a code is recovered with `code_to_adjacency`.

All code objects are immutable values and safe to share across threads;
the enumeration caches below only ever grow and repeated inserts are
idempotent, so results do not depend on thread count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

__all__ = [
    "CapacityError",
    "NonTreeError",
    "CatalogError",
    "check_inclusion_closed",
    "RootedTreeCode",
    "UnrootedTreeCode",
    "EdgeSplit",
    "Catalog",
    "IdentityCheck",
    "CayleyCheck",
    "canonicalize_rooted",
    "canonicalize_unrooted",
    "enumerate_rooted",
    "enumerate_unrooted",
    "splits",
    "verify_aut_identity",
    "attach",
    "cayley_identity_check",
    "code_to_adjacency",
    "SINGLE_VERTEX_CODE",
]

# Exhaustive enumeration is meant for desk-scale work; sizes past this
# bound are refused rather than silently attempted.
DEFAULT_MAX_SIZE = 16

SINGLE_VERTEX_CODE = "()"


class CapacityError(RuntimeError):
    """Requested size exceeds the configured exhaustive-mode bound."""


class NonTreeError(ValueError):
    """Input edge list is not a tree (cycle, multi-edge, or disconnected)."""


class CatalogError(ValueError):
    """Tree catalog violates a structural requirement."""


@dataclass(frozen=True)
class RootedTreeCode:
    """Canonical code of an unlabeled rooted tree.

    aut_r is the number of automorphisms fixing the root, exact.
    Instances are produced by the canonicalization and enumeration
    functions in this module; the fields are mutually consistent.
    """

    code: str
    size: int
    aut_r: int

    def __lt__(self, other: "RootedTreeCode") -> bool:
        return (self.size, self.code) < (other.size, other.code)


@dataclass(frozen=True)
class UnrootedTreeCode:
    """Canonical code of an unlabeled unrooted tree.

    The code is the rooted code at the canonical centroid.  aut_u counts
    all automorphisms.  centroid_kind is "one-centroid" or "two-centroid".
    """

    code: str
    size: int
    aut_u: int
    centroid_kind: str

    def __lt__(self, other: "UnrootedTreeCode") -> bool:
        return (self.size, self.code) < (other.size, other.code)


@dataclass(frozen=True)
class EdgeSplit:
    """One edge orbit of a rooted tree, split into root side and pendant side.

    m_edge is the size of the edge orbit in `parent` under root-fixing
    automorphisms, m_vminus the orbit size of the attachment vertex in
    `t_minus` (rooted), n_vplus the orbit size of the attachment vertex in
    `u_plus` (unrooted).
    """

    parent: RootedTreeCode
    t_minus: RootedTreeCode
    u_plus: UnrootedTreeCode
    m_edge: int
    m_vminus: int
    n_vplus: int


@dataclass(frozen=True)
class IdentityCheck:
    """Certificate for the edge/vertex multiplicity identity of a split."""

    ok: bool
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class CayleyCheck:
    ok: bool
    n: int
    rooted_sum: int
    rooted_expected: int
    unrooted_sum: int
    unrooted_expected: int


# ---------------------------------------------------------------------------
# adjacency plumbing


def _build_adjacency(edges, extra_vertices=()):
    """Build an index-labeled adjacency list from an edge list.

    Returns (adj, labels) where labels[i] is the original label of vertex i.
    Raises NonTreeError on self-loops, repeated edges, or when the edge
    count does not match a tree on the touched vertex set.
    """
    labels = sorted({v for e in edges for v in e} | set(extra_vertices))
    if not labels:
        raise NonTreeError("empty input: no vertices")
    index = {v: i for i, v in enumerate(labels)}
    adj = [[] for _ in labels]
    seen = set()
    for u, v in edges:
        if u == v:
            raise NonTreeError(f"self-loop at {u}")
        key = (index[u], index[v]) if index[u] < index[v] else (index[v], index[u])
        if key in seen:
            raise NonTreeError(f"repeated edge {u}-{v}")
        seen.add(key)
        adj[index[u]].append(index[v])
        adj[index[v]].append(index[u])
    if len(seen) != len(labels) - 1:
        raise NonTreeError(
            f"{len(labels)} vertices need {len(labels) - 1} edges, got {len(seen)}"
        )
    return adj, labels


def _dfs_order(adj, root):
    """Preorder and parent array of the tree reached from root.

    Raises NonTreeError if the traversal does not reach every vertex.
    """
    n = len(adj)
    parent = [-2] * n
    parent[root] = -1
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        for u in adj[v]:
            if parent[u] == -2:
                parent[u] = v
                stack.append(u)
    if len(order) != n:
        raise NonTreeError("edge list is disconnected")
    return order, parent


def _encode(adj, root, marked=-1):
    """Canonical code and root-fixing automorphism count, bottom-up.

    If `marked >= 0`, that vertex's block carries a ``*`` just after its
    opening parenthesis; codes of marked trees are canonical for the
    marked isomorphism class, and the automorphism count then refers to
    automorphisms preserving the mark.
    """
    order, parent = _dfs_order(adj, root)
    codes = [""] * len(adj)
    auts = [1] * len(adj)
    for v in reversed(order):
        kids = [u for u in adj[v] if u != parent[v]]
        pairs = sorted(((codes[u], auts[u]) for u in kids), reverse=True)
        aut = 1
        run = 0
        prev = None
        for code, kid_aut in pairs:
            aut *= kid_aut
            run = run + 1 if code == prev else 1
            aut *= run
            prev = code
        head = "(*" if v == marked else "("
        codes[v] = head + "".join(p[0] for p in pairs) + ")"
        auts[v] = aut
    return codes[root], auts[root]


def code_to_adjacency(code: str):
    """Adjacency list of the canonical representative of a code string.

    Vertices are numbered 0..size-1 in depth-first preorder, the canonical
    vertex indexing used throughout this module.  Accepts marked codes.
    """
    adj = []
    stack = []
    for ch in code:
        if ch == "(":
            v = len(adj)
            adj.append([])
            if stack:
                adj[stack[-1]].append(v)
                adj[v].append(stack[-1])
            stack.append(v)
        elif ch == ")":
            if not stack:
                raise ValueError(f"unbalanced code {code!r}")
            stack.pop()
        elif ch != "*":
            raise ValueError(f"unexpected character {ch!r} in code {code!r}")
    if stack or not adj:
        raise ValueError(f"unbalanced code {code!r}")
    return adj


def _centroids(adj):
    """The one or two weight centroids (vertices minimizing the largest
    component left by their removal)."""
    n = len(adj)
    if n == 1:
        return [0]
    order, parent = _dfs_order(adj, 0)
    size = [1] * n
    weight = [0] * n
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
            weight[parent[v]] = max(weight[parent[v]], size[v])
    for v in range(n):
        weight[v] = max(weight[v], n - size[v])
    best = min(weight)
    return [v for v in range(n) if weight[v] == best]


def _rooted_from_adj(adj, root) -> RootedTreeCode:
    code, aut = _encode(adj, root)
    return RootedTreeCode(code=code, size=len(adj), aut_r=aut)


def _unrooted_from_adj(adj) -> UnrootedTreeCode:
    cents = _centroids(adj)
    if len(cents) == 1:
        code, aut = _encode(adj, cents[0])
        return UnrootedTreeCode(
            code=code, size=len(adj), aut_u=aut, centroid_kind="one-centroid"
        )
    c1, c2 = cents
    code1, _ = _encode(adj, c1)
    code2, _ = _encode(adj, c2)
    # Halves rooted at the endpoints of the central edge.
    half_adj = [[u for u in nbrs] for nbrs in adj]
    half_adj[c1].remove(c2)
    half_adj[c2].remove(c1)
    h1 = _encode_component(half_adj, c1)
    h2 = _encode_component(half_adj, c2)
    swap = 2 if h1[0] == h2[0] else 1
    return UnrootedTreeCode(
        code=min(code1, code2),
        size=len(adj),
        aut_u=h1[1] * h2[1] * swap,
        centroid_kind="two-centroid",
    )


def _component_vertices(adj, start, blocked=-1):
    """Vertices reachable from start without crossing vertex `blocked`."""
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u != blocked and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def _sub_adjacency(adj, vertices):
    """Relabeled adjacency of the induced subtree; returns (adj, old_of_new)."""
    old = sorted(vertices)
    index = {v: i for i, v in enumerate(old)}
    sub = [[index[u] for u in adj[v] if u in vertices] for v in old]
    return sub, old


def _encode_component(adj, root):
    """Encode the component of `root` in a possibly disconnected adjacency."""
    verts = _component_vertices(adj, root)
    sub, old = _sub_adjacency(adj, verts)
    return _encode(sub, old.index(root))


def _unrooted_marked_code(adj, vertex):
    """Canonical code of the unrooted tree with one marked vertex."""
    cents = _centroids(adj)
    return min(_encode(adj, c, marked=vertex)[0] for c in cents)


def _rooted_vertex_orbit_keys(adj, root):
    """Marked code of every vertex; equal keys mean same orbit under
    root-fixing automorphisms."""
    return [_encode(adj, root, marked=v)[0] for v in range(len(adj))]


# ---------------------------------------------------------------------------
# canonicalization


def canonicalize_rooted(edges, root) -> RootedTreeCode:
    """Canonical code of the tree given by `edges`, rooted at `root`.

    Isomorphic rooted inputs yield identical codes; the root-fixing
    automorphism count is computed in the same pass.
    """
    adj, labels = _build_adjacency(edges, extra_vertices=(root,))
    index = {v: i for i, v in enumerate(labels)}
    if root not in index:
        raise NonTreeError(f"root {root} is not a vertex of the input")
    return _rooted_from_adj(adj, index[root])


def canonicalize_unrooted(edges, vertices=()) -> UnrootedTreeCode:
    """Canonical code of the unrooted tree given by `edges`.

    `vertices` can name isolated vertices (needed only for the
    single-vertex tree, which has no edges).
    """
    adj, _ = _build_adjacency(edges, extra_vertices=vertices)
    return _unrooted_from_adj(adj)


# ---------------------------------------------------------------------------
# enumeration

# Size -> sorted list of codes.  Append-only; repeated builds produce the
# same lists, so concurrent use is safe.
_ROOTED_BY_SIZE: dict[int, list[RootedTreeCode]] = {}
_UNROOTED_BY_SIZE: dict[int, list[UnrootedTreeCode]] = {}


def _rooted_sizes_up_to(k: int):
    for s in range(1, k + 1):
        if s in _ROOTED_BY_SIZE:
            continue
        if s == 1:
            _ROOTED_BY_SIZE[1] = [RootedTreeCode(SINGLE_VERTEX_CODE, 1, 1)]
            continue
        found: dict[str, RootedTreeCode] = {}
        for t in _ROOTED_BY_SIZE[s - 1]:
            adj = code_to_adjacency(t.code)
            for v in range(s - 1):
                grown = [list(nbrs) for nbrs in adj]
                grown.append([v])
                grown[v].append(s - 1)
                code, aut = _encode(grown, 0)
                if code not in found:
                    found[code] = RootedTreeCode(code, s, aut)
        _ROOTED_BY_SIZE[s] = [found[c] for c in sorted(found)]


def enumerate_rooted(k: int, max_size: int = DEFAULT_MAX_SIZE):
    """All rooted unlabeled trees with 1..k vertices, one code per
    isomorphism class, ordered by (size, code)."""
    if k < 1:
        raise ValueError("size bound must be >= 1")
    if k > max_size:
        raise CapacityError(f"size bound {k} exceeds exhaustive limit {max_size}")
    _rooted_sizes_up_to(k)
    return [t for s in range(1, k + 1) for t in _ROOTED_BY_SIZE[s]]


def enumerate_unrooted(k: int, max_size: int = DEFAULT_MAX_SIZE):
    """All unrooted unlabeled trees with 1..k vertices, ordered by
    (size, code)."""
    if k < 1:
        raise ValueError("size bound must be >= 1")
    if k > max_size:
        raise CapacityError(f"size bound {k} exceeds exhaustive limit {max_size}")
    _rooted_sizes_up_to(k)
    for s in range(1, k + 1):
        if s in _UNROOTED_BY_SIZE:
            continue
        found: dict[str, UnrootedTreeCode] = {}
        for t in _ROOTED_BY_SIZE[s]:
            u = _unrooted_from_adj(code_to_adjacency(t.code))
            if u.code not in found:
                found[u.code] = u
        _UNROOTED_BY_SIZE[s] = [found[c] for c in sorted(found)]
    return [u for s in range(1, k + 1) for u in _UNROOTED_BY_SIZE[s]]


# ---------------------------------------------------------------------------
# edge splits


def splits(t: RootedTreeCode):
    """One EdgeSplit per edge orbit of `t` under root-fixing automorphisms.

    An edge is identified with its endpoint farther from the root, so edge
    orbits are exactly the orbits of non-root vertices.  The orbit sizes
    m_edge over all splits sum to size-1.
    """
    if t.size < 2:
        raise ValueError("single-vertex tree has no edges to split")
    adj = code_to_adjacency(t.code)
    _, parent = _dfs_order(adj, 0)
    keys = _rooted_vertex_orbit_keys(adj, 0)
    orbits: dict[str, list[int]] = {}
    for v in range(1, len(adj)):
        orbits.setdefault(keys[v], []).append(v)
    out = []
    for members in sorted(orbits.values(), key=min):
        v = min(members)
        below = _component_vertices(adj, v, blocked=parent[v])
        sub_u, old_u = _sub_adjacency(adj, below)
        u_plus = _unrooted_from_adj(sub_u)
        v_in_u = old_u.index(v)
        u_keys = [_unrooted_marked_code(sub_u, w) for w in range(len(sub_u))]
        n_vplus = u_keys.count(u_keys[v_in_u])
        rest = set(range(len(adj))) - below
        sub_t, old_t = _sub_adjacency(adj, rest)
        t_minus = _rooted_from_adj(sub_t, old_t.index(0))
        p_in_t = old_t.index(parent[v])
        t_keys = _rooted_vertex_orbit_keys(sub_t, old_t.index(0))
        m_vminus = t_keys.count(t_keys[p_in_t])
        out.append(
            EdgeSplit(
                parent=t,
                t_minus=t_minus,
                u_plus=u_plus,
                m_edge=len(members),
                m_vminus=m_vminus,
                n_vplus=n_vplus,
            )
        )
    return out


def verify_aut_identity(s: EdgeSplit) -> IdentityCheck:
    """Exact check of m_edge / aut_r(parent) ==
    m_vminus * n_vplus / (aut_r(t_minus) * aut_u(u_plus))."""
    lhs = Fraction(s.m_edge, s.parent.aut_r)
    rhs = Fraction(s.m_vminus * s.n_vplus, s.t_minus.aut_r * s.u_plus.aut_u)
    return IdentityCheck(ok=lhs == rhs, lhs=lhs, rhs=rhs)


def attach(
    t_minus: RootedTreeCode, v_index: int, u: UnrootedTreeCode, u_index: int
) -> RootedTreeCode:
    """Join `u` to `t_minus` by an edge between the addressed vertices and
    return the canonical code of the result, rooted at t_minus's root.

    Indices address the canonical representatives (depth-first preorder).
    """
    if not 0 <= v_index < t_minus.size:
        raise IndexError(f"v_index {v_index} out of range for size {t_minus.size}")
    if not 0 <= u_index < u.size:
        raise IndexError(f"u_index {u_index} out of range for size {u.size}")
    base = code_to_adjacency(t_minus.code)
    piece = code_to_adjacency(u.code)
    offset = len(base)
    joined = [list(nbrs) for nbrs in base]
    joined.extend([w + offset for w in nbrs] for nbrs in piece)
    joined[v_index].append(u_index + offset)
    joined[u_index + offset].append(v_index)
    return _rooted_from_adj(joined, 0)


# ---------------------------------------------------------------------------
# catalogs


def check_inclusion_closed(rooted_family) -> None:
    """Raise CatalogError unless the family of rooted trees is closed under
    rooted inclusion (equivalently, under removing any single non-root
    leaf)."""
    codes = {t.code for t in rooted_family}
    for t in rooted_family:
        if t.size == 1:
            continue
        adj = code_to_adjacency(t.code)
        for v in range(1, len(adj)):
            if len(adj[v]) == 1:
                rest = set(range(len(adj))) - {v}
                sub, old = _sub_adjacency(adj, rest)
                code, _ = _encode(sub, old.index(0))
                if code not in codes:
                    raise CatalogError(
                        f"family is not closed under rooted inclusion: removing a "
                        f"leaf from {t.code} gives {code}, which is missing"
                    )


class Catalog:
    """A pair of finite tree families: rooted trees t0 (closed under rooted
    inclusion) and unrooted trees u0 (containing the single-vertex tree).

    Families are kept in (size, code) order; `t0_index`/`u0_index` map code
    strings to positions, which is also the coordinate order of statistics
    vectors and weight vectors built over the catalog.
    """

    def __init__(self, t0, u0):
        self.t0 = tuple(sorted(t0))
        self.u0 = tuple(sorted(u0))
        if not self.t0 or not self.u0:
            raise CatalogError("catalog families must be non-empty")
        self.t_max = max(t.size for t in self.t0)
        self.u_max = max(u.size for u in self.u0)
        self.t0_index = {t.code: i for i, t in enumerate(self.t0)}
        self.u0_index = {u.code: i for i, u in enumerate(self.u0)}
        if len(self.t0_index) != len(self.t0) or len(self.u0_index) != len(self.u0):
            raise CatalogError("duplicate codes in catalog")
        if SINGLE_VERTEX_CODE not in self.u0_index:
            raise CatalogError("u0 must contain the single-vertex tree")
        check_inclusion_closed(self.t0)
        self.key = (
            tuple(t.code for t in self.t0),
            tuple(u.code for u in self.u0),
        )

    @property
    def q_star(self) -> int:
        """Neighbourhood radius used by the box-local counting checks.

        Adding a pendant tree of at most u_max vertices moves every pendant
        statistic by at most u_max, so u_max is a valid uniform radius.
        """
        return self.u_max

    @classmethod
    def standard(cls, t_max: int, u_max: int) -> "Catalog":
        """All rooted trees of size <= t_max and all unrooted trees of size
        <= u_max."""
        return cls(enumerate_rooted(t_max), enumerate_unrooted(u_max))

    def __repr__(self):
        return f"Catalog(t_max={self.t_max}, |t0|={len(self.t0)}, u_max={self.u_max}, |u0|={len(self.u0)})"


# ---------------------------------------------------------------------------
# classical identities


def _labeled_tree_count(n: int) -> int:
    return 1 if n == 1 else n ** (n - 2)


def cayley_identity_check(n: int, max_size: int = DEFAULT_MAX_SIZE) -> CayleyCheck:
    """Check that the enumerated codes account for all labeled trees:
    sum of n!/aut_r over rooted codes of size n equals n^(n-1), and
    sum of n!/aut_u over unrooted codes equals n^(n-2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    enumerate_rooted(n, max_size=max_size)
    enumerate_unrooted(n, max_size=max_size)
    nf = factorial(n)
    rooted = sum(Fraction(nf, t.aut_r) for t in _ROOTED_BY_SIZE[n])
    unrooted = sum(Fraction(nf, u.aut_u) for u in _UNROOTED_BY_SIZE[n])
    r_exp = n * _labeled_tree_count(n)
    u_exp = _labeled_tree_count(n)
    ok = rooted == r_exp and unrooted == u_exp
    return CayleyCheck(
        ok=ok,
        n=n,
        rooted_sum=int(rooted) if rooted.denominator == 1 else rooted,
        rooted_expected=r_exp,
        unrooted_sum=int(unrooted) if unrooted.denominator == 1 else unrooted,
        unrooted_expected=u_exp,
    )
