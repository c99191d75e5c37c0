"""Independent oracles used by the tests.

Everything here is deliberately written from scratch rather than imported
from the package: labeled-tree enumeration decodes linear sequence codes
with a plain scan, unlabeled-tree counts come from the classical counting
recurrences (OEIS A000081 / A000055), and automorphism counts come from
explicit permutation checking.
"""

from __future__ import annotations

import itertools
from functools import lru_cache


def prufer_edges(seq, n):
    """Decode a length-(n-2) sequence over 0..n-1 into tree edges by the
    smallest-leaf rule, with a plain scan instead of a heap."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return edges


def all_labeled_trees(n):
    """Edge lists of all n^(n-2) labeled trees on 0..n-1."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        yield prufer_edges(seq, n)


@lru_cache(maxsize=None)
def rooted_tree_count(n: int) -> int:
    """OEIS A000081 by the Euler-transform convolution."""
    if n <= 1:
        return n
    total = 0
    for j in range(1, n):
        s = sum(d * rooted_tree_count(d) for d in range(1, j + 1) if j % d == 0)
        total += s * rooted_tree_count(n - j)
    return total // (n - 1)


@lru_cache(maxsize=None)
def unrooted_tree_count(n: int) -> int:
    """OEIS A000055 from A000081 via the dissymmetry relation."""
    if n == 0:
        return 1
    paired = sum(rooted_tree_count(k) * rooted_tree_count(n - k) for k in range(n + 1))
    if n % 2 == 0:
        paired -= rooted_tree_count(n // 2)
    return rooted_tree_count(n) - paired // 2


def adjacency_from_edges(edges, n):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def brute_force_aut_rooted(adj, root) -> int:
    """Count permutations fixing `root` that preserve the edge set."""
    n = len(adj)
    edges = {(min(u, v), max(u, v)) for u in range(n) for v in adj[u]}
    others = [v for v in range(n) if v != root]
    count = 0
    for perm in itertools.permutations(others):
        mapping = {root: root}
        mapping.update(zip(others, perm))
        if all((min(mapping[u], mapping[v]), max(mapping[u], mapping[v])) in edges for u, v in edges):
            count += 1
    return count


def brute_force_aut_unrooted(adj) -> int:
    n = len(adj)
    edges = {(min(u, v), max(u, v)) for u in range(n) for v in adj[u]}
    count = 0
    for perm in itertools.permutations(range(n)):
        if all((min(perm[u], perm[v]), max(perm[u], perm[v])) in edges for u, v in edges):
            count += 1
    return count


def acyclic_edge_subsets(n):
    """All forests on vertices 1..n as frozensets of (u, v) edges, by
    direct filtering of edge subsets (independent of the package's
    pruned enumeration)."""
    all_edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    out = []
    for r in range(len(all_edges) + 1):
        for subset in itertools.combinations(all_edges, r):
            parent = list(range(n + 1))

            def find(x):
                while parent[x] != x:
                    x = parent[x]
                return x

            ok = True
            for u, v in subset:
                ru, rv = find(u), find(v)
                if ru == rv:
                    ok = False
                    break
                parent[ru] = rv
            if ok:
                out.append(frozenset(subset))
    return out
