"""Offline oracle run: enumerate every labeled tree on 9 vertices from its
linear-sequence code, canonicalize, and count the distinct rooted codes
(rooted at vertex 0) and unrooted codes.  The counts are frozen into the
acceptance tests; rerun this script to regenerate them.
"""

import itertools
import sys
import time

sys.setrecursionlimit(10_000)

from bridgeforest import treekit as tk


def prufer_edges(seq, n):
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    import heapq

    leaves = [i for i in range(n) if degree[i] == 1]
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


def adjacency(edges, n):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def main(n=9):
    rooted = set()
    unrooted = set()
    t0 = time.time()
    total = n ** (n - 2)
    done = 0
    for seq in itertools.product(range(n), repeat=n - 2):
        adj = adjacency(prufer_edges(seq, n), n)
        rooted.add(tk._encode(adj, 0)[0])
        unrooted.add(tk._unrooted_from_adj(adj).code)
        done += 1
        if done % 500_000 == 0:
            print(f"{done}/{total} ({time.time()-t0:.0f}s)", flush=True)
    print(f"n={n}: rooted={len(rooted)} unrooted={len(unrooted)} in {time.time()-t0:.0f}s")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 9)
