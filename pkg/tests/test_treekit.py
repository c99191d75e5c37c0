import itertools
import random
from fractions import Fraction

import pytest

from bridgeforest import treekit as tk

import oracles


def rooted_counts(k):
    out = {}
    for t in tk.enumerate_rooted(k):
        out[t.size] = out.get(t.size, 0) + 1
    return [out.get(s, 0) for s in range(1, k + 1)]


def unrooted_counts(k):
    out = {}
    for u in tk.enumerate_unrooted(k):
        out[u.size] = out.get(u.size, 0) + 1
    return [out.get(s, 0) for s in range(1, k + 1)]


class TestCanonicalizeRooted:
    def test_single_vertex(self):
        t = tk.canonicalize_rooted([], root=5)
        assert t.code == "()" and t.size == 1 and t.aut_r == 1

    def test_star3_center(self):
        t = tk.canonicalize_rooted([(1, 2), (1, 3)], root=1)
        assert t.aut_r == 2

    def test_star4_center(self):
        t = tk.canonicalize_rooted([(1, 2), (1, 3), (1, 4)], root=1)
        assert t.aut_r == 6

    def test_isomorphic_inputs_same_code(self):
        a = tk.canonicalize_rooted([(10, 20), (20, 30)], root=10)
        b = tk.canonicalize_rooted([(7, 1), (1, 9)], root=9)
        assert a == b

    def test_children_sorted_non_increasing(self):
        # root with a leaf child and a path child serializes leaf first
        t = tk.canonicalize_rooted([(1, 2), (1, 3), (3, 4)], root=1)
        assert t.code == "(()((≡)))".replace("≡", "")  # "(()(()))"

    def test_rejects_cycle(self):
        with pytest.raises(tk.NonTreeError):
            tk.canonicalize_rooted([(1, 2), (2, 3), (1, 3)], root=1)

    def test_rejects_disconnected(self):
        with pytest.raises(tk.NonTreeError):
            tk.canonicalize_rooted([(1, 2), (3, 4), (2, 3), (1, 4)], root=1)

    def test_rejects_missing_root(self):
        with pytest.raises(tk.NonTreeError):
            tk.canonicalize_rooted([(1, 2)], root=9)


class TestCanonicalizeUnrooted:
    def test_path2(self):
        u = tk.canonicalize_unrooted([(1, 2)])
        assert u.aut_u == 2 and u.centroid_kind == "two-centroid"

    def test_path4(self):
        u = tk.canonicalize_unrooted([(1, 2), (2, 3), (3, 4)])
        assert u.aut_u == 2 and u.centroid_kind == "two-centroid"

    def test_star4(self):
        u = tk.canonicalize_unrooted([(1, 2), (1, 3), (1, 4)])
        assert u.aut_u == 6 and u.centroid_kind == "one-centroid"

    def test_single_vertex_via_vertices(self):
        u = tk.canonicalize_unrooted([], vertices=[3])
        assert u.code == "()" and u.aut_u == 1

    def test_equality_matches_isomorphism(self):
        a = tk.canonicalize_unrooted([(1, 2), (2, 3), (2, 4)])
        b = tk.canonicalize_unrooted([(9, 7), (7, 8), (7, 6)])
        c = tk.canonicalize_unrooted([(1, 2), (2, 3), (3, 4)])
        assert a == b and a != c


class TestEnumeration:
    def test_rooted_counts_small(self):
        assert rooted_counts(6) == [1, 1, 2, 4, 9, 20]

    def test_unrooted_counts_small(self):
        assert unrooted_counts(7) == [1, 1, 1, 2, 3, 6, 11]

    def test_size_one(self):
        assert [t.code for t in tk.enumerate_rooted(1)] == ["()"]
        assert [u.code for u in tk.enumerate_unrooted(1)] == ["()"]

    def test_capacity_error(self):
        with pytest.raises(tk.CapacityError):
            tk.enumerate_rooted(17)

    def test_counts_match_recurrence_oracle(self):
        assert rooted_counts(10) == [oracles.rooted_tree_count(s) for s in range(1, 11)]
        assert unrooted_counts(10) == [oracles.unrooted_tree_count(s) for s in range(1, 11)]

    def test_deterministic_order(self):
        first = [t.code for t in tk.enumerate_rooted(6)]
        second = [t.code for t in tk.enumerate_rooted(6)]
        assert first == second
        sizes = [t.size for t in tk.enumerate_rooted(6)]
        assert sizes == sorted(sizes)

    def test_prufer_roundtrip_random_large(self):
        # seeded samples at sizes where full enumeration is too slow:
        # every rooting of every sampled labeled tree canonicalizes into
        # the enumerated set
        rng = random.Random(2024)
        for n in (8, 9):
            expected = {t.code for t in tk.enumerate_rooted(n) if t.size == n}
            for _ in range(800):
                seq = [rng.randrange(n) for _ in range(n - 2)]
                edges = [(u + 1, v + 1) for u, v in oracles.prufer_edges(seq, n)]
                for root in range(1, n + 1):
                    assert tk.canonicalize_rooted(edges, root).code in expected

    def test_prufer_roundtrip_small(self):
        # every labeled tree canonicalizes into the enumerated set, and the
        # distinct codes exhaust it
        for n in range(1, 7):
            expected = {t.code for t in tk.enumerate_rooted(n) if t.size == n}
            seen_rooted = set()
            seen_unrooted = set()
            expected_u = {u.code for u in tk.enumerate_unrooted(n) if u.size == n}
            for edges in oracles.all_labeled_trees(n):
                shifted = [(u + 1, v + 1) for u, v in edges]
                for root in range(1, n + 1):
                    seen_rooted.add(tk.canonicalize_rooted(shifted, root).code)
                seen_unrooted.add(tk.canonicalize_unrooted(shifted, vertices=range(1, n + 1)).code)
            assert seen_rooted == expected
            assert seen_unrooted == expected_u


class TestAutomorphismCounts:
    @pytest.mark.parametrize("n", range(1, 8))
    def test_rooted_formula_vs_brute_force(self, n):
        for t in tk.enumerate_rooted(n):
            if t.size != n:
                continue
            adj = tk.code_to_adjacency(t.code)
            assert t.aut_r == oracles.brute_force_aut_rooted(adj, 0), t.code

    @pytest.mark.parametrize("n", range(1, 8))
    def test_unrooted_formula_vs_brute_force(self, n):
        for u in tk.enumerate_unrooted(n):
            if u.size != n:
                continue
            adj = tk.code_to_adjacency(u.code)
            assert u.aut_u == oracles.brute_force_aut_unrooted(adj), u.code


class TestSplits:
    def test_three_path_end_split(self):
        p3 = tk.canonicalize_rooted([(1, 2), (2, 3)], root=1)
        by_pendant = {s.u_plus.size: s for s in tk.splits(p3)}
        far = by_pendant[1]
        assert far.t_minus.size == 2 and far.m_edge == 1
        assert far.m_vminus == 1 and far.n_vplus == 1

    def test_star4_center_leaf_orbit(self):
        s4 = tk.canonicalize_rooted([(1, 2), (1, 3), (1, 4)], root=1)
        (split,) = tk.splits(s4)
        assert split.m_edge == 3
        assert split.t_minus.aut_r == 2 and split.u_plus.size == 1
        assert split.m_vminus == 1 and split.n_vplus == 1

    def test_path4_three_singleton_orbits(self):
        p4 = tk.canonicalize_rooted([(1, 2), (2, 3), (3, 4)], root=1)
        assert [s.m_edge for s in tk.splits(p4)] == [1, 1, 1]

    def test_single_vertex_rejected(self):
        with pytest.raises(ValueError):
            tk.splits(tk.RootedTreeCode("()", 1, 1))

    def test_orbit_sizes_sum_to_edge_count(self):
        for t in tk.enumerate_rooted(9):
            if t.size < 2:
                continue
            assert sum(s.m_edge for s in tk.splits(t)) == t.size - 1

    def test_size_additivity(self):
        for t in tk.enumerate_rooted(7):
            if t.size < 2:
                continue
            for s in tk.splits(t):
                assert s.t_minus.size + s.u_plus.size == t.size


class TestAutIdentity:
    def test_three_path(self):
        p3 = tk.canonicalize_rooted([(1, 2), (2, 3)], root=1)
        for s in tk.splits(p3):
            assert tk.verify_aut_identity(s).ok

    def test_star4_values(self):
        s4 = tk.canonicalize_rooted([(1, 2), (1, 3), (1, 4)], root=1)
        (split,) = tk.splits(s4)
        chk = tk.verify_aut_identity(split)
        assert chk.ok and chk.lhs == Fraction(1, 2) == chk.rhs

    def test_exhaustive_up_to_9(self):
        for t in tk.enumerate_rooted(9):
            if t.size < 2:
                continue
            for s in tk.splits(t):
                chk = tk.verify_aut_identity(s)
                assert chk.ok, (t.code, s)


class TestAttach:
    def test_vertex_to_vertex(self):
        sv = tk.canonicalize_rooted([], root=1)
        usv = tk.canonicalize_unrooted([], vertices=[1])
        assert tk.attach(sv, 0, usv, 0).code == "(())"

    def test_path2_to_vertex(self):
        sv = tk.canonicalize_rooted([], root=1)
        p2 = tk.canonicalize_unrooted([(1, 2)])
        assert tk.attach(sv, 0, p2, 0).code == "((()))"

    def test_middle_vs_end_of_path3(self):
        p3 = tk.canonicalize_rooted([(1, 2), (2, 3)], root=1)
        usv = tk.canonicalize_unrooted([], vertices=[1])
        star = tk.attach(p3, 1, usv, 0)
        path = tk.attach(p3, 2, usv, 0)
        star_u = tk.canonicalize_unrooted([(1, 2), (2, 3), (2, 4)])
        assert tk._unrooted_from_adj(tk.code_to_adjacency(star.code)).code == star_u.code
        assert path.code == "(((())))"

    def test_index_out_of_range(self):
        sv = tk.canonicalize_rooted([], root=1)
        usv = tk.canonicalize_unrooted([], vertices=[1])
        with pytest.raises(IndexError):
            tk.attach(sv, 1, usv, 0)
        with pytest.raises(IndexError):
            tk.attach(sv, 0, usv, 2)

    def test_attach_inverts_splits(self):
        # reattaching the two sides of any split of a small tree restores
        # the unrooted isomorphism class
        for t in tk.enumerate_rooted(6):
            if t.size < 2:
                continue
            for s in tk.splits(t):
                # find matching attachment by trying all index pairs
                target = tk._unrooted_from_adj(tk.code_to_adjacency(t.code)).code
                found = False
                for vi in range(s.t_minus.size):
                    for ui in range(s.u_plus.size):
                        grown = tk.attach(s.t_minus, vi, s.u_plus, ui)
                        if tk._unrooted_from_adj(tk.code_to_adjacency(grown.code)).code == target:
                            found = True
                            break
                    if found:
                        break
                assert found, (t.code, s)


class TestCayley:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_identities(self, n):
        chk = tk.cayley_identity_check(n)
        assert chk.ok
        assert chk.rooted_sum == n ** (n - 1)
        assert chk.unrooted_sum == (1 if n == 1 else n ** (n - 2))

    def test_example_n3(self):
        chk = tk.cayley_identity_check(3)
        assert chk.rooted_sum == 9 and chk.unrooted_sum == 3


class TestCatalog:
    def test_standard_catalog(self):
        cat = tk.Catalog.standard(3, 2)
        assert len(cat.t0) == 4 and len(cat.u0) == 2
        assert cat.t_max == 3 and cat.u_max == 2 and cat.q_star == 2

    def test_rejects_missing_single_vertex(self):
        p2 = tk.canonicalize_unrooted([(1, 2)])
        with pytest.raises(tk.CatalogError):
            tk.Catalog(tk.enumerate_rooted(2), [p2])

    def test_rejects_non_inclusion_closed(self):
        t0 = [t for t in tk.enumerate_rooted(3) if t.size != 2]
        with pytest.raises(tk.CatalogError):
            tk.Catalog(t0, tk.enumerate_unrooted(1))

    def test_custom_downward_closed_subset(self):
        # single vertex, 2-path, 3-path rooted at an end: closed chain
        chain = [
            tk.canonicalize_rooted([], root=1),
            tk.canonicalize_rooted([(1, 2)], root=1),
            tk.canonicalize_rooted([(1, 2), (2, 3)], root=1),
        ]
        cat = tk.Catalog(chain, tk.enumerate_unrooted(1))
        assert cat.t_max == 3


class TestMarkedOrbits:
    def test_random_trees_orbit_counts_match_brute_force(self):
        rng = random.Random(11)
        for _ in range(20):
            n = rng.randrange(2, 8)
            edges = [(u + 1, v + 1) for u, v in oracles.prufer_edges(
                [rng.randrange(n) for _ in range(max(0, n - 2))], n)]
            adj, _ = tk._build_adjacency(edges)
            keys = tk._rooted_vertex_orbit_keys(adj, 0)
            # orbit of v under root-fixing automorphisms, brute force
            others = [v for v in range(n) if v != 0]
            edge_set = {(min(u, v), max(u, v)) for u in range(n) for v in adj[u]}
            orbit_of = {v: set() for v in range(n)}
            for perm in itertools.permutations(others):
                mapping = {0: 0}
                mapping.update(zip(others, perm))
                if all((min(mapping[a], mapping[b]), max(mapping[a], mapping[b])) in edge_set
                       for a, b in edge_set):
                    for v in range(n):
                        orbit_of[v].add(mapping[v])
            for v in range(n):
                assert keys.count(keys[v]) == len(orbit_of[v])
