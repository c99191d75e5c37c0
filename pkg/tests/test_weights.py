import math
import random
from fractions import Fraction

import pytest

from bridgeforest import treekit as tk
from bridgeforest import weights as wt

E_INV = math.exp(-1)


@pytest.fixture(scope="module")
def cat1():
    return tk.Catalog.standard(2, 1)


@pytest.fixture(scope="module")
def cat2():
    return tk.Catalog.standard(3, 2)


@pytest.fixture(scope="module")
def cat3():
    return tk.Catalog.standard(4, 3)


def random_rational_weights(catalog, rng, den=8, hi=12):
    return wt.WeightVector.over(
        catalog, {u.code: Fraction(rng.randrange(0, hi + 1), den) for u in catalog.u0}
    )


class TestWeightVector:
    def test_domain_validation(self, cat2):
        with pytest.raises(ValueError):
            wt.WeightVector.over(cat2, {"((()))": 1})

    def test_negative_rejected(self, cat2):
        with pytest.raises(ValueError):
            wt.WeightVector.over(cat2, {"()": -1})

    def test_exact_flag(self, cat2):
        assert wt.WeightVector.over(cat2, {"()": Fraction(1, 2)}).exact
        assert not wt.WeightVector.over(cat2, {"()": 0.5}).exact

    def test_zero(self, cat2):
        z = wt.WeightVector.zero(cat2)
        assert all(v == 0 for _, v in z.entries)


class TestMaxWeight:
    def test_single_vertex_base_case(self, cat1):
        z = wt.WeightVector.over(cat1, {"()": Fraction(2, 7)})
        v, trace = wt.max_weight(tk.enumerate_unrooted(1)[0], z, cat1)
        assert v == Fraction(2, 7)
        assert trace.steps[0].piece == "()"

    def test_single_piece_power(self, cat1):
        # u0 = {single vertex}: every tree decomposes vertex by vertex
        x = Fraction(1, 3)
        z = wt.WeightVector.over(cat1, {"()": x})
        for u in tk.enumerate_unrooted(6):
            v, _ = wt.max_weight(u, z, cat1)
            assert v == x**u.size

    def test_spec_pair_examples(self, cat2):
        a, b = Fraction(2, 5), Fraction(3, 7)
        z = wt.WeightVector.over(cat2, {"()": a, "(())": b})
        p3 = tk.canonicalize_unrooted([(1, 2), (2, 3)])
        s4 = tk.canonicalize_unrooted([(1, 2), (1, 3), (1, 4)])
        assert wt.max_weight(p3, z, cat2)[0] == max(a**3, a * b)
        assert wt.max_weight(s4, z, cat2)[0] == max(a**4, a**2 * b)

    def test_zero_weights_give_zero_and_empty_trace(self, cat2):
        z = wt.WeightVector.zero(cat2)
        p3 = tk.canonicalize_unrooted([(1, 2), (2, 3)])
        v, trace = wt.max_weight(p3, z, cat2)
        assert v == 0 and trace.steps == ()

    def test_accepts_rooted_codes(self, cat2):
        z = wt.WeightVector.over(cat2, {"()": Fraction(1, 2), "(())": Fraction(1, 3)})
        rooted = tk.canonicalize_rooted([(1, 2), (2, 3)], root=1)
        unrooted = tk.canonicalize_unrooted([(1, 2), (2, 3)])
        assert wt.max_weight(rooted, z, cat2)[0] == wt.max_weight(unrooted, z, cat2)[0]


class TestDecompositionOracle:
    def test_single_vertex_unique(self, cat2):
        decs = wt.enumerate_decompositions(tk.enumerate_unrooted(1)[0], cat2)
        assert len(decs) == 1

    def test_three_path_count(self, cat2):
        p3 = tk.canonicalize_unrooted([(1, 2), (2, 3)])
        decs = wt.enumerate_decompositions(p3, cat2)
        pieces = sorted(tuple(s.piece for s in d.steps) for d in decs)
        assert pieces == [
            ("(())", "()"),
            ("()", "(())"),
            ("()", "()", "()"),
        ]

    def test_replay_reconstructs(self, cat2):
        for u in tk.enumerate_unrooted(6):
            for d in wt.enumerate_decompositions(u, cat2):
                assert wt.replay_trace(d).code == u.code

    def test_size_bound(self, cat2):
        p9 = tk.canonicalize_unrooted([(i, i + 1) for i in range(1, 9)])
        with pytest.raises(tk.CapacityError):
            wt.enumerate_decompositions(p9, cat2)

    def test_dp_trace_is_a_valid_decomposition(self, cat2):
        rng = random.Random(5)
        for u in tk.enumerate_unrooted(7):
            z = random_rational_weights(cat2, rng)
            v, trace = wt.max_weight(u, z, cat2)
            if v > 0:
                assert wt.replay_trace(trace).code == u.code
                assert trace.weight(z) == v


class TestDPAgainstOracle:
    @pytest.mark.parametrize("tmax,umax", [(3, 2), (4, 3)])
    def test_max_weight_equals_oracle(self, tmax, umax):
        catalog = tk.Catalog.standard(tmax, umax)
        rng = random.Random(100 * tmax + umax)
        trees = tk.enumerate_unrooted(7)
        piece_counts = {
            u.code: [d.piece_counts() for d in wt.enumerate_decompositions(u, catalog)]
            for u in trees
        }
        for _ in range(12):
            z = random_rational_weights(catalog, rng)
            table = wt.MaxWeightTable(catalog, z)
            for u in trees:
                best = Fraction(0)
                for counts in piece_counts[u.code]:
                    w_val = Fraction(1)
                    for code, mult in counts.items():
                        w_val *= z[code] ** mult
                    best = max(best, w_val)
                assert table.value(u.code) == best, (u.code, z.entries)


class TestRootInvariance:
    def test_all_rootings_agree(self, cat2):
        rng = random.Random(9)
        for u in tk.enumerate_unrooted(7):
            z = random_rational_weights(cat2, rng)
            adj = tk.code_to_adjacency(u.code)
            values = set()
            for root in range(len(adj)):
                rooted = tk._rooted_from_adj(adj, root)
                values.add(wt.max_weight(rooted, z, cat2)[0])
            assert len(values) == 1


class TestScalingCovariance:
    @pytest.mark.parametrize("lam", [Fraction(0), Fraction(1, 3), Fraction(1), Fraction(2)])
    def test_scale_identity(self, cat2, lam):
        rng = random.Random(int(lam * 6))
        z = random_rational_weights(cat2, rng)
        scaled = wt.scale_weights(lam, z)
        for u in tk.enumerate_unrooted(6):
            direct = wt.max_weight(u, scaled, cat2)[0]
            expected = lam**u.size * wt.max_weight(u, z, cat2)[0]
            assert direct == expected

    def test_identity_and_zero(self, cat2):
        rng = random.Random(2)
        z = random_rational_weights(cat2, rng)
        assert wt.scale_weights(1, z).entries == z.entries
        assert all(v == 0 for _, v in wt.scale_weights(0, z).entries)


class TestClosure:
    def test_single_vertex_catalog_identity(self, cat1):
        z = wt.WeightVector.over(cat1, {"()": Fraction(2, 5)})
        assert wt.closure(z, cat1).entries == z.entries

    def test_example(self, cat2):
        z = wt.WeightVector.over(cat2, {"()": Fraction(1, 2), "(())": 0})
        closed = wt.closure(z, cat2)
        assert closed["(())"] == Fraction(1, 4)

    def test_pointwise_dominates_and_idempotent(self, cat3):
        rng = random.Random(4)
        for _ in range(10):
            z = random_rational_weights(cat3, rng)
            closed = wt.closure(z, cat3)
            assert all(cv >= v for (_, cv), (_, v) in zip(closed.entries, z.entries))
            assert wt.closure(closed, cat3).entries == closed.entries

    def test_preserves_max_weights_and_series(self, cat2):
        rng = random.Random(6)
        for _ in range(6):
            z = random_rational_weights(cat2, rng)
            closed = wt.closure(z, cat2)
            for u in tk.enumerate_unrooted(8):
                assert wt.max_weight(u, z, cat2)[0] == wt.max_weight(u, closed, cat2)[0]
            for k in (4, 8):
                assert wt.rooted_series(z, k, cat2) == wt.rooted_series(closed, k, cat2)


class TestSeries:
    def test_zero(self, cat2):
        z = wt.WeightVector.zero(cat2)
        assert wt.rooted_series(z, 5, cat2) == 0
        assert wt.unrooted_series(z, 5, cat2) == 0

    def test_single_variable_consistency_exact(self, cat1):
        x = Fraction(2, 7)
        z = wt.WeightVector.over(cat1, {"()": x})
        for k in range(1, 13):
            assert wt.rooted_series(z, k, cat1) == wt.single_variable_series(x, k)
            assert wt.unrooted_series(z, k, cat1) == wt.single_variable_series_unrooted(x, k)

    def test_closed_form_small_values(self):
        x = Fraction(1, 2)
        assert wt.single_variable_series(x, 3) == x + x**2 + Fraction(3, 2) * x**3
        assert wt.single_variable_series_unrooted(x, 3) == x + x**2 / 2 + x**3 / 2

    def test_family_series(self, cat1):
        x = Fraction(1, 3)
        z = wt.WeightVector.over(cat1, {"()": x})
        t0 = tk.enumerate_rooted(2)
        assert wt.rooted_series_family(z, t0, cat1) == x + x**2

    def test_family_requires_inclusion_closed(self, cat2):
        z = wt.WeightVector.zero(cat2)
        bad = [t for t in tk.enumerate_rooted(3) if t.size != 2]
        with pytest.raises(tk.CatalogError):
            wt.rooted_series_family(z, bad, cat2)

    def test_term_decomposition(self, cat2):
        rng = random.Random(8)
        z = random_rational_weights(cat2, rng)
        total = wt.rooted_series(z, 6, cat2)
        assert total == sum(wt.rooted_series_term(z, k, cat2) for k in range(1, 7))

    def test_series_report(self, cat2):
        rng = random.Random(55)
        z = random_rational_weights(cat2, rng)
        rep = wt.series_report(z, 5, cat2)
        assert rep["rooted_total"] == wt.rooted_series(z, 5, cat2)
        assert set(rep["per_size"]) == {1, 2, 3, 4, 5}
        assert sum(rep["per_size"].values()) == rep["rooted_total"]
        from bridgeforest import serialize

        assert serialize.dumps(rep)  # serializable end to end

    def test_piece_series(self, cat2):
        a, b = Fraction(1, 4), Fraction(1, 8)
        z = wt.WeightVector.over(cat2, {"()": a, "(())": b})
        assert wt.piece_series_linear(z, cat2) == Fraction(5, 16)
        assert wt.piece_series_weighted(z, cat2) == Fraction(5, 16)

    def test_piece_series_ordering(self, cat3):
        rng = random.Random(12)
        for _ in range(8):
            z = random_rational_weights(cat3, rng)
            assert wt.piece_series_linear(z, cat3) <= wt.piece_series_weighted(z, cat3)

    def test_monotone_in_z_and_k(self, cat2):
        rng = random.Random(13)
        for _ in range(6):
            z = random_rational_weights(cat2, rng)
            bumped = wt.WeightVector(
                tuple(
                    (c, v + Fraction(rng.randrange(0, 3), 8)) for c, v in z.entries
                )
            )
            for k in (3, 6):
                assert wt.rooted_series(z, k, cat2) <= wt.rooted_series(bumped, k, cat2)
                assert wt.unrooted_series(z, k, cat2) <= wt.unrooted_series(bumped, k, cat2)
            assert wt.rooted_series(z, 5, cat2) <= wt.rooted_series(z, 6, cat2)


class TestDissymmetry:
    def test_zero_vector(self, cat2):
        chk = wt.verify_dissymmetry_trunc(wt.WeightVector.zero(cat2), 6, cat2)
        assert chk.ok and chk.rooted == 0

    def test_single_variable_at_e_inverse(self, cat1):
        z = wt.WeightVector.over(cat1, {"()": E_INV})
        chk = wt.verify_dissymmetry_trunc(z, 12, cat1)
        assert chk.ok
        assert chk.rooted - chk.unrooted >= chk.half_square

    def test_random_rational_sweep(self, cat3):
        rng = random.Random(77)
        for _ in range(30):
            z = random_rational_weights(cat3, rng, den=16, hi=10)
            chk = wt.verify_dissymmetry_trunc(z, 8, cat3)
            assert chk.ok, z.entries


class TestSupermultiplicativity:
    def test_single_piece_equality(self, cat1):
        z = wt.WeightVector.over(cat1, {"()": Fraction(1, 2)})
        for u in tk.enumerate_unrooted(6):
            if u.size < 2:
                continue
            chk = wt.verify_supermultiplicativity(u, z, cat1)
            assert chk.ok

    def test_sweep_with_zero_coordinate(self, cat3):
        rng = random.Random(21)
        for _ in range(10):
            vals = {u.code: Fraction(rng.randrange(0, 9), 8) for u in cat3.u0}
            vals[rng.choice([u.code for u in cat3.u0])] = Fraction(0)
            z = wt.WeightVector.over(cat3, vals)
            for u in tk.enumerate_unrooted(7):
                if u.size < 2:
                    continue
                assert wt.verify_supermultiplicativity(u, z, cat3).ok


class TestEvaluator:
    def test_matches_exact_series(self, cat3):
        ev = wt.TruncatedSeriesEvaluator(cat3, 9)
        rng = random.Random(31)
        for _ in range(5):
            z = random_rational_weights(cat3, rng)
            om, layers = ev.evaluate(z.to_floats())
            for k in range(1, 10):
                exact = float(wt.rooted_series_term(z, k, cat3))
                assert abs(layers[k] - exact) <= 1e-9 * (1 + exact)

    def test_omega_matches_table(self, cat3):
        ev = wt.TruncatedSeriesEvaluator(cat3, 8)
        rng = random.Random(32)
        z = random_rational_weights(cat3, rng)
        table = wt.MaxWeightTable(cat3, z)
        om, _ = ev.evaluate(z.to_floats())
        for code, val in zip(ev.codes, om):
            assert abs(val - float(table.value(code))) <= 1e-12 * (1 + val)
