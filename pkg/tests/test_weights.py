"""Tests for gradings, weights, growth, and geometric checks."""

import math
import random

import numpy as np
import pytest

from superfractal.lieq import (
    QElement,
    StandardMonomial,
    bracket,
    enumerate_basis,
    square,
)
from superfractal.weights import (
    CapExceeded,
    DegenerateAngle,
    ad_nilpotency_probe,
    angle_partition_difference,
    compute_roots,
    fine_grading_check,
    growth_grid,
    growth_report,
    head_cap_for_weight,
    hilbert_q,
    lattice_share_report,
    local_nilpotency_probe,
    monomial_super_weight,
    monomial_weight,
    multidegree,
    nil_p_mapping_probe,
    oy1_direction,
    paraboloid_check,
    pivot_degree_closed_form,
    pivot_multidegree,
    pivot_multidegree_closed_form,
    pivots_on_paraboloid,
    plane_split,
    plane_split_check,
    points_rows,
    shift_multidegree,
    sigma_value,
    standard_weight_counts,
    transition_matrices,
    twisted_coordinates,
    weight_bounds_check,
    weight_lambda,
    weights,
)


def v(i, tail=(), check=True):
    mask = 0
    for t in tail:
        mask |= 1 << t
    return StandardMonomial(i, mask, check=check)


class TestRoots:
    def test_cubic_is_satisfied(self):
        r = compute_roots()
        lam, mu = r["lambda"], r["mu"]
        assert abs(lam**3 - lam - 2) < 1e-12
        assert abs(mu**3 - mu - 2) < 1e-12

    def test_root_relations(self):
        r = compute_roots()
        lam, mu = r["lambda"], r["mu"]
        assert abs(lam + 2 * mu.real) < 1e-12          # roots sum to zero
        assert abs(lam * abs(mu) ** 2 - 2) < 1e-10     # product of roots is 2
        assert abs(abs(mu) - math.sqrt(2 / lam)) < 1e-12
        assert abs(abs(mu) ** 2 - (lam**2 - 1)) < 1e-10

    def test_reference_values(self):
        r = compute_roots()
        assert abs(r["lambda"] - 1.5214) < 1e-4
        assert abs(r["mu"] - (-0.7607 + 0.8579j)) < 1e-3
        assert abs(r["abs_mu"] - 1.1466) < 1e-4
        assert abs(r["sigma"] - 3.0682) < 1e-4
        assert r["sigma"] == sigma_value()
        assert abs(r["sigma"] - math.log(r["lambda"]) / math.log(r["abs_mu"])) < 1e-14


class TestMultidegree:
    def test_generators(self):
        assert pivot_multidegree(0) == (1, 0, 0)
        assert pivot_multidegree(1) == (0, 1, 0)
        assert pivot_multidegree(2) == (0, 0, 1)

    def test_recurrence_values(self):
        assert pivot_multidegree(3) == (2, 1, 0)
        assert pivot_multidegree(4) == (0, 2, 1)
        assert pivot_multidegree(5) == (2, 1, 2)
        assert pivot_multidegree(7) == (2, 5, 4)
        assert pivot_multidegree(10) == (12, 16, 13)

    def test_recurrence_relation(self):
        for n in range(20):
            a = np.array(pivot_multidegree(n + 3))
            b = np.array(pivot_multidegree(n + 1)) + 2 * np.array(pivot_multidegree(n))
            assert (a == b).all()

    def test_monomial_multidegrees(self):
        # the head contributes positively, tail factors subtract
        assert multidegree(v(2, (0,), check=False)) == (-1, 0, 1)
        assert multidegree(v(4, (0, 1), check=False)) == (-1, 1, 1)
        assert multidegree(v(4, (0,), check=False)) == (-1, 2, 1)
        assert multidegree(v(5, (0, 3), check=False)) == (-1, 0, 2)
        assert multidegree(v(3, (0,))) == (1, 1, 0)

    def test_false_monomial_components_at_least_minus_one(self):
        from superfractal.lieq import false_monomials

        for head, tail in false_monomials():
            m = StandardMonomial(head, tail, check=False)
            assert min(multidegree(m)) >= -1

    def test_shift_formula(self):
        # shifting all indices by one maps (n1,n2,n3) to (2*n3, n1+n3, n2)
        for n in range(15):
            n1, n2, n3 = pivot_multidegree(n)
            assert shift_multidegree((n1, n2, n3)) == pivot_multidegree(n + 1)
        m = v(5, (0, 2))
        from superfractal.lieq import shift

        shifted = next(iter(shift(QElement.monomial(m)).support()))
        assert multidegree(shifted) == shift_multidegree(multidegree(m))

    def test_bracket_respects_grading(self):
        rng = random.Random(5)
        basis = enumerate_basis(8)
        for _ in range(12):
            a, b = rng.choice(basis), rng.choice(basis)
            ga = np.array(multidegree(a))
            gb = np.array(multidegree(b))
            out = bracket(QElement.monomial(a), QElement.monomial(b))
            for m in out.support():
                assert (np.array(multidegree(m)) == ga + gb).all(), (a, b, m)

    def test_square_doubles_grading(self):
        for m in [v(0), v(1), v(5, (0, 2))]:
            if m.parity() != 1:
                continue
            g = 2 * np.array(multidegree(m))
            for out in square(QElement.monomial(m)).support():
                assert (np.array(multidegree(out)) == g).all()


class TestWeights:
    def test_generator_weights(self):
        lam = weight_lambda()
        assert abs(monomial_weight(v(0)) - 1) < 1e-12
        assert abs(monomial_weight(v(1)) - lam) < 1e-12
        assert abs(monomial_weight(v(2)) - lam**2) < 1e-12

    def test_neck_weight_is_two(self):
        # wt(x1*v3) = lam^3 - lam = 2 exactly by the cubic
        assert abs(monomial_weight(v(3, (1,))) - 2) < 1e-12

    def test_twisted_coordinates_of_v0(self):
        assert np.allclose(twisted_coordinates(v(0)), (1.0, 1.0, 0.0))

    def test_weight_equals_lambda_power_combination(self):
        # wt computed through the integer multidegree must agree with the
        # direct power sum lam^head - sum(lam^i for i in tail)
        lam = weight_lambda()
        from superfractal.lieq import quasi_standard_shapes
        from superfractal.operators import indices_of

        for head, tail in quasi_standard_shapes(12):
            m = StandardMonomial(head, tail, check=False)
            direct = lam**head - sum(lam**i for i in indices_of(tail))
            assert abs(monomial_weight(m) - direct) < 1e-6, (head, tail)

    def test_super_weight_equals_mu_power_combination(self):
        mu = compute_roots()["mu"]
        from superfractal.lieq import quasi_standard_shapes
        from superfractal.operators import indices_of

        for head, tail in quasi_standard_shapes(10):
            m = StandardMonomial(head, tail, check=False)
            direct = mu**head - sum(mu**i for i in indices_of(tail))
            assert abs(monomial_super_weight(m) - direct) < 1e-6

    def test_weights_pair(self):
        # first triple: eigencoordinates (wt, swt, conjugate); second: twisted
        m = v(3, (0,))
        (z, y) = weights(m)
        lam = weight_lambda()
        assert abs(z[0] - (lam**3 - 1)) < 1e-12
        assert abs(z[1] - monomial_super_weight(m)) < 1e-12
        assert abs(z[2] - z[1].conjugate()) < 1e-12
        assert abs(y[0] - z[0]) < 1e-12
        assert abs(complex(y[1], y[2]) - z[1]) < 1e-12


class TestTransitionMatrices:
    def test_inverse_pair(self):
        B, C, Binv, Cinv = transition_matrices()
        assert np.abs(np.asarray(B) @ np.asarray(Binv) - np.eye(3)).max() < 1e-12
        assert np.abs(np.asarray(C) @ np.asarray(Cinv) - np.eye(3)).max() < 1e-12

    def test_real_matrix_reference_entries(self):
        _, C, _, Cinv = transition_matrices()
        ref_c = [[1.0, 1.521, 2.315], [1.0, -0.761, -0.157], [0.0, 0.858, -1.305]]
        ref_cinv = [[0.221, 0.779, 0.298], [0.256, -0.256, 0.485], [0.168, -0.168, -0.448]]
        assert np.abs(np.asarray(C) - np.asarray(ref_c)).max() < 2e-3
        assert np.abs(np.asarray(Cinv) - np.asarray(ref_cinv)).max() < 2e-3

    def test_axis_direction(self):
        _, C, _, _ = transition_matrices()
        image = np.asarray(C) @ np.array(oy1_direction(), float)
        assert abs(image[1]) < 1e-12 and abs(image[2]) < 1e-12
        assert image[0] > 0

    def test_twisted_matches_matrix_product(self):
        _, C, _, _ = transition_matrices()
        for m in enumerate_basis(9):
            y = np.array(twisted_coordinates(m))
            z = np.array(multidegree(m), float)
            assert np.abs(np.asarray(C) @ z - y).max() < 1e-9


class TestClosedForms:
    def test_multidegree_closed_form(self):
        for n in range(26):
            cf = pivot_multidegree_closed_form(n)
            assert np.abs(np.array(cf) - np.array(pivot_multidegree(n))).max() < 1e-6

    def test_degree_closed_form(self):
        for n in range(26):
            assert abs(pivot_degree_closed_form(n) - sum(pivot_multidegree(n))) < 1e-6


HILBERT_30 = [3, 6, 7, 11, 14, 15, 17, 18, 21, 25, 25, 26, 30, 32, 33,
              35, 35, 35, 38, 39, 38, 38, 39, 43, 44, 42, 47, 51, 50, 53]

MULTIGRADED = {
    1: {(1, 0, 0), (0, 1, 0), (0, 0, 1)},
    2: {(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)},
    3: {(2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1), (1, 0, 2), (0, 2, 1), (0, 1, 2)},
    4: {(3, 1, 0), (2, 2, 0), (2, 1, 1), (2, 0, 2), (1, 3, 0), (1, 2, 1),
        (1, 1, 2), (1, 0, 3), (0, 3, 1), (0, 2, 2), (0, 1, 3)},
    5: {(4, 1, 0), (3, 2, 0), (3, 1, 1), (2, 3, 0), (2, 2, 1), (2, 1, 2),
        (2, 0, 3), (1, 3, 1), (1, 2, 2), (1, 1, 3), (1, 0, 4), (0, 4, 1),
        (0, 3, 2), (0, 2, 3)},
    6: {(4, 2, 0), (4, 1, 1), (3, 3, 0), (3, 2, 1), (3, 1, 2), (2, 3, 1),
        (2, 2, 2), (2, 1, 3), (2, 0, 4), (1, 4, 1), (1, 3, 2), (1, 2, 3),
        (1, 1, 4), (0, 4, 2), (0, 3, 3)},
}


class TestHilbert:
    def test_totals_through_degree_30(self):
        _, totals = hilbert_q(30)
        assert totals == HILBERT_30

    def test_multigraded_components(self):
        gr, _ = hilbert_q(6)
        for d, want in MULTIGRADED.items():
            got = {g for g, c in gr.items() if sum(g) == d}
            assert got == want, d

    def test_all_small_components_are_one_dimensional(self):
        gr, _ = hilbert_q(6)
        assert set(gr.values()) == {1}


class TestFineGrading:
    def test_standard_monomials_distinct_up_to_20(self):
        rep = fine_grading_check(20, population="standard")
        assert rep["violations"] == []
        assert rep["stats"]["monomials"] == rep["stats"]["distinct"]

    def test_quasi_standard_monomials_distinct_up_to_12(self):
        rep = fine_grading_check(12, population="quasi")
        assert rep["violations"] == []
        assert rep["stats"]["monomials"] == 2538 + 24


class TestParaboloid:
    def test_q_monomials_inside(self):
        rep = paraboloid_check("Q", 25)
        assert rep["violations"] == 0
        assert rep["stats"]["max_ratio"] < 1

    def test_pivots_sit_on_surface(self):
        rep = pivots_on_paraboloid(25)
        assert rep["violations"] == []
        assert rep["stats"]["max_relative_error"] < 1e-6


class TestWeightBounds:
    def test_q_bounds_hold_up_to_20(self):
        rep = weight_bounds_check("Q", 20)
        assert rep["violations"] == []
        assert rep["stats"]["monomials"] > 600000


class TestGrowth:
    def test_q_and_k_slopes(self):
        grid = growth_grid(8, 16)
        counts = standard_weight_counts(grid)
        assert all(b > a for a, b in zip(counts, counts[1:]))
        slope = np.polyfit(np.log(grid), np.log(np.array(counts, float)), 1)[0]
        assert abs(slope - math.log(2, weight_lambda())) < 0.15
        k_counts = [2 * c + 2 for c in counts]
        k_slope = np.polyfit(np.log(grid), np.log(np.array(k_counts, float)), 1)[0]
        assert abs(k_slope - math.log(2, weight_lambda())) < 0.15

    def test_growth_report_q_k(self):
        rep = growth_report(algebras=("Q", "K"))
        assert rep["violations"] == []
        for name in ("Q", "K"):
            entry = rep["stats"]["bands"][name]
            assert abs(entry["slope"] - entry["target"]) < entry["tolerance"]

    def test_lattice_share_is_positive(self):
        rep = lattice_share_report(8, 12)
        assert rep["violations"] == []
        assert rep["stats"]["min_ratio"] > 0


class TestPlaneSplit:
    def test_split_is_a_partition(self):
        basis = enumerate_basis(10)
        pos, neg = plane_split(0.37, basis)
        assert len(pos) + len(neg) == len(basis)
        assert len(pos) > 0 and len(neg) > 0

    def test_degenerate_angle_raises(self):
        # swt(v0) = 1 is perpendicular to the direction of angle pi/2
        with pytest.raises(DegenerateAngle):
            plane_split(math.pi / 2, [v(0)])

    def test_split_check_at_reference_angle(self):
        rep = plane_split_check(0.37, max_head=12, seed=7, bracket_samples=60)
        assert rep["violations"] == []
        assert rep["stats"]["side_plus"] > 0 and rep["stats"]["side_minus"] > 0

    def test_angles_differ_on_a_pivot(self):
        diff = angle_partition_difference(0.37, 1.9, max_k=40)
        assert diff and min(diff) <= 40

    def test_nearby_angles_agree_on_all_small_pivots(self):
        assert angle_partition_difference(0.37, 0.3700001, max_k=25) == []


class TestLocalNilpotency:
    def test_single_generator(self):
        assert local_nilpotency_probe([QElement.monomial(v(0))]) == 3

    def test_empty(self):
        assert local_nilpotency_probe([]) == 0

    def test_same_side_pair(self):
        gens = [QElement.monomial(v(5)), QElement.monomial(v(3, (0,)))]
        assert local_nilpotency_probe(gens) == 6


class TestAdNilpotency:
    def test_zero_source(self):
        assert ad_nilpotency_probe(QElement(), [v(0)]) == 1

    def test_v0_against_small_targets(self):
        assert ad_nilpotency_probe(QElement.monomial(v(0)), enumerate_basis(10)) == 5

    def test_even_monomial_against_small_targets(self):
        a = QElement.monomial(v(3, (0,)))
        assert ad_nilpotency_probe(a, enumerate_basis(10)) == 3


class TestNilPMapping:
    def test_odd_generator(self):
        assert nil_p_mapping_probe(QElement.monomial(v(0))) == 2

    def test_sum_of_generators(self):
        assert nil_p_mapping_probe(QElement.monomial(v(0)) + QElement.monomial(v(1))) == 3

    def test_even_monomial(self):
        assert nil_p_mapping_probe(QElement.monomial(v(3, (0,)))) == 1

    def test_zero(self):
        assert nil_p_mapping_probe(QElement()) == 0


class TestHeadCap:
    def test_cap_is_sound_for_counting(self):
        # raising the cap may add monomials, but none below the threshold
        lam = weight_lambda()
        for k in (4, 5, 6):
            m = lam**k
            cap = head_cap_for_weight(m)
            small = {x for x in enumerate_basis(cap) if monomial_weight(x) <= m}
            large = {x for x in enumerate_basis(cap + 6) if monomial_weight(x) <= m}
            assert small == large

    def test_counts_match_direct_enumeration(self):
        lam = weight_lambda()
        grid = [lam**8, lam**9]
        counts = standard_weight_counts(grid)
        for m, c in zip(grid, counts):
            direct = sum(
                1
                for x in enumerate_basis(head_cap_for_weight(m) + 4)
                if monomial_weight(x) <= m
            )
            assert c == direct


class TestPointsRows:
    def test_row_shape_and_content(self):
        rows = points_rows(4)
        assert len(rows) == 9
        head, mtype, x1, x2, x3, y1, y2, y3, wt, abs_swt = rows[0]
        assert (head, mtype, x1, x2, x3) == (0, 1, 1, 0, 0)
        assert abs(wt - 1.0) < 1e-12 and abs(abs_swt - 1.0) < 1e-12

    def test_rows_match_weight_functions(self):
        rows = points_rows(6)
        basis = enumerate_basis(6)
        assert len(rows) == len(basis)
        for row, m in zip(rows, basis):
            assert row[0] == m.head
            assert row[1] == (2 if m.type2 else 1)
            assert row[2:5] == multidegree(m)
            assert abs(row[8] - monomial_weight(m)) < 1e-12
            assert abs(row[9] - abs(monomial_super_weight(m))) < 1e-12
