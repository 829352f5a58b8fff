"""Tests for the Lie-superalgebra engine: expansions, reduction, products."""

import random

import pytest

from superfractal.lieq import (
    FalseMonomialExtracted,
    NonzeroResidue,
    QElement,
    StandardMonomial,
    bracket,
    enumerate_basis,
    expand_element,
    expand_pivot,
    expand_standard,
    false_monomials,
    generate_closure,
    is_false,
    is_quasi_standard,
    monomial_from_json,
    monomial_json,
    monomial_text,
    normalize,
    quasi_standard_shapes,
    safe_window,
    shift,
    square,
)
from superfractal.linalg import sparse_rank
from superfractal.operators import OperatorElement, op_add, op_scale, term_element


def v(i, tail=()):
    mask = 0
    for t in tail:
        mask |= 1 << t
    return QElement.monomial(StandardMonomial(i, mask))


def op(*terms, window):
    out = OperatorElement({}, window)
    for coeff, xs, ds in terms:
        out = op_add(out, term_element(coeff, xs, ds, window))
    return out


class TestExpandPivot:
    def test_window_5(self):
        assert expand_pivot(0, 5) == op((1, [], [0]), (1, [0, 1], [3]), window=5)

    def test_window_8(self):
        assert expand_pivot(1, 8) == op(
            (1, [], [1]), (1, [1, 2], [4]), (1, [1, 2, 4, 5], [7]), window=8
        )

    def test_window_truncates_chain(self):
        assert expand_pivot(2, 3) == op((1, [], [2]), window=3)

    def test_index_must_be_inside_window(self):
        with pytest.raises(ValueError):
            expand_pivot(5, 5)

    def test_chain_grows_by_window(self):
        # every enlargement of the window appends terms, never rewrites old ones
        small = expand_pivot(0, 10)
        large = expand_pivot(0, 25)
        for key, coeff in small.terms.items():
            assert large.terms[key] == coeff

    def test_all_coefficients_are_one(self):
        for i in range(6):
            assert set(expand_pivot(i, 40).terms.values()) == {1}


class TestExpandStandard:
    def test_with_tail_factor(self):
        m = StandardMonomial(3, 0b1)  # x0*v3
        assert expand_standard(m, 8) == op((1, [0], [3]), (1, [0, 3, 4], [6]), window=8)

    def test_tail_blocks_overlapping_chain_links(self):
        # x2 in the tail kills every chain term of v1 that introduces x2
        m = StandardMonomial(1, 0)
        full = expand_standard(m, 8)
        assert len(full.terms) == 3
        blocked = StandardMonomial(1, 1 << 2, check=False)  # x2*v1
        assert expand_standard(blocked, 8) == op((1, [2], [1]), window=8)

    def test_expansion_coefficients_are_always_plus_one(self):
        # chain factors arrive as consecutive-index pairs, so a tail index can
        # never sit strictly inside one; the reordering sign is always even
        cases = [
            StandardMonomial(0, 0b1000, check=False),   # x3*v0
            StandardMonomial(3, 0b100010, check=False), # x1*x5*v3
            StandardMonomial(2, 0b1, check=False),      # x0*v2
        ]
        for m in cases:
            e = expand_standard(m, 18)
            assert set(e.terms.values()) == {1}, m

    def test_element_expansion_is_linear(self):
        a = v(0) + v(3).scale(2)
        e = expand_element(a, 12)
        assert e == op_add(expand_pivot(0, 12), op_scale(expand_pivot(3, 12), 2))


class TestFalseMonomials:
    def test_census_has_24_entries(self):
        fm = false_monomials()
        assert len(fm) == 24
        assert len(set(fm)) == 24

    def test_known_members(self):
        assert is_false(2, 0b1)          # x0*v2
        assert is_false(4, 0b1)          # x0*v4
        assert is_false(4, 0b11)         # x0*x1*v4
        assert is_false(5, 0b1001)       # x0*x3*v5
        assert is_false(7, 0b1001)       # x0*x3*v7
        assert is_false(7, 0b101101)     # x0*x2*x3*x5*v7 (type 2, neck x5)
        assert is_false(10, 0b100101001)

    def test_known_non_members(self):
        assert not is_false(4, 0b10)     # x1*v4
        assert not is_false(7, 0b11010)  # x1*x3*x4*v7
        assert not is_false(3, 0b1)      # x0*v3
        assert not is_false(13, 0b1001)  # heads beyond 10 are never false

    def test_false_implies_quasi_standard(self):
        for head, tail in false_monomials():
            assert is_quasi_standard(head, tail)

    def test_constructor_rejects_false_and_non_quasi(self):
        with pytest.raises(ValueError):
            StandardMonomial(2, 0b1)
        with pytest.raises(ValueError):
            StandardMonomial(1, 0b1)     # tail outside allowed range
        StandardMonomial(2, 0b1, check=False)  # escape hatch for analysis


class TestQuasiStandardShapes:
    def test_counts_small_heads(self):
        shapes = list(quasi_standard_shapes(4))
        # heads 0,1,2 bare; head 2 neck; head 3: tails in {0}; head 4: tails in {0,1} + neck x2
        by_head = {}
        for head, tail in shapes:
            by_head.setdefault(head, []).append(tail)
        assert sorted(by_head[0]) == [0]
        assert sorted(by_head[2]) == [0, 1]          # v2 and the neck x0*v2
        assert sorted(by_head[3]) == [0, 1, 2]       # v3, x0*v3, neck x1*v3
        assert len(by_head[4]) == 5                  # 4 type-1 + neck x2*v4

    def test_matches_predicate(self):
        for head, tail in quasi_standard_shapes(9):
            assert is_quasi_standard(head, tail)


class TestNormalize:
    def test_round_trip_every_standard_monomial(self):
        window = safe_window(12)
        for m in enumerate_basis(12):
            e = expand_standard(m, window)
            out = normalize(e)
            assert out.coeffs == {m: 1}, monomial_text(m)

    def test_scaled_combination(self):
        window = safe_window(9)
        a = v(4, (1,)).scale(3) - v(7)
        assert normalize(expand_element(a, window)).coeffs == a.coeffs

    def test_false_monomial_is_flagged(self):
        bad = StandardMonomial(2, 0b1, check=False)
        with pytest.raises(FalseMonomialExtracted):
            normalize(expand_standard(bad, 20))

    def test_garbage_leaves_residue(self):
        with pytest.raises(NonzeroResidue):
            normalize(term_element(1, [0], [1], 20))

    def test_zero(self):
        assert not normalize(OperatorElement({}, 20))


class TestRankAgainstEchelon:
    def test_quasi_standard_expansions_are_independent(self):
        # every quasi-standard shape, false ones included, expands to an
        # operator with a unique lead key, so the whole family has full rank;
        # falseness means absence from the generated algebra, not dependence
        shapes = [(h, t) for h, t in quasi_standard_shapes(10)]
        window = safe_window(10)
        rows = []
        for head, tail in shapes:
            m = StandardMonomial(head, tail, check=False)
            rows.append(dict(expand_standard(m, window).terms))
        assert sparse_rank(rows) == len(shapes)

    def test_false_monomials_all_sit_below_the_closure_cap(self):
        # the closure comparison at weight cap lambda^8 therefore certifies
        # the full census: none of these shapes is ever produced
        from superfractal.weights import monomial_weight, weight_lambda

        cap = weight_lambda() ** 8
        for head, tail in false_monomials():
            m = StandardMonomial(head, tail, check=False)
            assert monomial_weight(m) < cap, (head, tail)


class TestBasicProducts:
    def test_pivot_squares(self):
        for i in range(12):
            assert square(v(i)).coeffs == v(i + 3, (i + 1,)).coeffs

    def test_adjacent_brackets(self):
        for i in range(12):
            assert bracket(v(i), v(i + 1)).coeffs == v(i + 3, (i,)).scale(-1).coeffs

    def test_square_bracket(self):
        for i in range(8):
            assert bracket(square(v(i)), v(i + 1)).coeffs == v(i + 3).scale(-1).coeffs

    def test_distance_two(self):
        for i in range(8):
            assert (
                bracket(v(i), v(i + 2)).coeffs
                == v(i + 5, (i, i + 1, i + 2)).scale(-1).coeffs
            )

    def test_mixed_square(self):
        got = square(v(0) + v(1))
        want = v(3, (1,)) + v(4, (2,)) - v(3, (0,))
        assert got.coeffs == want.coeffs

    def test_square_rejects_even_in_char_zero(self):
        with pytest.raises(ValueError):
            square(v(3, (0,)))  # x0*v3 is even

    def test_char_two_square_of_even_element(self):
        assert not square(v(3, (0,)), 2)


def _interval_product(i, j):
    """Closed form for [v_i, v_j], valid for any j >= i."""
    k, r = divmod(j - i, 3)
    if r == 0:
        tail = []
        for n in range(k):
            tail += [i + 3 * n, i + 3 * n + 1]
        tail.append(i + 3 * k + 1)
        return v(i + 3 * k + 3, tail).scale(2)
    if r == 1:
        tail = []
        for n in range(k):
            tail += [i + 3 * n, i + 3 * n + 1]
        tail.append(i + 3 * k)
        return v(i + 3 * k + 3, tail).scale(-1)
    tail = []
    for n in range(k + 1):
        tail += [i + 3 * n, i + 3 * n + 1]
    tail.append(i + 3 * k + 2)
    return v(i + 3 * k + 5, tail).scale(-1)


class TestPivotBracketFamilies:
    def test_all_offsets_small_range(self):
        for i in range(6):
            for j in range(i, i + 13):
                got = bracket(v(i), v(j))
                assert got.coeffs == _interval_product(i, j).coeffs, (i, j)

    def test_self_bracket_is_twice_square(self):
        for i in range(5):
            assert bracket(v(i), v(i)).coeffs == square(v(i)).scale(2).coeffs


class TestSuperalgebraIdentities:
    def _random_monomials(self, seed, count, max_head):
        rng = random.Random(seed)
        basis = enumerate_basis(max_head)
        return [rng.choice(basis) for _ in range(count)]

    def test_super_anticommutativity(self):
        ms = self._random_monomials(11, 24, 9)
        for a, b in zip(ms[::2], ms[1::2]):
            ea, eb = QElement.monomial(a), QElement.monomial(b)
            sign = (-1) ** (a.parity() * b.parity())
            total = bracket(ea, eb) + bracket(eb, ea).scale(sign)
            assert not total, (a, b)

    def test_super_jacobi(self):
        ms = self._random_monomials(12, 30, 8)
        for a, b, c in zip(ms[::3], ms[1::3], ms[2::3]):
            ea, eb, ec = (QElement.monomial(m) for m in (a, b, c))
            sign = (-1) ** (a.parity() * b.parity())
            lhs = bracket(ea, bracket(eb, ec))
            rhs = bracket(bracket(ea, eb), ec) + bracket(eb, bracket(ea, ec)).scale(sign)
            assert not (lhs - rhs), (a, b, c)

    def test_square_is_quadratic_part_of_bracket(self):
        # [a, b] with a = b odd equals 2 a.a; mixed sums expand consistently
        a = v(0) + v(4).scale(3)
        assert bracket(a, a).coeffs == square(a).scale(2).coeffs


class TestShift:
    def test_homomorphism_on_brackets(self):
        pairs = [(0, 1), (0, 3), (2, 5), (1, 6), (3, 3)]
        for i, j in pairs:
            assert shift(bracket(v(i), v(j))).coeffs == bracket(v(i + 1), v(j + 1)).coeffs

    def test_homomorphism_on_squares(self):
        for i in range(4):
            assert shift(square(v(i))).coeffs == square(v(i + 1)).coeffs

    def test_multi_step(self):
        m = StandardMonomial(5, 0b1001, check=False)
        s = shift(QElement.monomial(m), 3)
        ((m3, c),) = list(s.items())
        assert (m3.head, m3.tail, c) == (8, 0b1001000, 1)


class TestEnumerateBasis:
    def test_count_heads_up_to_12(self):
        assert len(enumerate_basis(12)) == 2538

    def test_small_prefix(self):
        names = [monomial_text(m) for m in enumerate_basis(3)]
        assert names == ["v0", "v1", "v2", "v3", "x0*v3", "x1*v3"]

    def test_no_false_monomials_included(self):
        for m in enumerate_basis(12):
            assert not is_false(m.head, m.tail)

    def test_type2_shape(self):
        for m in enumerate_basis(12):
            if m.type2:
                neck = m.head - 2
                assert m.tail >> neck == 1
                if m.head >= 3:
                    assert not m.tail & (1 << (m.head - 3))
                if m.head >= 4:
                    assert not m.tail & (1 << (m.head - 4))

    def test_char_two_keeps_necks_only(self):
        b2 = enumerate_basis(9, char=2)
        type2 = [m for m in b2 if m.type2]
        assert all(m.tail == 1 << (m.head - 2) for m in type2)
        assert {m.head for m in type2} == {3, 4, 5, 6, 7, 8, 9}
        type1 = [m for m in b2 if not m.type2]
        chk0 = [m for m in enumerate_basis(9) if not m.type2]
        assert type1 == chk0


class TestGenerateClosure:
    def test_matches_enumeration_at_weight_cap(self):
        from superfractal.weights import head_cap_for_weight, monomial_weight, weight_lambda

        cap = weight_lambda() ** 7
        got = generate_closure([v(0), v(1), v(2)], cap)
        want = {
            m
            for m in enumerate_basis(head_cap_for_weight(cap) + 6)
            if monomial_weight(m) <= cap
        }
        assert set(got) == want

    def test_char_two_closure(self):
        from superfractal.weights import head_cap_for_weight, monomial_weight, weight_lambda

        cap = weight_lambda() ** 6
        got = generate_closure([v(0), v(1), v(2)], cap, char=2)
        want = {
            m
            for m in enumerate_basis(head_cap_for_weight(cap) + 6, char=2)
            if monomial_weight(m) <= cap
        }
        assert set(got) == want


class TestSerialization:
    def test_text_and_json_round_trip(self):
        m = StandardMonomial(5, 0b101)
        assert monomial_text(m) == "x0*x2*v5"
        assert monomial_json(m) == [[0, 2], 5]
        assert monomial_from_json([[0, 2], 5]) == m

    def test_repr_shows_coefficients(self):
        e = v(3, (0,)).scale(-2) + v(1)
        assert repr(e) == "QElement(v1 - 2*x0*v3)"
