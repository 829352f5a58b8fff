"""Unit tests for the operator core: normal ordering, signs, action, parity."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superfractal.operators import (
    GrassmannPolynomial,
    OperatorElement,
    apply_op,
    compose,
    d_op,
    from_canonical_json,
    grass_add,
    grass_monomial,
    grassmann_mul,
    indices_of,
    mask_of,
    op_add,
    op_scale,
    op_sub,
    parity,
    supercommutator,
    term_element,
    to_canonical_json,
    unit_op,
    x_op,
    zero_op,
)
from superfractal.scalars import TPoly, prime_field

W = 12


def op(coeff, xs, ds, window=W):
    return term_element(coeff, xs, ds, window)


# ---------------------------------------------------------------------------
# grassmann_mul
# ---------------------------------------------------------------------------


def test_grassmann_mul_sorted():
    assert grassmann_mul([0], [1]) == (1, (0, 1))


def test_grassmann_mul_transposition():
    assert grassmann_mul([1], [0]) == (-1, (0, 1))


def test_grassmann_mul_repeated_letter():
    assert grassmann_mul([0, 1], [1]) is None


def test_grassmann_mul_longer():
    # x2x5 * x0x3: x2 passes x0 (1), x5 passes x0,x3 (2) -> 3 inversions
    assert grassmann_mul([2, 5], [0, 3]) == (-1, (0, 2, 3, 5))


# ---------------------------------------------------------------------------
# compose: pinned examples
# ---------------------------------------------------------------------------


def test_compose_d0_x0():
    # d0 * x0 = 1 - x0 d0
    got = compose(d_op(0, W), x_op(0, W))
    want = op_add(unit_op(W), op(-1, [0], [0]))
    assert got == want


def test_compose_contraction_with_spectators():
    # d0 * (x0 x1 d3) = x1 d3 + x0 x1 d0 d3
    got = compose(d_op(0, W), op(1, [0, 1], [3]))
    want = op_add(op(1, [1], [3]), op(1, [0, 1], [0, 3]))
    assert got == want


def test_compose_reversed_order_no_contraction():
    # (x0 x1 d3) * d0 = -x0 x1 d0 d3 (one swap to sort d3 d0)
    got = compose(op(1, [0, 1], [3]), d_op(0, W))
    assert got == op(-1, [0, 1], [0, 3])


def test_compose_unit():
    a = op_add(op(3, [0, 2], [1, 5]), op(-2, [], [4]))
    assert compose(a, unit_op(W)) == a
    assert compose(unit_op(W), a) == a


def test_compose_squares_vanish():
    assert not compose(x_op(0, W), x_op(0, W))
    assert not compose(d_op(3, W), d_op(3, W))


def test_compose_window_mismatch():
    with pytest.raises(ValueError):
        compose(d_op(0, 5), d_op(0, 6))


def test_window_overflow_on_construction():
    with pytest.raises(ValueError):
        term_element(1, [7], [], 7)


# ---------------------------------------------------------------------------
# compose: randomized associativity and faithfulness of the action
# ---------------------------------------------------------------------------


def random_element(rng, nterms=3, top=7, window=W):
    total = zero_op(window)
    for _ in range(nterms):
        xs = [i for i in range(top) if rng.random() < 0.3]
        ds = [i for i in range(top) if rng.random() < 0.3]
        total = op_add(total, op(rng.choice([-2, -1, 1, 2, 3]), xs, ds, window))
    return total


def random_poly(rng, nterms=3, top=7, window=W):
    total = GrassmannPolynomial({}, window)
    for _ in range(nterms):
        mask = [i for i in range(top) if rng.random() < 0.4]
        total = grass_add(total, grass_monomial(mask, window, rng.choice([-1, 1, 2])))
    return total


def test_associativity_randomized():
    rng = random.Random(20260815)
    for _ in range(60):
        a, b, c = (random_element(rng) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_action_faithful_randomized():
    rng = random.Random(97)
    for _ in range(60):
        a, b = random_element(rng), random_element(rng)
        f = random_poly(rng)
        assert apply_op(compose(a, b), f) == apply_op(a, apply_op(b, f))


def test_action_is_linear_in_operator():
    rng = random.Random(5)
    a, b = random_element(rng), random_element(rng)
    f = random_poly(rng)
    lhs = apply_op(op_add(a, b), f)
    rhs = grass_add(apply_op(a, f), apply_op(b, f))
    assert lhs == rhs


# ---------------------------------------------------------------------------
# supercommutator
# ---------------------------------------------------------------------------


def naive_supercommutator(a, b):
    pa, pb = parity(a), parity(b)
    flip = -1 if (pa == 1 and pb == 1) else 1
    return op_sub(compose(a, b), op_scale(compose(b, a), flip))


def test_supercommutator_d0_x0():
    assert supercommutator(d_op(0, W), x_op(0, W)) == unit_op(W)


def test_supercommutator_odd_letters_anticommute():
    assert not supercommutator(x_op(0, W), x_op(1, W))


def test_supercommutator_even_self_bracket():
    a = op(1, [0], [1])
    assert not supercommutator(a, a)


def test_supercommutator_rejects_mixed():
    mixed = op_add(unit_op(W), d_op(0, W))
    with pytest.raises(ValueError):
        supercommutator(mixed, d_op(0, W))


def random_homogeneous(rng, par, nterms=3, top=7, window=W):
    total = zero_op(window)
    while not total:
        total = zero_op(window)
        for _ in range(nterms):
            while True:
                xs = [i for i in range(top) if rng.random() < 0.3]
                ds = [i for i in range(top) if rng.random() < 0.3]
                if (len(xs) + len(ds)) % 2 == par:
                    break
            total = op_add(total, op(rng.choice([-2, -1, 1, 2]), xs, ds, window))
    return total


def test_fused_supercommutator_matches_naive():
    rng = random.Random(31337)
    for _ in range(120):
        a = random_homogeneous(rng, rng.randrange(2))
        b = random_homogeneous(rng, rng.randrange(2))
        assert supercommutator(a, b) == naive_supercommutator(a, b)


def test_super_jacobi_randomized():
    # [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
    rng = random.Random(777)
    for _ in range(40):
        pa, pb = rng.randrange(2), rng.randrange(2)
        a = random_homogeneous(rng, pa)
        b = random_homogeneous(rng, pb)
        c = random_homogeneous(rng, rng.randrange(2))
        lhs = supercommutator(a, supercommutator(b, c))
        rhs = op_add(
            supercommutator(supercommutator(a, b), c),
            op_scale(supercommutator(b, supercommutator(a, c)), -1 if pa and pb else 1),
        )
        assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_letter_relations(i, j, k):
    # d_i x_j + x_j d_i = delta_ij as operators
    lhs = op_add(compose(d_op(i, 8), x_op(j, 8)), compose(x_op(j, 8), d_op(i, 8)))
    assert lhs == (unit_op(8) if i == j else zero_op(8))
    # and all relations hold under the action on a random word
    rng = random.Random(100 * i + 10 * j + k)
    f = random_poly(rng, window=8)
    assert apply_op(lhs, f) == (f if i == j else GrassmannPolynomial({}, 8))


# ---------------------------------------------------------------------------
# apply
# ---------------------------------------------------------------------------


def test_apply_derivative_sign():
    # d1 (x0 x1) = -x0: d1 passes the odd letter x0
    got = apply_op(d_op(1, W), grass_monomial([0, 1], W))
    assert got == grass_monomial([0], W, -1)


def test_apply_left_multiplication_sign():
    # x2 acting on x0 gives x2 x0 = -x0 x2
    got = apply_op(x_op(2, W), grass_monomial([0], W))
    assert got == grass_monomial([0, 2], W, -1)


def test_apply_two_derivatives_order():
    # (d0 d3)(x0 x3): rightmost first: d3 kills x3 with sign -1, then d0 kills x0
    got = apply_op(op(1, [], [0, 3]), grass_monomial([0, 3], W))
    assert got == grass_monomial([], W, -1)


# ---------------------------------------------------------------------------
# parity
# ---------------------------------------------------------------------------


def test_parity_values():
    assert parity(op(1, [0, 1], [3])) == 1
    assert parity(op_add(d_op(0, W), op(1, [0, 1], [3]))) == 1
    assert parity(op_add(unit_op(W), d_op(0, W))) == "mixed"
    assert parity(zero_op(W)) == 0


# ---------------------------------------------------------------------------
# scalars: prime fields and deformation polynomials
# ---------------------------------------------------------------------------


def test_prime_field_arithmetic():
    F2 = prime_field(2)
    assert F2(1) + F2(1) == 0
    assert F2(1) + 1 == 0
    assert 3 * F2(1) == 1
    assert -F2(1) == 1
    F5 = prime_field(5)
    assert F5(2) / F5(3) == F5(4)
    assert isinstance(2 * F5(3), F5)


def test_char2_compose():
    F2 = prime_field(2)
    a = term_element(F2(1), [], [0], W)
    b = term_element(F2(1), [0], [], W)
    got = compose(a, b)
    want = op_add(unit_op(W, F2(1)), term_element(F2(1), [0], [0], W))
    assert got == want


def test_tpoly_basics():
    t = TPoly.t()
    p = (t + 1) * (t - 1)
    assert p == t * t - 1
    assert not (t * t - 1).divisible_by_t(1)
    assert (t * t + 2 * t).divisible_by_t(1)
    assert not (t * t + 2 * t).divisible_by_t(2)
    assert p.subs_t(3) == 8


def test_deformed_compose():
    t = TPoly.t()
    got = compose(d_op(0, W), x_op(0, W), deform=t)
    want = op_add(unit_op(W, t), op(-1, [0], [0]))
    assert got == want
    # deform = 1 recovers the plain product
    undeformed = {k: (v.subs_t(1) if isinstance(v, TPoly) else v) for k, v in got.terms.items()}
    assert OperatorElement(undeformed, W) == compose(d_op(0, W), x_op(0, W))


# ---------------------------------------------------------------------------
# serialization and window restriction
# ---------------------------------------------------------------------------


def test_canonical_json_roundtrip():
    rng = random.Random(12)
    a = random_element(rng)
    text = to_canonical_json(a)
    back = from_canonical_json(text)
    assert back == a and back.window == a.window


def test_canonical_json_sorted_deterministic():
    a = op_add(op(2, [1], [0]), op(-1, [0], [2]))
    b = op_add(op(-1, [0], [2]), op(2, [1], [0]))
    assert to_canonical_json(a) == to_canonical_json(b)


def test_restrict_drops_high_terms():
    a = op_add(op(1, [0], [3]), op(1, [9], []))
    r = a.restrict(8)
    assert r == op(1, [0], [3], 8)


def test_window_stability_compose():
    # recomputing at window N and N+6 agrees on all indices < N - 6
    rng = random.Random(4242)
    for _ in range(20):
        a_small, b_small = random_element(rng, window=W), random_element(rng, window=W)
        a_big = OperatorElement(dict(a_small.terms), W + 6)
        b_big = OperatorElement(dict(b_small.terms), W + 6)
        small = compose(a_small, b_small).restrict(W - 6)
        big = compose(a_big, b_big).restrict(W - 6)
        assert small == big


def test_mask_helpers():
    assert indices_of(mask_of([5, 0, 3])) == (0, 3, 5)
    with pytest.raises(ValueError):
        mask_of([1, 1])
