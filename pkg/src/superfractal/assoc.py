"""Associative hull of the fractal Lie superalgebra.

The hull A is the unital associative algebra of Grassmann differential
operators generated by the three pivots v_0, v_1, v_2.  Its basis consists of
the unit together with operator replicas of the Poisson basis monomials,
written with lowercase pivot letters:

    x_0^{a_0} .. x_{n-2}^{a_{n-2}} v_0^{b_0} .. v_{n-1}^{b_{n-1}} v_n

subject to exactly the same shape restrictions.  Grassmann letters multiply
on the left and pivots compose in increasing index order, so the highest
derivative-order part of an expansion reproduces the Poisson expansion of the
same shape while contractions contribute terms of strictly smaller
derivative order.  Products are therefore normalized by a triangular
elimination that peels leading terms of highest derivative order first
(``normalize_A``); the same shapes serve characteristic 0 and 2.

A is filtered by A^m, the span of at most m-fold products of standard
monomials.  The associated graded algebra is supercommutative and matches
the Poisson algebra level by level: an A-basis monomial with k pivot letters
lies in A^k, and its class modulo A^{k-1} corresponds to the Poisson basis
monomial of the same shape.  ``gr_compare`` verifies the componentwise
dimension match by independent rank computations, and detects the strict gap
at level one in characteristic 2, where the Lie side loses the type-2
monomials that are not bare pivot squares.

Replacing the contraction unit by a formal parameter t deforms the
composition (``quantized_product``): modulo t the product degenerates to the
supercommutative Poisson product, and the first-order term in t of the
deformed supercommutator recovers the Poisson bracket.
"""

from typing import Dict, List, Optional, Sequence, Tuple

from .lieq import (
    NonzeroResidue,
    StandardMonomial,
    enumerate_basis,
    expand_pivot,
    expand_standard,
    safe_window,
)
from .linalg import Echelon, in_span, sparse_rank
from .operators import OperatorElement, compose, indices_of
from .poisson import (
    P_UNIT,
    PBasisMonomial,
    PoissonElement,
    assoc_mul,
    basis_P,
    p_basis_under_weight,
    p_monomial_from_json,
    p_monomial_from_text,
    p_monomial_json,
    p_monomial_text,
    p_monomial_weight,
    p_multidegree,
    p_shape_reason,
    p_shift_monomial,
    poisson_bracket,
)
from .scalars import TPoly, coercer, format_scalar
from . import weights

# ---------------------------------------------------------------------------
# basis monomials
# ---------------------------------------------------------------------------

# A-basis monomials carry the same data and restrictions as Poisson basis
# monomials; only the rendered pivot letter differs.
ABasisMonomial = PBasisMonomial

A_UNIT = P_UNIT


def a_monomial_text(m: ABasisMonomial) -> str:
    return p_monomial_text(m).replace("V", "v")


def a_monomial_from_text(text: str, check: bool = True) -> ABasisMonomial:
    return p_monomial_from_text(text.replace("v", "V"), check)


def a_monomial_json(m: ABasisMonomial) -> list:
    return p_monomial_json(m)


def a_monomial_from_json(data: Sequence) -> ABasisMonomial:
    return p_monomial_from_json(data)


a_multidegree = p_multidegree

a_monomial_weight = p_monomial_weight

a_shift_monomial = p_shift_monomial


def basis_A(max_length: int, char: int = 0) -> List[ABasisMonomial]:
    """All basis monomials of length (head index) at most ``max_length``.

    The shapes do not depend on the characteristic: the type-2 monomials
    missing from the Lie side in characteristic 2 are still reached by
    associative products, so the list is shared by char 0 and char 2.
    """
    if char not in (0, 2):
        raise ValueError("characteristic must be 0 or 2")
    return basis_P(max_length)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


class AElement:
    """Sparse exact linear combination of A-basis monomials."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[ABasisMonomial, object] | None = None):
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c}

    @staticmethod
    def monomial(m: ABasisMonomial, coeff=1) -> "AElement":
        return AElement({m: coeff})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, AElement) and self.coeffs == other.coeffs

    def __add__(self, other: "AElement") -> "AElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return AElement(out)

    def __sub__(self, other: "AElement") -> "AElement":
        return self + other.scale(-1)

    def scale(self, k) -> "AElement":
        if not k:
            return AElement()
        return AElement({m: k * c for m, c in self.coeffs.items()})

    def items(self):
        return self.coeffs.items()

    def support(self):
        return self.coeffs.keys()

    def max_head(self) -> int:
        return max((m.head for m in self.coeffs), default=-1)

    def parity(self):
        parities = {m.parity() for m in self.coeffs}
        if not parities:
            return 0
        if len(parities) > 1:
            return "mixed"
        return parities.pop()

    def __repr__(self):
        if not self.coeffs:
            return "AElement(0)"
        parts = []
        for m in sorted(self.coeffs):
            cs = format_scalar(self.coeffs[m])
            if cs == "1":
                parts.append(a_monomial_text(m))
            elif cs == "-1":
                parts.append("-" + a_monomial_text(m))
            else:
                parts.append(cs + "*" + a_monomial_text(m))
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return "AElement(%s)" % text


def unit_A(coeff=1) -> AElement:
    return AElement({A_UNIT: coeff})


def a_shift_element(a: AElement, k: int = 1) -> AElement:
    return AElement({a_shift_monomial(m, k): c for m, c in a.items()})


# ---------------------------------------------------------------------------
# expansion into operators
# ---------------------------------------------------------------------------


def a_expand(m: ABasisMonomial, window: int, char: int = 0) -> OperatorElement:
    """Windowed operator expansion of a basis monomial.

    The Grassmann prefix multiplies on the left, then the pivots compose in
    increasing index order with the head pivot last.  The leading term is
    (alpha, ys_mask) with coefficient +1; every other term has either the
    same derivative order and a larger pivot-letter mask, or a strictly
    smaller derivative order (contractions).
    """
    one = coercer(char)(1)
    if m.is_unit:
        return OperatorElement({(0, 0): one}, window)
    if m.head >= window:
        raise ValueError("window %d too small for head %d" % (window, m.head))
    acc = OperatorElement({(m.alpha, 0): one}, window)
    for b in indices_of(m.ys_mask()):
        acc = compose(acc, expand_pivot(b, window, char))
    return acc


def a_expand_element(a: AElement, window: int, char: int = 0) -> OperatorElement:
    out: Dict[Tuple[int, int], object] = {}
    for m, c in a.items():
        for key, unit in a_expand(m, window, char).terms.items():
            s = out.get(key, 0) + c * unit
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return OperatorElement(out, window)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def normalize_A(w: OperatorElement, char: int = 0) -> AElement:
    """Coordinates of an operator in the A-basis.

    Triangular elimination: repeatedly take, among the terms of highest
    derivative order, the one with the smallest pivot-letter mask.  It must
    be the leading term of a unique basis monomial, whose expansion is
    subtracted.  Remaining terms of the same order have strictly larger
    masks and terms of smaller order are handled later, so the loop
    terminates.  Terms that reach the unsafe top of the window or fail the
    shape restrictions leave a nonzero residue.
    """
    window = w.window
    bound = window - 6
    rem = {k: c for k, c in w.terms.items() if c}
    coeffs: Dict[ABasisMonomial, object] = {}
    while rem:
        order = max(k[1].bit_count() for k in rem)
        key = min((k for k in rem if k[1].bit_count() == order), key=lambda k: (k[1], k[0]))
        xs, ds = key
        if ds == 0:
            if xs == 0:
                coeffs[A_UNIT] = rem.pop(key)
                continue
            raise NonzeroResidue(
                "pure Grassmann multiplication term x-mask %d" % xs,
                OperatorElement(rem, window),
            )
        head = ds.bit_length() - 1
        if head >= bound:
            raise NonzeroResidue(
                "window %d too small: leading head %d" % (window, head),
                OperatorElement(rem, window),
            )
        beta = ds ^ (1 << head)
        reason = p_shape_reason(head, xs, beta)
        if reason is not None:
            raise NonzeroResidue(
                "leading term is not a basis shape (%s)" % reason,
                OperatorElement(rem, window),
            )
        c = rem[key]
        m = ABasisMonomial(head, xs, beta, check=False)
        for k2, c2 in a_expand(m, window, char).terms.items():
            s = rem.get(k2, 0) - c * c2
            if s:
                rem[k2] = s
            else:
                rem.pop(k2, None)
        coeffs[m] = c
    return AElement(coeffs)


def a_product(a: AElement, b: AElement, char: int = 0, window: Optional[int] = None) -> AElement:
    """Associative product of two A-elements in basis coordinates."""
    if window is None:
        window = safe_window(max(a.max_head(), b.max_head(), 2), factors=2)
    op = compose(
        a_expand_element(a, window, char),
        a_expand_element(b, window, char),
    )
    return normalize_A(op, char)


# ---------------------------------------------------------------------------
# product filtration
# ---------------------------------------------------------------------------

_WEIGHT_TOL = 1e-6


def _standard_pool(weight_budget: float) -> List[Tuple[float, StandardMonomial]]:
    """Standard monomials of weight at most the budget, sorted by weight."""
    if weight_budget < 1 - _WEIGHT_TOL:
        return []
    pool = []
    for m in enumerate_basis(weights.head_cap_for_weight(weight_budget)):
        wt = weights.monomial_weight(m)
        if wt <= weight_budget + _WEIGHT_TOL:
            pool.append((wt, m))
    pool.sort(key=lambda p: (p[0], p[1].head, p[1].tail))
    return pool


def _gr3_sum(g1: Tuple[int, int, int], g2: Tuple[int, int, int]) -> Tuple[int, int, int]:
    return (g1[0] + g2[0], g1[1] + g2[1], g1[2] + g2[2])


def filtration_degree(a: AElement, cap: int = 4, char: int = 0) -> int:
    """Least m with ``a`` in the span of at most m-fold products of standard
    monomials.

    The search runs per multidegree block: factor multisets must add up to
    the block multidegree, which pins their total weight, so the product
    enumeration is pruned by weight.  Raises ``weights.CapExceeded`` when no
    m up to ``cap`` works.
    """
    if not a:
        return 0
    blocks: Dict[Tuple[int, int, int], Dict[ABasisMonomial, object]] = {}
    for m, c in a.items():
        blocks.setdefault(p_multidegree(m), {})[m] = c
    degree = 0
    for g, target in sorted(blocks.items()):
        degree = max(degree, _block_degree(g, target, cap, char))
    return degree


def _block_degree(g, target, cap, char) -> int:
    if set(target) == {A_UNIT}:
        return 0
    budget = weights.weight_of_multidegree(g)
    pool = _standard_pool(budget)
    window = safe_window(max((m.head for _, m in pool), default=2), factors=max(cap, 2))
    expansions = [expand_standard(m, window, char) for _, m in pool]
    degrees = [weights.multidegree(m) for _, m in pool]
    rows_by_m: Dict[int, List[Dict[ABasisMonomial, object]]] = {k: [] for k in range(1, cap + 1)}

    def descend(start: int, depth: int, wt_left: float, gr: Tuple[int, int, int], op):
        for i in range(start, len(pool)):
            wt = pool[i][0]
            if wt > wt_left + _WEIGHT_TOL:
                break
            nxt = expansions[i] if op is None else compose(op, expansions[i])
            gr2 = _gr3_sum(gr, degrees[i])
            if gr2 == g and abs(wt_left - wt) <= _WEIGHT_TOL:
                rows_by_m[depth].append(normalize_A(nxt, char).coeffs)
            if depth < cap:
                descend(i, depth + 1, wt_left - wt, gr2, nxt)

    descend(0, 1, budget, (0, 0, 0), None)
    rows: List[Dict[ABasisMonomial, object]] = []
    for m in range(1, cap + 1):
        rows.extend(rows_by_m[m])
        if in_span(rows, target, char):
            return m
    raise weights.CapExceeded(
        "element lies outside the span of %d-fold products in its block %s" % (cap, (g,))
    )


def gr_compare(weight_cap: Optional[float] = None, max_level: int = 3, char: int = 0) -> dict:
    """Compare the graded algebra of the product filtration with the Poisson
    algebra, block by block.

    For characteristic 0 the report lists every multidegree block of weight
    at most ``weight_cap`` where the rank of at most m-fold products differs
    from the count of Poisson basis monomials with at most m pivot letters,
    for m up to ``max_level``; the claim is that there are none.  For
    characteristic 2 the comparison runs at level one only, where the span
    of all standard-shape operators strictly exceeds the image of the Lie
    side; the report lists the gap instead of failing.
    """
    lam = weights.compute_roots()["lambda"]
    cap = lam ** 8 if weight_cap is None else float(weight_cap)
    if char == 2:
        return _gr_compare_char2(cap)
    if char != 0:
        raise ValueError("characteristic must be 0 or 2")
    pool = _standard_pool(cap)
    window = safe_window(max((m.head for _, m in pool), default=2), factors=max_level)
    expansions = [expand_standard(m, window) for _, m in pool]
    degrees = [weights.multidegree(m) for _, m in pool]

    rows: Dict[Tuple[int, Tuple[int, int, int]], List[Dict[ABasisMonomial, object]]] = {}
    products = 0

    def descend(start: int, depth: int, wt_left: float, gr, op):
        nonlocal products
        for i in range(start, len(pool)):
            wt = pool[i][0]
            if wt > wt_left + _WEIGHT_TOL:
                break
            nxt = expansions[i] if op is None else compose(op, expansions[i])
            gr2 = _gr3_sum(gr, degrees[i])
            rows.setdefault((depth, gr2), []).append(normalize_A(nxt).coeffs)
            products += 1
            if depth < max_level:
                descend(i, depth + 1, wt_left - wt, gr2, nxt)

    descend(0, 1, cap, (0, 0, 0), None)

    p_counts: Dict[Tuple[int, Tuple[int, int, int]], int] = {}
    for m in p_basis_under_weight(cap):
        key = (m.level(), p_multidegree(m))
        p_counts[key] = p_counts.get(key, 0) + 1

    block_set = {g for _level, g in rows} | {g for _level, g in p_counts}
    mismatches = []
    checked = 0
    for g in sorted(block_set):
        ech = Echelon(char=0)
        cum = 0
        for m in range(1, max_level + 1):
            for row in rows.get((m, g), ()):
                ech.insert(row)
            cum += p_counts.get((m, g), 0)
            checked += 1
            if len(ech) != cum:
                mismatches.append(
                    {
                        "multidegree": list(g),
                        "level": m,
                        "rank": len(ech),
                        "poisson_dim": cum,
                    }
                )
    return {
        "check": "gr_compare",
        "char": 0,
        "weight_cap": cap,
        "max_level": max_level,
        "blocks": len(block_set),
        "products": products,
        "components_checked": checked,
        "mismatches": mismatches,
        "ok": not mismatches,
    }


def _gr_compare_char2(cap: float) -> dict:
    """Level-one comparison in characteristic 2.

    The span of all standard-shape operators (they all lie in the hull, by
    squaring and multiplying pivots) is compared against the image of the
    Lie side, whose basis keeps only type-1 monomials and bare necks.  The
    inclusion is proper; the report flags the gap instead of failing.
    """
    pool = _standard_pool(cap)
    window = safe_window(max((m.head for _, m in pool), default=2), factors=2)
    a_rows: Dict[Tuple[int, int, int], List[dict]] = {}
    a_shapes = set()
    for _wt, m in pool:
        a_shapes.add((m.head, m.tail))
        a_rows.setdefault(weights.multidegree(m), []).append(
            expand_standard(m, window, 2).terms
        )
    lie_shapes = set()
    p_rows: Dict[Tuple[int, int, int], List[dict]] = {}
    for m in enumerate_basis(weights.head_cap_for_weight(cap), char=2):
        if weights.monomial_weight(m) <= cap + _WEIGHT_TOL:
            lie_shapes.add((m.head, m.tail))
            p_rows.setdefault(weights.multidegree(m), []).append(
                expand_standard(m, window, 2).terms
            )
    gap_total = 0
    gap_blocks = []
    contained = True
    for g in sorted(set(a_rows) | set(p_rows)):
        rows_a = a_rows.get(g, [])
        rows_p = p_rows.get(g, [])
        ra = sparse_rank(rows_a, char=2)
        rp = sparse_rank(rows_p, char=2)
        for row in rows_p:
            if not in_span(rows_a, row, char=2):
                contained = False
        if ra != rp:
            gap_total += ra - rp
            gap_blocks.append({"multidegree": list(g), "rank": ra, "lie_dim": rp})
    witnesses = sorted(a_shapes - lie_shapes)
    witness_texts = [
        a_monomial_text(ABasisMonomial(h, t, 0, check=False)) for h, t in witnesses[:6]
    ]
    return {
        "check": "gr_compare",
        "char": 2,
        "level": 1,
        "weight_cap": cap,
        "blocks": len(set(a_rows) | set(p_rows)),
        "lie_contained": contained,
        "gap_total": gap_total,
        "gap_blocks": gap_blocks,
        "witnesses": witness_texts,
        "strict_inclusion_detected": contained and gap_total > 0,
        "ok": contained and gap_total > 0,
    }


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------


def _symbol(w: OperatorElement) -> PoissonElement:
    """Symbol map: read each normal-ordered operator term as an H-monomial."""
    return PoissonElement(dict(w.terms), w.window)


def _as_tpoly(c) -> TPoly:
    return c if isinstance(c, TPoly) else TPoly.const(c)


def _tpoly_difference(lhs: Dict, rhs: Dict) -> Dict[Tuple[int, int], TPoly]:
    out = {k: _as_tpoly(c) for k, c in lhs.items()}
    for k, c in rhs.items():
        s = out.get(k, TPoly()) - c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def quantized_product(a: AElement, b: AElement, window: Optional[int] = None) -> OperatorElement:
    """Composition with the contraction unit replaced by a formal parameter t.

    Every contraction in the normal-ordering rewrite is weighted by one
    power of t, so coefficients are exact polynomials in t: at t = 1 this is
    the plain composition, modulo t it is the supercommutative symbol
    product, and the coefficient of t in the deformed supercommutator is the
    Poisson bracket of the symbols.  Characteristic 0 scalars.
    """
    if window is None:
        window = safe_window(max(a.max_head(), b.max_head(), 2), factors=2)
    return compose(
        a_expand_element(a, window),
        a_expand_element(b, window),
        deform=TPoly.t(),
    )


def quantization_check(a: ABasisMonomial, b: ABasisMonomial, window: Optional[int] = None) -> dict:
    """Verify the two deformation axioms on a pair of basis monomials.

    mod t: the deformed product agrees with the supercommutative product of
    the symbols.  mod t^2: the deformed supercommutator agrees with t times
    the Poisson bracket of the symbols.  Both are exact polynomial
    divisibility statements.
    """
    if window is None:
        window = safe_window(max(a.head, b.head, 2), factors=2)
    ea = a_expand(a, window)
    eb = a_expand(b, window)
    star_ab = compose(ea, eb, deform=TPoly.t())
    star_ba = compose(eb, ea, deform=TPoly.t())
    sa = _symbol(ea)
    sb = _symbol(eb)
    classical = assoc_mul(sa, sb)
    diff1 = _tpoly_difference(star_ab.terms, classical.terms)
    mod_t = all(c.divisible_by_t(1) for c in diff1.values())
    sign = -1 if (a.parity() and b.parity()) else 1
    anti = {k: sign * c for k, c in star_ba.terms.items()}
    lhs = _tpoly_difference(star_ab.terms, anti)
    t = TPoly.t()
    scaled = {k: t * c for k, c in poisson_bracket(sa, sb).terms.items()}
    diff2 = _tpoly_difference(lhs, scaled)
    mod_t2 = all(c.divisible_by_t(2) for c in diff2.values())
    return {"mod_t": mod_t, "mod_t2": mod_t2}
