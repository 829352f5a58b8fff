"""Normal-ordered differential operators on a Grassmann algebra.

The Grassmann algebra has odd anticommuting generators x_0, x_1, ... with
x_i^2 = 0, and odd superderivatives d_0, d_1, ... with d_i(x_j) = delta_ij.
Every operator is kept in normal order: a sum of words

    coeff * x_{i1} ... x_{is} d_{j1} ... d_{jk}

with both index groups strictly ascending. Index sets are encoded as int
bitmasks, so a term key is the pair (xs_mask, ds_mask). Normal ordering uses
the rewrite rule d_i x_j -> deform * delta_ij - x_j d_i, where letters of
distinct index anticommute; deform = 1 is the plain operator algebra and
deform = t (a TPoly) its deformation.

Everything here is exact: coefficients are ints, Fractions, GF(p) elements,
or TPoly values. This module is the brute-force oracle for all higher layers.

Quick usage:

    >>> from superfractal.operators import d_op, x_op, compose
    >>> compose(d_op(0, 8), x_op(0, 8))          # 1 - x0*d0
    >>> apply_op(d_op(1, 8), grass_monomial([0, 1], 8))   # -x0
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, Tuple

from .scalars import format_scalar, parse_scalar

TermKey = Tuple[int, int]

# ---------------------------------------------------------------------------
# bitmask helpers
# ---------------------------------------------------------------------------


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        bit = 1 << i
        if m & bit:
            raise ValueError("repeated index %d" % i)
        m |= bit
    return m


def indices_of(mask: int) -> Tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _inv(u: int, v: int) -> int:
    """Number of pairs (a in u, b in v) with a > b (merge inversions)."""
    count = 0
    while v:
        low = v & -v
        b = low.bit_length() - 1
        v ^= low
        count += (u >> (b + 1)).bit_count()
    return count


def grassmann_mul(u: Iterable[int], v: Iterable[int]):
    """Multiply two Grassmann index sets.

    Returns (sign, merged ascending tuple) or None when a letter repeats.
    """
    mu, mv = mask_of(u), mask_of(v)
    if mu & mv:
        return None
    sign = -1 if _inv(mu, mv) & 1 else 1
    return sign, indices_of(mu | mv)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


class OperatorElement:
    """Sparse exact linear combination of normal-ordered terms.

    ``terms`` maps (xs_mask, ds_mask) to a nonzero coefficient. ``window``
    is the index truncation bound: all indices are < window. Equality
    compares term tables only.
    """

    __slots__ = ("terms", "window")

    def __init__(self, terms: Dict[TermKey, object], window: int):
        self.terms = terms
        self.window = window

    def __eq__(self, other):
        return isinstance(other, OperatorElement) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("OperatorElement is not hashable")

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def restrict(self, bound: int) -> "OperatorElement":
        """Keep only terms whose every index is < bound."""
        full = (1 << bound) - 1
        kept = {
            k: c
            for k, c in self.terms.items()
            if not (k[0] & ~full) and not (k[1] & ~full)
        }
        return OperatorElement(kept, min(self.window, bound))

    def max_index(self) -> int:
        """Largest index occurring in any term, or -1 for the zero element."""
        best = -1
        for xs, ds in self.terms:
            m = xs | ds
            if m:
                best = max(best, m.bit_length() - 1)
        return best

    def __repr__(self):
        return "OperatorElement(%s)" % format_operator(self)


def _checked(terms: Dict[TermKey, object], window: int) -> OperatorElement:
    bound = 1 << window
    for xs, ds in terms:
        if xs >= bound or ds >= bound:
            raise ValueError("window overflow: index >= %d" % window)
    return OperatorElement(terms, window)


def term_element(coeff, xs: Iterable[int], ds: Iterable[int], window: int) -> OperatorElement:
    if not coeff:
        return OperatorElement({}, window)
    return _checked({(mask_of(xs), mask_of(ds)): coeff}, window)


def zero_op(window: int) -> OperatorElement:
    return OperatorElement({}, window)


def unit_op(window: int, coeff=1) -> OperatorElement:
    return term_element(coeff, (), (), window)


def d_op(i: int, window: int) -> OperatorElement:
    return term_element(1, (), (i,), window)


def x_op(i: int, window: int) -> OperatorElement:
    return term_element(1, (i,), (), window)


def op_add(a: OperatorElement, b: OperatorElement) -> OperatorElement:
    out = dict(a.terms)
    for k, c in b.terms.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return OperatorElement(out, max(a.window, b.window))


def op_scale(a: OperatorElement, k) -> OperatorElement:
    if not k:
        return OperatorElement({}, a.window)
    return OperatorElement({t: k * c for t, c in a.terms.items()}, a.window)


def op_sub(a: OperatorElement, b: OperatorElement) -> OperatorElement:
    return op_add(a, op_scale(b, -1))


def term_parity(key: TermKey) -> int:
    return (key[0].bit_count() + key[1].bit_count()) & 1


def parity(a: OperatorElement):
    """0 or 1 for homogeneous elements, the string "mixed" otherwise.

    The zero element counts as even.
    """
    it = iter(a.terms)
    first = next(it, None)
    if first is None:
        return 0
    p = term_parity(first)
    for key in it:
        if term_parity(key) != p:
            return "mixed"
    return p


# ---------------------------------------------------------------------------
# composition (normal ordering)
# ---------------------------------------------------------------------------


def _accumulate(out: Dict[TermKey, object], key: TermKey, value) -> None:
    s = out.get(key, 0) + value
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def _compose_term_pair(out, a1, d1, c1, a2, d2, c2, deform, unit_deform, skip_empty=False):
    """Normal-order (x^a1 d^d1) * (x^a2 d^d2) into ``out``.

    Sums over contraction subsets S of d1 & a2. With skip_empty the S = {}
    term is omitted (used by the fused supercommutator, where the two
    no-contraction terms cancel exactly).
    """
    m = d1 & a2
    r2 = a2.bit_count()
    base = c1 * c2
    s = m
    while True:
        if s or not skip_empty:
            rest_d1 = d1 & ~s
            rest_a2 = a2 & ~s
            xs = a1 | rest_a2
            ds = rest_d1 | d2
            if not (a1 & rest_a2) and not (rest_d1 & d2):
                k_pass = rest_d1.bit_count()
                exp = (
                    k_pass * r2
                    + _inv(s, rest_d1)
                    + _inv(s, a2)
                    + _inv(a1, rest_a2)
                    + _inv(rest_d1, d2)
                )
                value = base
                if not unit_deform:
                    for _ in range(s.bit_count()):
                        value = deform * value
                if exp & 1:
                    value = -value
                _accumulate(out, (xs, ds), value)
        if not s:
            break
        s = (s - 1) & m
    return out


def compose(a: OperatorElement, b: OperatorElement, deform=1) -> OperatorElement:
    """Associative product of two operators, re-expressed in normal order."""
    if a.window != b.window:
        raise ValueError("compose requires a shared window")
    unit = deform == 1
    out: Dict[TermKey, object] = {}
    for (a1, d1), c1 in a.terms.items():
        for (a2, d2), c2 in b.terms.items():
            _compose_term_pair(out, a1, d1, c1, a2, d2, c2, deform, unit)
    return OperatorElement(out, a.window)


def supercommutator(a: OperatorElement, b: OperatorElement, deform=1) -> OperatorElement:
    """compose(a,b) - (-1)^{|a||b|} compose(b,a) for homogeneous a, b.

    Implemented in fused form: the no-contraction halves of the two products
    cancel identically, so only contraction terms are generated.
    """
    pa, pb = parity(a), parity(b)
    if pa == "mixed" or pb == "mixed":
        raise ValueError("supercommutator requires homogeneous arguments")
    if a.window != b.window:
        raise ValueError("supercommutator requires a shared window")
    flip = -1 if (pa and pb) else 1
    unit = deform == 1
    out: Dict[TermKey, object] = {}
    for (a1, d1), c1 in a.terms.items():
        for (a2, d2), c2 in b.terms.items():
            if d1 & a2:
                _compose_term_pair(out, a1, d1, c1, a2, d2, c2, deform, unit, skip_empty=True)
            if d2 & a1:
                _compose_term_pair(out, a2, d2, -flip * c2, a1, d1, c1, deform, unit, skip_empty=True)
    return OperatorElement(out, a.window)


def square_op(a: OperatorElement, deform=1) -> OperatorElement:
    """compose(a, a): the operator square (exact in any characteristic)."""
    return compose(a, a, deform)


# ---------------------------------------------------------------------------
# action on Grassmann polynomials
# ---------------------------------------------------------------------------


class GrassmannPolynomial:
    """Sparse exact Grassmann polynomial: {xs_mask: coeff}."""

    __slots__ = ("terms", "window")

    def __init__(self, terms: Dict[int, object], window: int):
        self.terms = terms
        self.window = window

    def __eq__(self, other):
        return isinstance(other, GrassmannPolynomial) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "GrassmannPolynomial(0)"
        parts = []
        for mask in sorted(self.terms, key=lambda m: (m.bit_count(), m)):
            c = format_scalar(self.terms[mask])
            word = "*".join("x%d" % i for i in indices_of(mask)) or "1"
            parts.append("%s*%s" % (c, word) if c not in ("1",) else word)
        return "GrassmannPolynomial(%s)" % " + ".join(parts)


def grass_monomial(indices: Iterable[int], window: int, coeff=1) -> GrassmannPolynomial:
    if not coeff:
        return GrassmannPolynomial({}, window)
    return GrassmannPolynomial({mask_of(indices): coeff}, window)


def grass_add(f: GrassmannPolynomial, g: GrassmannPolynomial) -> GrassmannPolynomial:
    out = dict(f.terms)
    for m, c in g.terms.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return GrassmannPolynomial(out, max(f.window, g.window))


def apply_op(a: OperatorElement, f: GrassmannPolynomial) -> GrassmannPolynomial:
    """Act with the operator on a Grassmann polynomial.

    In each word the derivative letters act first (rightmost letter first,
    as function composition reads), then the x letters multiply on the left.
    """
    if a.window != f.window:
        raise ValueError("apply requires a shared window")
    out: Dict[int, object] = {}
    for (xs, ds), c in a.terms.items():
        for g, cg in f.terms.items():
            if ds & ~g:
                continue
            sign = 0
            cur = g
            rest = ds
            # Apply single derivatives from the largest index down.
            while rest:
                j = rest.bit_length() - 1
                rest ^= 1 << j
                sign ^= (cur & ((1 << j) - 1)).bit_count() & 1
                cur ^= 1 << j
            if xs & cur:
                continue
            sign ^= _inv(xs, cur) & 1
            value = c * cg
            if sign:
                value = -value
            _accumulate_mask(out, xs | cur, value)
    return GrassmannPolynomial(out, f.window)


def _accumulate_mask(out: Dict[int, object], key: int, value) -> None:
    s = out.get(key, 0) + value
    if s:
        out[key] = s
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# serialization / printing
# ---------------------------------------------------------------------------


def _term_sort_key(item):
    (xs, ds), _ = item
    return (indices_of(xs), indices_of(ds))


def format_operator(a: OperatorElement) -> str:
    if not a.terms:
        return "0"
    parts = []
    for (xs, ds), c in sorted(a.terms.items(), key=_term_sort_key):
        letters = ["x%d" % i for i in indices_of(xs)] + ["d%d" % i for i in indices_of(ds)]
        word = "*".join(letters) or "1"
        cs = format_scalar(c)
        if cs == "1" and letters:
            parts.append(word)
        elif cs == "-1" and letters:
            parts.append("-" + word)
        elif letters:
            parts.append(cs + "*" + word)
        else:
            parts.append(cs)
    text = parts[0]
    for p in parts[1:]:
        text += " - " + p[1:] if p.startswith("-") else " + " + p
    return text


def to_canonical_json(a: OperatorElement) -> str:
    rows = [
        [format_scalar(c), list(indices_of(xs)), list(indices_of(ds))]
        for (xs, ds), c in sorted(a.terms.items(), key=_term_sort_key)
    ]
    return json.dumps({"window": a.window, "terms": rows}, separators=(",", ":"))


def from_canonical_json(text: str, char: int = 0) -> OperatorElement:
    data = json.loads(text)
    terms: Dict[TermKey, object] = {}
    for coeff, xs, ds in data["terms"]:
        c = parse_scalar(coeff, char)
        if c:
            terms[(mask_of(xs), mask_of(ds))] = c
    return OperatorElement(terms, data["window"])
