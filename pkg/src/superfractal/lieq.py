"""The Lie superalgebra Q = Lie(v0, v1, v2) in its standard-monomial basis.

The pivot elements are the odd operators v_i = d_i + x_i x_{i+1} v_{i+3},
expanded inside a finite window as

    v_i = d_i + x_i x_{i+1} d_{i+3} + x_i x_{i+1} x_{i+3} x_{i+4} d_{i+6} + ...

(the chain prefix skips every letter of index i+3n+2). A standard monomial
is a word tail * v_n: first type with tail inside {0..n-3}, second type with
the neck letter x_{n-2} present, x_{n-3}, x_{n-4} absent and the rest inside
{0..n-5}, minus 24 explicitly false monomials. Standard monomials form a
basis of Q; this module computes brackets and squares through the operator
oracle (expand, supercommute, normalize back to the basis).

Windows follow the safe rule N >= max_head + 3 * (number of factors) + 12;
brackets use N = max_head + 18.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Tuple

from .operators import (
    OperatorElement,
    _inv,
    compose,
    indices_of,
    mask_of,
    supercommutator,
)
from .scalars import coercer

# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------


class NonzeroResidue(Exception):
    """normalize() input is not in the span of standard monomials."""


class FalseMonomialExtracted(Exception):
    """normalize() elimination produced a false monomial: corrupted input."""


# ---------------------------------------------------------------------------
# monomials
# ---------------------------------------------------------------------------


class StandardMonomial:
    """tail * v_head with the tail encoded as a bitmask."""

    __slots__ = ("head", "tail")

    def __init__(self, head: int, tail: int | Iterable[int] = 0, check: bool = True):
        if not isinstance(tail, int):
            tail = mask_of(tail)
        if check:
            if not is_quasi_standard(head, tail):
                raise ValueError("not a quasi-standard shape: head %d tail %s" % (head, indices_of(tail)))
            if is_false(head, tail):
                raise ValueError("false monomial: head %d tail %s" % (head, indices_of(tail)))
        self.head = head
        self.tail = tail

    @property
    def type2(self) -> bool:
        return self.head >= 2 and bool((self.tail >> (self.head - 2)) & 1)

    @property
    def length(self) -> int:
        return self.head

    def parity(self) -> int:
        return (self.tail.bit_count() + 1) & 1

    def key(self) -> Tuple[int, int]:
        return (self.head, self.tail)

    def __eq__(self, other):
        return (
            isinstance(other, StandardMonomial)
            and self.head == other.head
            and self.tail == other.tail
        )

    def __hash__(self):
        return hash((self.head, self.tail))

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return monomial_text(self)


def is_quasi_standard(head: int, tail: int) -> bool:
    """Shape test: one of the two standard-monomial forms, falsity ignored."""
    if head < 0 or tail < 0:
        return False
    if tail and tail.bit_length() > max(head - 1, 0):
        return False  # letters above x_{head-2} never occur
    if head >= 2 and (tail >> (head - 2)) & 1:
        rest = tail ^ (1 << (head - 2))
        if head >= 3 and (rest >> (head - 3)) & 1:
            return False
        if head >= 4 and (rest >> (head - 4)) & 1:
            return False
        return not rest or rest.bit_length() <= max(head - 4, 0)
    return not tail or tail.bit_length() <= max(head - 2, 0)


_FALSE_HEAD7_T1 = (1 << 0) | (1 << 3)
_FALSE_HEAD10_T2 = (1 << 0) | (1 << 3) | (1 << 5)


def is_false(head: int, tail: int) -> bool:
    """True exactly on the 24 excluded quasi-standard monomials."""
    if head >= 2 and (tail >> (head - 2)) & 1:
        if head == 2:
            return True  # x0*v2
        if head == 5:
            return bool(tail & 1)  # x0*x3*v5
        if head == 7:
            return bool(tail & 1)  # x0*(x1*)(x2*)x5*v7: 4 monomials
        if head == 10:
            # x0*(x1*)(x2*)x3*(x4*)x5*x8*v10: 8 monomials
            return (tail & _FALSE_HEAD10_T2) == _FALSE_HEAD10_T2
        return False
    if head == 4:
        return bool(tail & 1)  # x0*v4, x0*x1*v4
    if head == 7:
        # both x0 and x3 present: 8 monomials
        return (tail & _FALSE_HEAD7_T1) == _FALSE_HEAD7_T1
    return False


def monomial_text(m: StandardMonomial) -> str:
    parts = ["x%d" % i for i in indices_of(m.tail)]
    parts.append("v%d" % m.head)
    return "*".join(parts)


def monomial_json(m: StandardMonomial) -> list:
    return [list(indices_of(m.tail)), m.head]


def monomial_from_json(data: Sequence) -> StandardMonomial:
    tail, head = data
    return StandardMonomial(head, mask_of(tail))


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


class QElement:
    """Sparse exact linear combination of standard monomials."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[StandardMonomial, object] | None = None):
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c}

    @staticmethod
    def monomial(m: StandardMonomial, coeff=1) -> "QElement":
        return QElement({m: coeff})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, QElement) and self.coeffs == other.coeffs

    def __add__(self, other: "QElement") -> "QElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return QElement(out)

    def __sub__(self, other: "QElement") -> "QElement":
        return self + other.scale(-1)

    def scale(self, k) -> "QElement":
        if not k:
            return QElement()
        return QElement({m: k * c for m, c in self.coeffs.items()})

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

    def homogeneous_parts(self) -> list:
        even = {m: c for m, c in self.coeffs.items() if m.parity() == 0}
        odd = {m: c for m, c in self.coeffs.items() if m.parity() == 1}
        return [QElement(p) for p in (even, odd) if p]

    def __repr__(self):
        if not self.coeffs:
            return "QElement(0)"
        from .scalars import format_scalar

        parts = []
        for m in sorted(self.coeffs):
            cs = format_scalar(self.coeffs[m])
            if cs == "1":
                parts.append(monomial_text(m))
            elif cs == "-1":
                parts.append("-" + monomial_text(m))
            else:
                parts.append(cs + "*" + monomial_text(m))
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return "QElement(%s)" % text


# ---------------------------------------------------------------------------
# expansions
# ---------------------------------------------------------------------------

_chain_cache: Dict[int, List[Tuple[int, int]]] = {}


def _pivot_terms(i: int, window: int) -> List[Tuple[int, int]]:
    """Windowed term keys (xs_mask, d_index) of v_i; cached, prefix-nested."""
    lst = _chain_cache.get(i)
    if lst is None:
        lst = _chain_cache[i] = []
    k = len(lst)
    while i + 3 * k < window:
        if k == 0:
            mask = 0
        else:
            prev = i + 3 * (k - 1)
            mask = lst[k - 1][0] | (1 << prev) | (1 << (prev + 1))
        lst.append((mask, i + 3 * k))
        k += 1
    out = []
    for mask, dj in lst:
        if dj >= window:
            break
        out.append((mask, dj))
    return out


def expand_pivot(i: int, window: int, char: int = 0) -> OperatorElement:
    """Windowed operator expansion of the pivot v_i."""
    if i >= window:
        raise ValueError("window %d too small for pivot %d" % (window, i))
    one = coercer(char)(1)
    terms = {(mask, 1 << dj): one for mask, dj in _pivot_terms(i, window)}
    return OperatorElement(terms, window)


def expand_standard(m: StandardMonomial, window: int, char: int = 0) -> OperatorElement:
    """Windowed operator expansion of tail * v_head (tail multiplies on the left)."""
    if m.head >= window:
        raise ValueError("window %d too small for head %d" % (window, m.head))
    one = coercer(char)(1)
    tail = m.tail
    terms = {}
    for mask, dj in _pivot_terms(m.head, window):
        if tail & mask:
            continue  # repeated Grassmann letter: the term cancels
        sign = _inv(tail, mask) & 1
        terms[(tail | mask, 1 << dj)] = -one if sign else one
    return OperatorElement(terms, window)


def expand_element(a: QElement, window: int, char: int = 0) -> OperatorElement:
    out: Dict[Tuple[int, int], object] = {}
    for m, c in a.items():
        for key, unit in expand_standard(m, window, char).terms.items():
            s = out.get(key, 0) + c * unit
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return OperatorElement(out, window)


def safe_window(max_head: int, factors: int = 2) -> int:
    return max_head + 3 * factors + 12


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def normalize(w: OperatorElement, char: int = 0) -> QElement:
    """Coordinates of a first-order operator in the standard basis.

    Triangular elimination by increasing derivative index: once lower heads
    are stripped, every remaining single-derivative term at index h is the
    leading term of a unique standard monomial of head h. The residue must
    vanish on all indices below window - 6.
    """
    window = w.window
    buckets: Dict[int, Dict[int, object]] = {}
    for (xs, ds), c in w.terms.items():
        if ds.bit_count() != 1:
            raise NonzeroResidue("not a first-order operator: ds %s" % (indices_of(ds),))
        buckets.setdefault(ds.bit_length() - 1, {})[xs] = c
    bound = window - 6
    out: Dict[StandardMonomial, object] = {}
    for h in range(bound):
        bucket = buckets.get(h)
        if not bucket:
            continue
        for tail, c in list(bucket.items()):
            if not c:
                continue
            if not is_quasi_standard(h, tail):
                raise NonzeroResidue(
                    "unexpected leading term x%s d%d" % (list(indices_of(tail)), h)
                )
            if is_false(h, tail):
                raise FalseMonomialExtracted(
                    "false monomial head %d tail %s" % (h, list(indices_of(tail)))
                )
            m = StandardMonomial(h, tail, check=False)
            out[m] = c
            for mask, dj in _pivot_terms(h, window):
                if tail & mask:
                    continue
                sub = buckets.setdefault(dj, {})
                value = -c if (_inv(tail, mask) & 1) else c
                key = tail | mask
                s = sub.get(key, 0) - value
                if s:
                    sub[key] = s
                else:
                    sub.pop(key, None)
        if buckets.get(h):
            raise NonzeroResidue("bucket at head %d not cleared" % h)
    # anything left lives at derivative index >= bound: the allowed residue
    return QElement(out)


# ---------------------------------------------------------------------------
# bracket, square
# ---------------------------------------------------------------------------


def bracket(a: QElement, b: QElement, char: int = 0, window: int | None = None) -> QElement:
    """Lie superbracket, through the operator oracle."""
    if not a or not b:
        return QElement()
    if window is None:
        window = max(a.max_head(), b.max_head()) + 18
    out = QElement()
    for ah in a.homogeneous_parts():
        ea = expand_element(ah, window, char)
        for bh in b.homogeneous_parts():
            eb = expand_element(bh, window, char)
            out = out + normalize(supercommutator(ea, eb), char)
    return out


def square(a: QElement, char: int = 0, window: int | None = None) -> QElement:
    """Formal square of an odd element: normalize(e_a composed with e_a).

    In characteristic 0 this equals half the self-bracket; in characteristic
    2 it is the restricted-square operation. Exact in both, with no division.
    Over F2 the formal square e compose e is accepted for any parity, since
    the p-th power map there acts on the whole algebra.
    """
    if not a:
        return QElement()
    if char != 2 and a.parity() != 1:
        raise ValueError("square is defined for odd elements")
    if window is None:
        window = a.max_head() + 18
    ea = expand_element(a, window, char)
    return normalize(compose(ea, ea), char)


def shift(a: QElement, k: int = 1) -> QElement:
    """The endomorphism sending every index i to i + k."""
    out = {}
    for m, c in a.items():
        out[StandardMonomial(m.head + k, m.tail << k, check=False)] = c
    return QElement(out)


def shift_monomial(m: StandardMonomial, k: int = 1) -> StandardMonomial:
    return StandardMonomial(m.head + k, m.tail << k, check=False)


# ---------------------------------------------------------------------------
# basis enumeration and closure
# ---------------------------------------------------------------------------


def _subsets_of(indices: Sequence[int]):
    n = len(indices)
    for bits in range(1 << n):
        mask = 0
        b = bits
        pos = 0
        while b:
            if b & 1:
                mask |= 1 << indices[pos]
            b >>= 1
            pos += 1
        yield mask


def enumerate_basis(max_length: int, char: int = 0) -> List[StandardMonomial]:
    """All standard monomials with head <= max_length, in (head, tail) order.

    In characteristic 2 the basis is the first-type monomials plus the bare
    pivot squares x_{n-2} v_n, n >= 3.
    """
    out: List[StandardMonomial] = []
    for head in range(max_length + 1):
        heads_here: List[int] = []
        # first type: tail inside {0..head-3}
        free1 = list(range(max(head - 2, 0)))
        for tail in _subsets_of(free1):
            if not is_false(head, tail):
                heads_here.append(tail)
        # second type: neck x_{head-2}, rest inside {0..head-5}
        if head >= 2:
            neck = 1 << (head - 2)
            if char == 2:
                if head >= 3:
                    heads_here.append(neck)
            else:
                free2 = list(range(max(head - 4, 0)))
                for rest in _subsets_of(free2):
                    tail = neck | rest
                    if not is_false(head, tail):
                        heads_here.append(tail)
        heads_here.sort()
        out.extend(StandardMonomial(head, t, check=False) for t in heads_here)
    return out


def quasi_standard_shapes(max_head: int):
    """All quasi-standard (head, tail_mask) pairs with head <= max_head."""
    for head in range(max_head + 1):
        for tail in _subsets_of(list(range(max(head - 2, 0)))):
            yield head, tail
        if head >= 2:
            neck = 1 << (head - 2)
            for rest in _subsets_of(list(range(max(head - 4, 0)))):
                yield head, neck | rest


def false_monomials(max_head: int = 12) -> List[Tuple[int, int]]:
    """The 24 excluded quasi-standard shapes, as (head, tail_mask) pairs."""
    return [
        (head, tail)
        for head, tail in quasi_standard_shapes(max_head)
        if is_false(head, tail)
    ]


def generate_closure(generators: Sequence[QElement], weight_cap: float, char: int = 0) -> List[StandardMonomial]:
    """Standard monomials reachable from the generators by brackets and squares.

    Results above the weight cap are discarded; weights are positive and add
    under products, so nothing below the cap is ever reached through an
    above-cap intermediate and the truncated closure hits a fixed point.
    """
    import math

    from .weights import monomial_weight, weight_lambda

    lam = weight_lambda()
    head_cap = 5 + max(0, math.ceil(math.log(weight_cap, lam)))
    window = head_cap + 18
    expansions: Dict[StandardMonomial, OperatorElement] = {}

    def expansion(m: StandardMonomial) -> OperatorElement:
        e = expansions.get(m)
        if e is None:
            e = expansions[m] = expand_standard(m, window, char)
        return e

    def admit(m: StandardMonomial) -> bool:
        return m.head <= head_cap and monomial_weight(m) <= weight_cap

    known: set = set()
    for g in generators:
        for m in g.support():
            if admit(m):
                known.add(m)
    frontier = sorted(known)
    while frontier:
        new: set = set()
        current = sorted(known)
        for m1 in frontier:
            e1 = expansion(m1)
            if m1.parity() == 1:
                for m in normalize(compose(e1, e1), char).support():
                    if m not in known and admit(m):
                        new.add(m)
            for m2 in current:
                for m in normalize(supercommutator(e1, expansion(m2)), char).support():
                    if m not in known and admit(m):
                        new.add(m)
        known |= new
        frontier = sorted(new)
    return sorted(known)
