"""The Poisson superalgebra P generated by three Hamiltonian pivots.

The ambient algebra is the Grassmann algebra on two families of odd
letters x_0, x_1, ... and y_0, y_1, ..., carrying the supercommutative
product and the Hamiltonian superbracket fixed by

    {y_i, x_j} = delta_ij,   {x_i, x_j} = {y_i, y_j} = 0,

extended by the super Leibnitz rule; on elements it is

    {f, g} = (-1)^{|f|-1} sum_i (df/dx_i * dg/dy_i + df/dy_i * dg/dx_i)

with left superderivatives. The pivots

    V_i = y_i + x_i x_{i+1} V_{i+3},   i >= 0,

mirror the differential-operator pivots under the rename d_i -> y_i, and
P = Poisson(V_0, V_1, V_2) is their closure under bracket and product.
Elements are windowed exactly like operators: a term is
coeff * x^alpha y^beta with both index sets ascending bitmasks below the
window, so a term key is the pair (xs_mask, ys_mask).

The basis of P consists of the unit together with the monomials

    x^alpha V^beta V_n,   alpha <= {0..n-2},  beta <= {0..n-1},

whose letters split into factors x^a v_m that are standard monomials of
the Lie layer (such a monomial is literally the product of those factors,
taken in decreasing head order up to sign). Splittability is equivalent
to a local shape law near the head -- conditions (i)-(iv) below on which
of V_{n-1}, V_{n-2} appear versus which of x_{n-2}, x_{n-3}, x_{n-4}
appear -- except for a finite list of unsplittable shapes, all of head
<= 10, which ships as a derived data file. For heads >= 11 the head
factor can absorb every letter below n - 4, and the remaining near-head
letters sit on factors of head >= 9 that no false monomial can reach, so
no exclusions occur beyond head 10.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from .lieq import (
    NonzeroResidue,
    QElement,
    StandardMonomial,
    _pivot_terms,
    expand_element,
    is_false,
    is_quasi_standard,
    safe_window,
)
from .operators import TermKey, _inv, indices_of, mask_of
from .scalars import coercer, format_scalar

# ---------------------------------------------------------------------------
# windowed elements of the ambient algebra
# ---------------------------------------------------------------------------


class PoissonElement:
    """Sparse exact sum of Grassmann words x^alpha y^beta below a window."""

    __slots__ = ("terms", "window")

    def __init__(self, terms: Dict[TermKey, object], window: int):
        self.terms = {k: c for k, c in terms.items() if c}
        self.window = window

    def __eq__(self, other):
        return isinstance(other, PoissonElement) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("PoissonElement is not hashable")

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def restrict(self, bound: int) -> "PoissonElement":
        """Keep only terms whose every index is < bound."""
        full = (1 << bound) - 1
        kept = {
            k: c
            for k, c in self.terms.items()
            if not (k[0] & ~full) and not (k[1] & ~full)
        }
        return PoissonElement(kept, min(self.window, bound))

    def max_index(self) -> int:
        """Largest index occurring in any term, or -1 for the zero element."""
        best = -1
        for xs, ys in self.terms:
            m = xs | ys
            if m:
                best = max(best, m.bit_length() - 1)
        return best

    def __repr__(self):
        return "PoissonElement(%s)" % format_poisson(self)


def _checked(terms: Dict[TermKey, object], window: int) -> PoissonElement:
    bound = 1 << window
    for xs, ys in terms:
        if xs >= bound or ys >= bound:
            raise ValueError("window overflow: index >= %d" % window)
    return PoissonElement(terms, window)


def p_term_element(coeff, xs: Iterable[int], ys: Iterable[int], window: int) -> PoissonElement:
    if not coeff:
        return PoissonElement({}, window)
    return _checked({(mask_of(xs), mask_of(ys)): coeff}, window)


def zero_p(window: int) -> PoissonElement:
    return PoissonElement({}, window)


def unit_p(window: int, coeff=1) -> PoissonElement:
    return p_term_element(coeff, (), (), window)


def x_letter(i: int, window: int) -> PoissonElement:
    return p_term_element(1, (i,), (), window)


def y_letter(i: int, window: int) -> PoissonElement:
    return p_term_element(1, (), (i,), window)


def p_add(a: PoissonElement, b: PoissonElement) -> PoissonElement:
    out = dict(a.terms)
    for k, c in b.terms.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return PoissonElement(out, max(a.window, b.window))


def p_scale(a: PoissonElement, k) -> PoissonElement:
    if not k:
        return PoissonElement({}, a.window)
    return PoissonElement({t: k * c for t, c in a.terms.items()}, a.window)


def p_sub(a: PoissonElement, b: PoissonElement) -> PoissonElement:
    return p_add(a, p_scale(b, -1))


def p_term_parity(key: TermKey) -> int:
    return (key[0].bit_count() + key[1].bit_count()) & 1


def p_term_order(key: TermKey) -> int:
    """The differential-operator order grading: the y-letter count."""
    return key[1].bit_count()


def p_parity(a: PoissonElement):
    """0 or 1 for homogeneous elements, the string "mixed" otherwise."""
    it = iter(a.terms)
    first = next(it, None)
    if first is None:
        return 0
    p = p_term_parity(first)
    for key in it:
        if p_term_parity(key) != p:
            return "mixed"
    return p


def _term_sort_key(item):
    (xs, ys), _ = item
    return (indices_of(xs), indices_of(ys))


def format_poisson(a: PoissonElement) -> str:
    if not a.terms:
        return "0"
    parts = []
    for (xs, ys), c in sorted(a.terms.items(), key=_term_sort_key):
        letters = ["x%d" % i for i in indices_of(xs)] + ["y%d" % i for i in indices_of(ys)]
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


# ---------------------------------------------------------------------------
# product and bracket
# ---------------------------------------------------------------------------


def _mul_key(k1: TermKey, k2: TermKey):
    """Merged key and sign exponent of a word product, or None if it dies."""
    xs1, ys1 = k1
    xs2, ys2 = k2
    if xs1 & xs2 or ys1 & ys2:
        return None
    sign = xs2.bit_count() * ys1.bit_count() + _inv(xs1, xs2) + _inv(ys1, ys2)
    return (xs1 | xs2, ys1 | ys2), sign & 1


def assoc_mul(f: PoissonElement, g: PoissonElement) -> PoissonElement:
    """Supercommutative Grassmann product on the shared window."""
    if f.window != g.window:
        raise ValueError("window mismatch: %d vs %d" % (f.window, g.window))
    out: Dict[TermKey, object] = {}
    for k1, c1 in f.terms.items():
        for k2, c2 in g.terms.items():
            merged = _mul_key(k1, k2)
            if merged is None:
                continue
            key, sign = merged
            c = c1 * c2
            s = out.get(key, 0) + (-c if sign else c)
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return PoissonElement(out, f.window)


def _below(mask: int, i: int) -> int:
    return (mask & ((1 << i) - 1)).bit_count()


def poisson_bracket(f: PoissonElement, g: PoissonElement) -> PoissonElement:
    """The Hamiltonian superbracket, per-term on the shared window."""
    if f.window != g.window:
        raise ValueError("window mismatch: %d vs %d" % (f.window, g.window))
    out: Dict[TermKey, object] = {}

    def acc(key, c):
        s = out.get(key, 0) + c
        if s:
            out[key] = s
        else:
            out.pop(key, None)

    for (xs1, ys1), c1 in f.terms.items():
        odd_f = (xs1.bit_count() + ys1.bit_count()) & 1
        for (xs2, ys2), c2 in g.terms.items():
            base = c1 * c2 if odd_f else -(c1 * c2)
            for i in indices_of(xs1 & ys2):
                bit = 1 << i
                merged = _mul_key((xs1 ^ bit, ys1), (xs2, ys2 ^ bit))
                if merged is None:
                    continue
                key, ms = merged
                s = _below(xs1, i) + xs2.bit_count() + _below(ys2, i) + ms
                acc(key, -base if s & 1 else base)
            for i in indices_of(ys1 & xs2):
                bit = 1 << i
                merged = _mul_key((xs1, ys1 ^ bit), (xs2 ^ bit, ys2))
                if merged is None:
                    continue
                key, ms = merged
                s = xs1.bit_count() + _below(ys1, i) + _below(xs2, i) + ms
                acc(key, -base if s & 1 else base)
    return PoissonElement(out, f.window)


# ---------------------------------------------------------------------------
# pivots and the embedding of the Lie layer
# ---------------------------------------------------------------------------


def expand_V(i: int, window: int, char: int = 0) -> PoissonElement:
    """Windowed expansion of the pivot V_i."""
    if i >= window:
        raise ValueError("window %d too small for pivot %d" % (window, i))
    one = coercer(char)(1)
    terms = {(mask, 1 << yj): one for mask, yj in _pivot_terms(i, window)}
    return PoissonElement(terms, window)


def pi_embed(a: QElement, window: int | None = None, char: int = 0) -> PoissonElement:
    """Expansion of a Lie element under the letter rename d_i -> y_i.

    Term keys of first-order operators and of Grassmann words coincide,
    so the embedding is a literal copy of the operator expansion. It is a
    Lie homomorphism: pi_embed(bracket(a, b)) = poisson_bracket(pi_embed(a),
    pi_embed(b)).
    """
    if window is None:
        window = safe_window(a.max_head())
    op = expand_element(a, window, char)
    return PoissonElement(dict(op.terms), window)


def p_shift(f: PoissonElement, k: int = 1) -> PoissonElement:
    """Letter shift x_i -> x_{i+k}, y_i -> y_{i+k}; widens the window by k."""
    return PoissonElement(
        {(xs << k, ys << k): c for (xs, ys), c in f.terms.items()},
        f.window + k,
    )


# ---------------------------------------------------------------------------
# basis monomials
# ---------------------------------------------------------------------------


class PBasisMonomial:
    """x^alpha V^beta V_head with bitmask letter sets; head -1 is the unit."""

    __slots__ = ("head", "alpha", "beta")

    def __init__(
        self,
        head: int,
        alpha: int | Iterable[int] = 0,
        beta: int | Iterable[int] = 0,
        check: bool = True,
    ):
        if not isinstance(alpha, int):
            alpha = mask_of(alpha)
        if not isinstance(beta, int):
            beta = mask_of(beta)
        if check:
            reason = p_shape_reason(head, alpha, beta)
            if reason:
                raise ValueError(reason)
        self.head = head
        self.alpha = alpha
        self.beta = beta

    @property
    def is_unit(self) -> bool:
        return self.head < 0

    @property
    def length(self) -> int:
        return self.head

    def ys_mask(self) -> int:
        return 0 if self.head < 0 else self.beta | (1 << self.head)

    def level(self) -> int:
        """Number of pivot letters: the product-filtration degree."""
        return 0 if self.head < 0 else self.beta.bit_count() + 1

    def parity(self) -> int:
        if self.head < 0:
            return 0
        return (self.alpha.bit_count() + self.beta.bit_count() + 1) & 1

    def key(self) -> Tuple[int, int, int]:
        return (self.head, self.alpha, self.beta)

    def __eq__(self, other):
        return isinstance(other, PBasisMonomial) and self.key() == other.key()

    def __hash__(self):
        return hash(("P", self.head, self.alpha, self.beta))

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return "PBasisMonomial(%s)" % p_monomial_text(self)


P_UNIT = PBasisMonomial(-1, check=False)


def p_monomial_text(m: PBasisMonomial) -> str:
    if m.is_unit:
        return "1"
    letters = ["x%d" % i for i in indices_of(m.alpha)]
    letters += ["V%d" % i for i in indices_of(m.ys_mask())]
    return "*".join(letters)


def p_monomial_json(m: PBasisMonomial) -> list:
    return [list(indices_of(m.alpha)), list(indices_of(m.ys_mask()))]


def p_monomial_from_masks(alpha: int, ys: int, check: bool = True) -> PBasisMonomial:
    if ys == 0:
        if alpha:
            raise ValueError("x letters with no pivot letters: not a basis shape")
        return PBasisMonomial(-1)
    head = ys.bit_length() - 1
    return PBasisMonomial(head, alpha, ys ^ (1 << head), check)


def p_monomial_from_json(data: Sequence) -> PBasisMonomial:
    return p_monomial_from_masks(mask_of(data[0]), mask_of(data[1]))


def p_monomial_from_text(text: str, check: bool = True) -> PBasisMonomial:
    text = text.strip()
    if text == "1":
        return P_UNIT
    alpha = 0
    ys = 0
    for part in text.split("*"):
        part = part.strip()
        if part[:1] == "x":
            alpha |= 1 << int(part[1:])
        elif part[:1] == "V":
            ys |= 1 << int(part[1:])
        else:
            raise ValueError("bad letter %r in %r" % (part, text))
    return p_monomial_from_masks(alpha, ys, check)


# ---------------------------------------------------------------------------
# the shape law
# ---------------------------------------------------------------------------


def _near_head_ok(head: int, alpha: int, beta: int) -> bool:
    """The four-case law relating V_{n-1}, V_{n-2} to x_{n-2..n-4}.

    (i)   both V_{n-1}, V_{n-2} present: no condition;
    (ii)  V_{n-1} only: one of x_{n-4}, x_{n-3}, x_{n-2} absent;
    (iii) V_{n-2} only: one of x_{n-3}, x_{n-2} absent;
    (iv)  neither: x_{n-2} absent, or both x_{n-3}, x_{n-4} absent.
    """
    b1 = head >= 1 and (beta >> (head - 1)) & 1
    b2 = head >= 2 and (beta >> (head - 2)) & 1
    a2 = bool(head >= 2 and (alpha >> (head - 2)) & 1)
    a3 = bool(head >= 3 and (alpha >> (head - 3)) & 1)
    a4 = bool(head >= 4 and (alpha >> (head - 4)) & 1)
    if b1 and b2:
        return True
    if b1:
        return not (a2 and a3 and a4)
    if b2:
        return not (a2 and a3)
    return not a2 or not (a3 or a4)


def _splits_standard(alpha: int, ysmask: int) -> bool:
    """Whether the x letters can sit on the pivots as standard factors.

    Each letter x_i needs a factor of head n >= i + 2; a factor whose
    tail holds x_{n-2} (a neck) cannot also hold x_{n-3} or x_{n-4}; in
    the end no factor may be a false monomial. Letters are placed in
    descending order, preferring high heads, with full backtracking.
    """
    ys = indices_of(ysmask)
    letters = sorted(indices_of(alpha), reverse=True)
    tails = [0] * len(ys)

    def dfs(idx: int) -> bool:
        if idx == len(letters):
            return all(not is_false(ys[p], tails[p]) for p in range(len(ys)))
        i = letters[idx]
        bit = 1 << i
        for p in range(len(ys) - 1, -1, -1):
            n = ys[p]
            if i > n - 2:
                break  # heads ascend, so every lower factor fails too
            if (tails[p] >> (n - 2)) & 1 and n - 4 <= i <= n - 3:
                continue  # the factor already carries its neck letter
            tails[p] |= bit
            if dfs(idx + 1):
                tails[p] ^= bit
                return True
            tails[p] ^= bit
        return False

    return dfs(0)


_EXCLUSION_PATH = Path(__file__).with_name("data") / "p_basis_exclusions.json"
_exclusion_cache: frozenset | None = None


def exclusion_set() -> frozenset:
    """(alpha, ys mask) pairs of the shipped derived exclusion list."""
    global _exclusion_cache
    if _exclusion_cache is None:
        payload = json.loads(_EXCLUSION_PATH.read_text())
        entries = set()
        for entry in payload["entries"]:
            m = p_monomial_from_text(entry["monomial"], check=False)
            entries.add((m.alpha, m.ys_mask()))
        _exclusion_cache = frozenset(entries)
    return _exclusion_cache


def p_shape_reason(head: int, alpha: int, beta: int) -> str | None:
    """None for a basis monomial, else a short description of the defect."""
    if head < 0:
        if alpha or beta:
            return "the unit carries no letters"
        return None
    if beta >> head:
        return "pivot letters at or above the head"
    if alpha >> max(head - 1, 0):
        return "x letters above index head - 2"
    if beta == 0:
        if not is_quasi_standard(head, alpha) or is_false(head, alpha):
            return "single factor is not a standard monomial"
        return None
    if not _near_head_ok(head, alpha, beta):
        return "violates the near-head shape law"
    if head <= 10 and (alpha, beta | (1 << head)) in exclusion_set():
        return "derived exclusion: letters admit no standard split"
    return None


def is_p_basis(head: int, alpha: int, beta: int) -> bool:
    return p_shape_reason(head, alpha, beta) is None


def derive_exclusions(head_cap: int = 10) -> List[Tuple[int, int]]:
    """Recompute the exclusion list: near-head-legal yet unsplittable.

    Returns (alpha, ys mask) pairs sorted by (head, alpha, beta). Single
    pivots are standard monomials outright and never appear. The scan is
    exponential in the head; head_cap 10 is the certified complete range
    (no exclusions exist above head 10).
    """
    out = []
    for head in range(head_cap + 1):
        top = 1 << head
        for alpha in range(1 << max(head - 1, 0)):
            for beta in range(1, 1 << head):
                if not _near_head_ok(head, alpha, beta):
                    continue
                if not _splits_standard(alpha, beta | top):
                    out.append((alpha, beta | top))
    out.sort(key=lambda e: (e[1].bit_length() - 1, e[0], e[1]))
    return out


def write_exclusions_artifact(path: Path | str | None = None, head_cap: int = 10) -> dict:
    """Regenerate the exclusion data file; returns the payload written."""
    if path is None:
        path = _EXCLUSION_PATH
    oracle = {"window": safe_window(head_cap), "head_cap": head_cap}
    entries = []
    for alpha, ys in derive_exclusions(head_cap):
        m = p_monomial_from_masks(alpha, ys, check=False)
        entries.append(
            {
                "monomial": p_monomial_text(m),
                "reason": "rank-dependent",
                "oracle": oracle,
            }
        )
    payload = {"oracle": oracle, "entries": entries}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return payload


def basis_P(max_length: int, char: int = 0) -> List[PBasisMonomial]:
    """All basis monomials of head <= max_length, unit first.

    Ordered by (head, alpha, beta). The scan is exponential in the head
    (2^(2n-1) shapes at head n), meant for desk scale max_length <= 10.
    The exact basis is established in characteristic 0; characteristic 2
    admits only a spanning statement, so char = 2 is rejected here.
    """
    if char == 2:
        raise ValueError("an exact basis is available in characteristic 0 only")
    out = [P_UNIT]
    for head in range(max_length + 1):
        top = 1 << head
        for alpha in range(1 << max(head - 1, 0)):
            if is_quasi_standard(head, alpha) and not is_false(head, alpha):
                out.append(PBasisMonomial(head, alpha, 0, check=False))
            for beta in range(1, 1 << head):
                if not _near_head_ok(head, alpha, beta):
                    continue
                if head <= 10 and (alpha, beta | top) in exclusion_set():
                    continue
                out.append(PBasisMonomial(head, alpha, beta, check=False))
    return out


# ---------------------------------------------------------------------------
# structural elements and normalization
# ---------------------------------------------------------------------------


class PElement:
    """Sparse exact linear combination of basis monomials."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[PBasisMonomial, object] | None = None):
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c}

    @staticmethod
    def monomial(m: PBasisMonomial, coeff=1) -> "PElement":
        return PElement({m: coeff})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, PElement) and self.coeffs == other.coeffs

    def __add__(self, other: "PElement") -> "PElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return PElement(out)

    def __sub__(self, other: "PElement") -> "PElement":
        return self + other.scale(-1)

    def scale(self, k) -> "PElement":
        if not k:
            return PElement()
        return PElement({m: k * c for m, c in self.coeffs.items()})

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
        return [PElement(p) for p in (even, odd) if p]

    def __repr__(self):
        if not self.coeffs:
            return "PElement(0)"
        parts = []
        for m in sorted(self.coeffs):
            cs = format_scalar(self.coeffs[m])
            if cs == "1":
                parts.append(p_monomial_text(m))
            elif cs == "-1":
                parts.append("-" + p_monomial_text(m))
            else:
                parts.append(cs + "*" + p_monomial_text(m))
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return "PElement(%s)" % text


def p_expand(m: PBasisMonomial, window: int, char: int = 0) -> PoissonElement:
    """Windowed expansion: the x letters times the pivot expansions."""
    one = coercer(char)(1)
    if m.is_unit:
        return unit_p(window, one)
    if m.head >= window:
        raise ValueError("window %d too small for head %d" % (window, m.head))
    acc = p_term_element(one, indices_of(m.alpha), (), window)
    for b in indices_of(m.ys_mask()):
        acc = assoc_mul(acc, expand_V(b, window, char))
    return acc


def p_expand_element(e: PElement, window: int, char: int = 0) -> PoissonElement:
    out = zero_p(window)
    for m, c in e.items():
        out = p_add(out, p_scale(p_expand(m, window, char), c))
    return out


def normalize_P(f: PoissonElement, char: int = 0) -> PElement:
    """Coordinates of an ambient element in the basis of P.

    Triangular elimination by increasing pivot-letter mask: substituting
    y_b -> x_b x_{b+1} y_{b+3} strictly increases the mask as an integer,
    so the minimal mask present is the letter set of a basis monomial,
    whose expansion is subtracted. Terms whose top pivot index reaches
    window - 6 are truncation residue and are dropped; any illegal
    leading shape below that bound raises NonzeroResidue.
    """
    window = f.window
    bound = window - 6
    pending = dict(f.terms)
    coords: Dict[PBasisMonomial, object] = {}
    while pending:
        ymask = min(ys for _, ys in pending)
        batch = [(xs, c) for (xs, ys), c in pending.items() if ys == ymask]
        if ymask == 0:
            for xs, c in batch:
                if xs:
                    raise NonzeroResidue(
                        "pure x term x%s" % (list(indices_of(xs)),)
                    )
                coords[P_UNIT] = c
                del pending[(0, 0)]
            continue
        head = ymask.bit_length() - 1
        if head >= bound:
            break  # larger masks have larger tops: all residue from here
        beta = ymask ^ (1 << head)
        for xs, c in batch:
            reason = p_shape_reason(head, xs, beta)
            if reason:
                raise NonzeroResidue(
                    "leading word x%s y%s is outside the basis (%s)"
                    % (list(indices_of(xs)), list(indices_of(ymask)), reason)
                )
            m = PBasisMonomial(head, xs, beta, check=False)
            coords[m] = c
            for key, unit in p_expand(m, window, char).terms.items():
                s = pending.get(key, 0) - c * unit
                if s:
                    pending[key] = s
                else:
                    pending.pop(key, None)
    return PElement(coords)


def _pair_window(a: PElement, b: PElement, window: int | None) -> int:
    if window is None:
        window = safe_window(max(a.max_head(), b.max_head(), 0), factors=2)
    return window


def p_product(a: PElement, b: PElement, char: int = 0, window: int | None = None) -> PElement:
    """Supercommutative product of two coordinate vectors, in coordinates."""
    window = _pair_window(a, b, window)
    fa = p_expand_element(a, window, char)
    fb = p_expand_element(b, window, char)
    return normalize_P(assoc_mul(fa, fb), char)


def p_bracket(a: PElement, b: PElement, char: int = 0, window: int | None = None) -> PElement:
    """Poisson bracket of two coordinate vectors, in coordinates."""
    window = _pair_window(a, b, window)
    fa = p_expand_element(a, window, char)
    fb = p_expand_element(b, window, char)
    return normalize_P(poisson_bracket(fa, fb), char)


def p_multidegree(m: PBasisMonomial) -> Tuple[int, int, int]:
    """Additive multidegree: pivot letters count +Gr, x letters -Gr."""
    from .weights import pivot_multidegree

    total = [0, 0, 0]
    for i in indices_of(m.ys_mask()):
        g = pivot_multidegree(i)
        for a in range(3):
            total[a] += g[a]
    for i in indices_of(m.alpha):
        g = pivot_multidegree(i)
        for a in range(3):
            total[a] -= g[a]
    return tuple(total)


def p_monomial_weight(m: PBasisMonomial) -> float:
    """wt = sum of lambda^i over pivot letters minus the x letters."""
    from .weights import weight_lambda

    lam = weight_lambda()
    total = 0.0
    for i in indices_of(m.ys_mask()):
        total += lam**i
    for i in indices_of(m.alpha):
        total -= lam**i
    return total


_WEIGHT_TOL = 1e-6


def p_basis_under_weight(cap: float) -> List[PBasisMonomial]:
    """Basis monomials of weight at most ``cap`` (exact shapes).

    Basis shapes of head n all have weight above lambda^(n-5) (the
    near-head restrictions force enough pivot letters near the top), so
    heads beyond 5 + log_lambda(cap) cannot contribute and the scan stops.
    """
    import math

    from .weights import weight_lambda

    lam = weight_lambda()
    out = []
    if cap >= 0:
        out.append(P_UNIT)
    if cap < 1 - _WEIGHT_TOL:
        return out
    head_stop = int(math.floor(5 + math.log(cap) / math.log(lam) + _WEIGHT_TOL))
    for head in range(head_stop + 1):
        powers = [lam**i for i in range(head + 1)]
        prefix = [0.0]
        for p in powers[: max(head - 1, 0)]:
            prefix.append(prefix[-1] + p)
        for beta, alpha in _shapes_under_weight(head, cap, powers, prefix):
            if p_shape_reason(head, alpha, beta) is None:
                out.append(PBasisMonomial(head, alpha, beta, check=False))
    return out


def _shapes_under_weight(head, cap, powers, prefix):
    """(beta, alpha) pairs at the given head with weight at most ``cap``.

    ``prefix[k]`` is the largest reduction the letters x_0..x_{k-1} can
    contribute.  Betas are walked with a feasibility cut, then the alphas
    achieving the required reduction come from a subset-sum descent.
    """
    shapes = []
    max_cut = prefix[-1]

    def choose_alpha(pos: int, need: float, alpha: int):
        if need <= _WEIGHT_TOL:
            # every extension by deeper letters keeps the weight under cap
            if pos < 0:
                shapes.append((beta_current, alpha))
                return
            choose_alpha(pos - 1, need, alpha)
            choose_alpha(pos - 1, need, alpha | (1 << pos))
            return
        if pos < 0 or prefix[pos + 1] < need - _WEIGHT_TOL:
            return
        choose_alpha(pos - 1, need - powers[pos], alpha | (1 << pos))
        choose_alpha(pos - 1, need, alpha)

    beta_current = 0

    def choose_beta(pos: int, total: float, beta: int):
        nonlocal beta_current
        if total - max_cut > cap + _WEIGHT_TOL:
            return
        if pos < 0:
            beta_current = beta
            choose_alpha(head - 2, total - cap, 0)
            return
        choose_beta(pos - 1, total, beta)
        choose_beta(pos - 1, total + powers[pos], beta | (1 << pos))

    choose_beta(head - 1, powers[head], 0)
    return shapes


def p_shift_monomial(m: PBasisMonomial, k: int = 1) -> PBasisMonomial:
    if m.is_unit:
        return m
    return PBasisMonomial(m.head + k, m.alpha << k, m.beta << k)


def pi_monomial(m: StandardMonomial) -> PBasisMonomial:
    """The structural image of a standard monomial: a single-pivot shape."""
    return PBasisMonomial(m.head, m.tail, 0, check=False)


def pi_element(a: QElement) -> PElement:
    return PElement({pi_monomial(m): c for m, c in a.items()})


# ---------------------------------------------------------------------------
# characteristic-2 axioms
# ---------------------------------------------------------------------------


def formal_square_2(f: PoissonElement) -> PoissonElement:
    """The characteristic-2 formal square on the odd part.

    It vanishes on single Grassmann words (their adjoint squares are
    zero), and extends over a sum of words by (u + w)^[2] = u^[2] +
    w^[2] + {u, w}, leaving the pairwise brackets.
    """
    items = list(f.terms.items())
    out = zero_p(f.window)
    for a in range(len(items)):
        ka, ca = items[a]
        ea = PoissonElement({ka: ca}, f.window)
        for b in range(a + 1, len(items)):
            kb, cb = items[b]
            eb = PoissonElement({kb: cb}, f.window)
            out = p_add(out, poisson_bracket(ea, eb))
    return out


def char2_axiom_check(samples: int = 40, seed: int = 0, window: int = 20) -> dict:
    """Sampled check of the characteristic-2 Poisson axioms.

    For random even a and odd b built from small basis monomials over
    GF(2): (ab)^[2] = a^2 b^[2] + ab{a,b}, and b^2 = 0.
    """
    import random

    rng = random.Random(seed)
    pool = [m for m in basis_P(4) if not m.is_unit]
    even = [m for m in pool if m.parity() == 0]
    odd = [m for m in pool if m.parity() == 1]
    violations = []
    for trial in range(samples):
        a = zero_p(window)
        for m in rng.sample(even, rng.randint(1, 3)):
            a = p_add(a, p_expand(m, window, char=2))
        b = zero_p(window)
        for m in rng.sample(odd, rng.randint(1, 3)):
            b = p_add(b, p_expand(m, window, char=2))
        ab = assoc_mul(a, b)
        lhs = formal_square_2(ab)
        rhs = p_add(
            assoc_mul(assoc_mul(a, a), formal_square_2(b)),
            assoc_mul(ab, poisson_bracket(a, b)),
        )
        if p_sub(lhs, rhs):
            violations.append({"trial": trial, "axiom": "square of a product"})
        if assoc_mul(b, b):
            violations.append({"trial": trial, "axiom": "odd square"})
    return {
        "check": "char2_axioms",
        "params": {"samples": samples, "seed": seed, "window": window},
        "violations": violations,
        "stats": {"pairs": samples},
    }


# ---------------------------------------------------------------------------
# vectorized weight enumeration for the weights layer
# ---------------------------------------------------------------------------


def _roots():
    from .weights import compute_roots

    r = compute_roots()
    return r["lambda"], r["mu"]


def _near_head_configs(head: int):
    """(wt offset parts, swt offset parts) per legal near-head assignment.

    Positions head-1 .. head-4 of beta and head-2 .. head-4 of alpha are
    enumerated jointly under the four-case law; deeper positions are left
    to the caller. Only heads >= 6 use this split. Yields (beta_mask,
    alpha_mask) pairs over those positions.
    """
    for bits in range(1 << 7):
        b1 = bits & 1
        b2 = (bits >> 1) & 1
        b3 = (bits >> 2) & 1
        b4 = (bits >> 3) & 1
        a2 = (bits >> 4) & 1
        a3 = (bits >> 5) & 1
        a4 = (bits >> 6) & 1
        beta = (
            b1 << (head - 1) | b2 << (head - 2) | b3 << (head - 3) | b4 << (head - 4)
        )
        alpha = a2 << (head - 2) | a3 << (head - 3) | a4 << (head - 4)
        if _near_head_ok(head, alpha, beta):
            yield beta, alpha


def _offset_value(alpha: int, ys: int, powers) -> complex:
    total = powers[0] * 0
    for i in indices_of(ys):
        total += powers[i]
    for i in indices_of(alpha):
        total -= powers[i]
    return total


def pattern_weight_arrays(max_head: int):
    """Yield (head, wt array, swt array) over near-head-legal patterns.

    A monomial of head n weighs lambda^n plus +lambda^i per pivot letter
    and -lambda^i per x letter. Near the head the letter choices obey the
    shape law; below head - 4 all combinations are taken. The family is a
    superset of the basis, which is what a for-all bound check needs.
    """
    import numpy as np

    lam, mu = _roots()
    lam_pow = [lam**i for i in range(max_head + 1)]
    mu_pow = [mu**i for i in range(max_head + 1)]
    for head in range(max_head + 1):
        if head < 6:
            wt_list = []
            swt_list = []
            top = 1 << head
            for alpha in range(1 << max(head - 1, 0)):
                for beta in range(1 << head):
                    if not _near_head_ok(head, alpha, beta):
                        continue
                    wt_list.append(_offset_value(alpha, beta | top, lam_pow).real)
                    swt_list.append(_offset_value(alpha, beta | top, mu_pow))
            yield head, np.array(wt_list), np.array(swt_list, dtype=np.complex128)
            continue
        deep_wt = np.zeros(1)
        deep_swt = np.zeros(1, dtype=np.complex128)
        for i in range(head - 4):
            deep_wt = np.concatenate(
                [deep_wt - lam_pow[i], deep_wt, deep_wt + lam_pow[i]]
            )
            deep_swt = np.concatenate(
                [deep_swt - mu_pow[i], deep_swt, deep_swt + mu_pow[i]]
            )
        tops_wt = []
        tops_swt = []
        for beta, alpha in _near_head_configs(head):
            tops_wt.append(lam_pow[head] + _offset_value(alpha, beta, lam_pow).real)
            tops_swt.append(mu_pow[head] + _offset_value(alpha, beta, mu_pow))
        wt = (np.array(tops_wt)[:, None] + deep_wt[None, :]).ravel()
        swt = (np.array(tops_swt, dtype=np.complex128)[:, None] + deep_swt[None, :]).ravel()
        yield head, wt, swt


def _deep_arrays(head: int, first_beta: int | None, powers, dtype):
    """Offset array over deep positions 0 .. head-5.

    first_beta None: all four (x, pivot) choices per position. Otherwise
    positions below first_beta are x-only, position first_beta carries a
    pivot letter, higher positions are free: exactly the words whose first
    deep pivot sits at first_beta.
    """
    import numpy as np

    out = np.zeros(1, dtype=dtype)
    for i in range(head - 4):
        if first_beta is None or i > first_beta:
            out = np.concatenate([out, out - powers[i], out + powers[i], out])
        elif i == first_beta:
            out = np.concatenate([out + powers[i], out + powers[i] - powers[i]])
            # pivot present; the x letter is free alongside it
        else:
            out = np.concatenate([out, out - powers[i]])
    return out


def _standard_q_arrays(head: int, powers, dtype):
    """Weights of the standard monomials of one head (single factors)."""
    import numpy as np

    from .lieq import false_monomials

    chunks = []
    base = powers[head]
    free = list(range(max(head - 2, 0)))
    out = np.full(1, base, dtype=dtype)
    for i in free:
        out = np.concatenate([out, out - powers[i]])
    chunks.append(out)
    if head >= 2:
        base2 = powers[head] - powers[head - 2]
        out = np.full(1, base2, dtype=dtype)
        for i in range(max(head - 4, 0)):
            out = np.concatenate([out, out - powers[i]])
        chunks.append(out)
    merged = np.concatenate(chunks)
    drop = []
    for fh, ft in false_monomials(min(head, 12)):
        if fh != head:
            continue
        value = powers[head]
        if (ft >> (head - 2)) & 1:
            value = powers[head] - powers[head - 2]
        for i in indices_of(ft & ~(1 << (head - 2)) if head >= 2 else ft):
            value -= powers[i]
        drop.append(value)
    if drop:
        merged = np.sort(merged)
        for value in drop:
            pos = int(np.searchsorted(merged, value - 1e-9))
            while abs(merged[pos] - value) > 1e-9:
                pos += 1
            merged = np.delete(merged, pos)
    return merged


def _exclusion_values():
    """head -> list of (wt, swt) values of the derived exclusions."""
    lam, mu = _roots()
    lam_pow = [lam**i for i in range(12)]
    mu_pow = [mu**i for i in range(12)]
    by_head: Dict[int, list] = {}
    for alpha, ys in sorted(exclusion_set()):
        head = ys.bit_length() - 1
        pair = (
            _offset_value(alpha, ys, lam_pow).real,
            _offset_value(alpha, ys, mu_pow),
        )
        by_head.setdefault(head, []).append(pair)
    return by_head


def basis_weight_arrays(max_length: int):
    """Yield (head, wt array, swt array) over the exact basis, per head.

    Built stratum by stratum: single factors are the standard monomials;
    multi-pivot monomials split by the near-head configuration and, when
    all near-head pivot slots are empty, by the first deep pivot letter.
    The derived exclusions are removed from the value multisets (weights
    of each head are handled independently, so the two arrays need not
    stay aligned).
    """
    import numpy as np

    lam, mu = _roots()
    lam_pow = [lam**i for i in range(max_length + 2)]
    mu_pow = [mu**i for i in range(max_length + 2)]
    excl_by_head = _exclusion_values() if max_length >= 6 else {}
    for head in range(max_length + 1):
        if head < 6:
            top = 1 << head
            wt_list = []
            swt_list = []
            for alpha in range(1 << max(head - 1, 0)):
                for beta in range(1 << head):
                    if p_shape_reason(head, alpha, beta) is not None:
                        continue
                    wt_list.append(_offset_value(alpha, beta | top, lam_pow).real)
                    swt_list.append(_offset_value(alpha, beta | top, mu_pow))
            yield head, np.array(wt_list), np.array(swt_list, dtype=np.complex128)
            continue
        wt_chunks = [_standard_q_arrays(head, lam_pow, np.float64)]
        swt_chunks = [_standard_q_arrays(head, mu_pow, np.complex128)]
        deep_free_wt = _deep_arrays(head, None, lam_pow, np.float64)
        deep_free_swt = _deep_arrays(head, None, mu_pow, np.complex128)
        empty_tops_wt = []
        empty_tops_swt = []
        for beta, alpha in _near_head_configs(head):
            base_wt = lam_pow[head] + _offset_value(alpha, beta, lam_pow).real
            base_swt = mu_pow[head] + _offset_value(alpha, beta, mu_pow)
            if beta:
                wt_chunks.append(base_wt + deep_free_wt)
                swt_chunks.append(base_swt + deep_free_swt)
            else:
                empty_tops_wt.append(base_wt)
                empty_tops_swt.append(base_swt)
        for j in range(head - 4):
            dw = _deep_arrays(head, j, lam_pow, np.float64)
            ds = _deep_arrays(head, j, mu_pow, np.complex128)
            for base_wt in empty_tops_wt:
                wt_chunks.append(base_wt + dw)
            for base_swt in empty_tops_swt:
                swt_chunks.append(base_swt + ds)
        wt = np.concatenate(wt_chunks)
        swt = np.concatenate(swt_chunks)
        if head in excl_by_head:
            wt = np.sort(wt)
            for value, _sv in excl_by_head[head]:
                pos = int(np.searchsorted(wt, value - 1e-9))
                while abs(wt[pos] - value) > 1e-9:
                    pos += 1
                wt = np.delete(wt, pos)
            order = np.argsort(np.abs(swt))
            swt = swt[order]
            radii = np.abs(swt)
            for _wv, value in excl_by_head[head]:
                pos = int(np.searchsorted(radii, abs(value) - 1e-9))
                while abs(radii[pos] - abs(value)) > 1e-9:
                    pos += 1
                swt = np.delete(swt, pos)
                radii = np.delete(radii, pos)
        yield head, wt, swt


def basis_weight_counts(thresholds: Sequence[float]) -> List[int]:
    """Number of non-unit basis monomials of weight <= m, per threshold.

    Exact counting. Heads <= 12 reuse the per-head value arrays; larger
    heads split each stratum into two halves and count pairs below the
    threshold with a sorted merge, so nothing larger than the square root
    of a stratum is ever materialized. Monomials of head n weigh more
    than lambda^(n-5), which caps the heads to scan.
    """
    import math

    import numpy as np

    lam, _mu = _roots()
    top_m = max(thresholds)
    cap = math.ceil(5 + math.log(top_m, lam) - 1e-9) - 1
    ms = np.array(sorted(thresholds))
    order = {m: i for i, m in enumerate(sorted(thresholds))}
    totals = np.zeros(len(ms), dtype=np.int64)

    small = min(cap, 12)
    for _head, wt, _swt in basis_weight_arrays(small):
        wt = np.sort(wt)
        totals += np.searchsorted(wt, ms, side="right")

    lam_pow = [lam**i for i in range(cap + 2)]
    for head in range(13, cap + 1):
        totals += _standard_counts_one_head(head, lam_pow, ms)
        strata: List[Tuple[float, List[float]]] = []
        empty_tops: List[float] = []
        free_tops: List[float] = []
        for beta, alpha in _near_head_configs(head):
            base = lam_pow[head] + _offset_value(alpha, beta, lam_pow).real
            if beta:
                free_tops.append(base)
            else:
                empty_tops.append(base)
        if free_tops:
            strata.append((None, free_tops))
        for j in range(head - 4):
            strata.append((j, empty_tops))
        for first_beta, tops in strata:
            lo, hi = _split_deep_halves(head, first_beta, lam_pow)
            lo = np.sort(lo)
            hi = np.sort(hi)
            for base in tops:
                totals += _pair_counts(lo, hi, ms - base)
    return [int(totals[order[m]]) for m in thresholds]


def _standard_counts_one_head(head: int, lam_pow, ms):
    import numpy as np

    values = np.sort(_standard_q_arrays(head, lam_pow, np.float64))
    return np.searchsorted(values, ms, side="right")


def _split_deep_halves(head: int, first_beta: int | None, lam_pow):
    """The deep-zone offsets of one stratum, split into two half-products.

    Per position: four (x, pivot) choices in the free zone (the offset 0
    appears twice, for neither letter and for both), x-only below the
    first pivot slot, pivot-with-free-x at the slot itself.
    """
    import math

    import numpy as np

    branches = []
    for i in range(head - 4):
        if first_beta is None or i > first_beta:
            branches.append((0.0, -lam_pow[i], lam_pow[i], 0.0))
        elif i == first_beta:
            branches.append((lam_pow[i], 0.0))
        else:
            branches.append((0.0, -lam_pow[i]))
    total = 1
    for opts in branches:
        total *= len(opts)
    target = math.isqrt(total)
    lo = np.zeros(1)
    hi = np.zeros(1)
    size = 1
    for opts in branches:
        if size < target:
            lo = np.concatenate([lo + o for o in opts])
            size *= len(opts)
        else:
            hi = np.concatenate([hi + o for o in opts])
    return lo, hi


def _pair_counts(lo, hi, bounds):
    """Number of pairs (a in lo, b in hi) with a + b <= bound, per bound.

    Both arrays must be ascending. Entries of hi beyond bound - min(lo)
    cannot contribute and are cut first, so strata far above the bounds
    cost almost nothing.
    """
    import numpy as np

    counts = np.zeros(len(bounds), dtype=np.int64)
    if not len(lo) or not len(hi):
        return counts
    lo_min = lo[0]
    for k, bound in enumerate(bounds):
        cut = int(np.searchsorted(hi, bound - lo_min, side="right"))
        if cut == 0:
            continue
        counts[k] = np.searchsorted(lo, bound - hi[:cut], side="right").sum()
    return counts
