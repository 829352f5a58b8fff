"""Kantor doubles: the Jordan superalgebras J and K.

J doubles the Poisson algebra: J = P + bar(P) with the four-case product

    a . b       = ab
    bar(a) . b  = (-1)^|b| bar(ab)
    a . bar(b)  = bar(ab)
    bar(a) . bar(b) = (-1)^|b| {a, b}

extended bilinearly (the sign-dependent cases through parity components of
the right factor); the bar flips the Z2-parity.  K doubles the trivial
Poisson structure on <1> + Q (product: unit action only; bracket: the Lie
superbracket), so the same four cases collapse to the table

    x . bar(1) = bar(x)            bar(1) . x = (-1)^|x| bar(x)
    bar(x) . bar(y) = (-1)^|y| [x, y]        1 the unit,

with every other monomial product zero.  The sign (-1)^|y| on the doubled
bracket is what makes the product supercommutative: for x odd and y even
an unsigned bar(x).bar(y) = [x, y] would need [x, y] = [y, x], which the
superbracket denies.

K is also the quotient of J by the ideal spanned by the basis monomials
carrying at least two pivot letters (quotient_check): level-one basis
monomials x^a V_n correspond exactly to standard monomials of Q.

The Jordan weight jwt(w) = 2 mult_V(w) - eps(w), with eps = 1 exactly on
barred monomials, is additive on products, and the extended multidegree
(X1, X2, X3, 2(X1 + X2 + X3) - jwt) makes both algebras N^4-graded.  On
the K side the N^4-components are at most one-dimensional and the total
extended degree sorts the basis into the ladder

    K_0 = <1>,  K_1 = <v0, v1, v2, bar(1)>,
    K_{3n-2} = Q_n,  K_{3n-1} = bar(Q_n),  K_{3n} = 0   (n >= 1),

which k_component_dims checks against the Hilbert series of Q.  K carries
no unit-free idempotents: principal powers vanish by the sixth at the
latest (nil_probe), and the chain of derived squares ends after two steps
(solvability_check).
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Tuple

from .lieq import QElement, StandardMonomial, bracket, enumerate_basis, monomial_text
from .poisson import (
    P_UNIT,
    PBasisMonomial,
    PElement,
    p_basis_under_weight,
    p_bracket,
    p_monomial_text,
    p_monomial_weight,
    p_multidegree,
    p_product,
)
from .weights import (
    compute_roots,
    head_cap_for_degree,
    hilbert_q,
    multidegree,
    total_degree,
)

_TOL = 1e-6


# ---------------------------------------------------------------------------
# basis monomials of the doubled algebras
# ---------------------------------------------------------------------------


class JordanMonomial:
    """A doubled basis monomial: a base monomial with an optional bar.

    The base is a PBasisMonomial on the J side, a StandardMonomial on the
    K side, or None for the K unit.  The bar flips the parity.
    """

    __slots__ = ("base", "barred")

    def __init__(self, base, barred: bool = False):
        self.base = base
        self.barred = bool(barred)

    def parity(self) -> int:
        p = 0 if self.base is None else self.base.parity()
        return p ^ (1 if self.barred else 0)

    def text(self) -> str:
        if self.base is None:
            inner = "1"
        elif isinstance(self.base, PBasisMonomial):
            inner = p_monomial_text(self.base)
        else:
            inner = monomial_text(self.base)
        return "bar(%s)" % inner if self.barred else inner

    def _key(self):
        if self.base is None:
            bk = (-2, 0, 0)
        elif isinstance(self.base, PBasisMonomial):
            bk = self.base.key()
        else:
            bk = (self.base.head, self.base.tail)
        return (self.barred, bk)

    def __eq__(self, other):
        return (
            isinstance(other, JordanMonomial)
            and self.barred == other.barred
            and self.base == other.base
        )

    def __hash__(self):
        return hash((self.barred, self.base))

    def __lt__(self, other):
        return self._key() < other._key()

    def __repr__(self):
        return "JordanMonomial(%s)" % self.text()


def _format_terms(pairs, name: str) -> str:
    from .scalars import format_scalar

    if not pairs:
        return "%s(0)" % name
    parts = []
    for jm, c in sorted(pairs):
        cs = format_scalar(c)
        if cs == "1":
            parts.append(jm.text())
        elif cs == "-1":
            parts.append("-" + jm.text())
        else:
            parts.append("%s*%s" % (cs, jm.text()))
    return "%s(%s)" % (name, " + ".join(parts).replace("+ -", "- "))


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


class JElement:
    """Element of J = P + bar(P), as a pair of coordinate vectors."""

    __slots__ = ("plain", "barred")

    def __init__(self, plain: Optional[PElement] = None, barred: Optional[PElement] = None):
        self.plain = plain if plain is not None else PElement()
        self.barred = barred if barred is not None else PElement()

    @staticmethod
    def monomial(m: PBasisMonomial, coeff=1, barred: bool = False) -> "JElement":
        part = PElement.monomial(m, coeff)
        return JElement(barred=part) if barred else JElement(plain=part)

    @staticmethod
    def unit(coeff=1, barred: bool = False) -> "JElement":
        return JElement.monomial(P_UNIT, coeff, barred)

    def __bool__(self):
        return bool(self.plain) or bool(self.barred)

    def __eq__(self, other):
        return (
            isinstance(other, JElement)
            and self.plain == other.plain
            and self.barred == other.barred
        )

    def __add__(self, other: "JElement") -> "JElement":
        return JElement(self.plain + other.plain, self.barred + other.barred)

    def __sub__(self, other: "JElement") -> "JElement":
        return JElement(self.plain - other.plain, self.barred - other.barred)

    def scale(self, k) -> "JElement":
        return JElement(self.plain.scale(k), self.barred.scale(k))

    def items(self):
        for m, c in self.plain.items():
            yield JordanMonomial(m), c
        for m, c in self.barred.items():
            yield JordanMonomial(m, barred=True), c

    def support(self):
        return [jm for jm, _ in self.items()]

    def coeff(self, jm: JordanMonomial):
        part = self.barred if jm.barred else self.plain
        return part.coeffs.get(jm.base, 0)

    def parity(self):
        parities = {m.parity() for m in self.plain.support()}
        parities |= {m.parity() ^ 1 for m in self.barred.support()}
        if not parities:
            return 0
        if len(parities) > 1:
            return "mixed"
        return parities.pop()

    def max_head(self) -> int:
        return max(self.plain.max_head(), self.barred.max_head())

    def __repr__(self):
        return _format_terms(list(self.items()), "JElement")


class KElement:
    """Element of K = <1> + Q + <bar(1)> + bar(Q)."""

    __slots__ = ("unit", "plain", "unit_bar", "barred")

    def __init__(self, unit=0, plain: Optional[QElement] = None, unit_bar=0,
                 barred: Optional[QElement] = None):
        self.unit = unit
        self.plain = plain if plain is not None else QElement()
        self.unit_bar = unit_bar
        self.barred = barred if barred is not None else QElement()

    @staticmethod
    def monomial(m: Optional[StandardMonomial], coeff=1, barred: bool = False) -> "KElement":
        if m is None:
            return KElement(unit_bar=coeff) if barred else KElement(unit=coeff)
        part = QElement.monomial(m, coeff)
        return KElement(barred=part) if barred else KElement(plain=part)

    def __bool__(self):
        return bool(self.unit) or bool(self.plain) or bool(self.unit_bar) or bool(self.barred)

    def __eq__(self, other):
        return (
            isinstance(other, KElement)
            and self.unit == other.unit
            and self.plain == other.plain
            and self.unit_bar == other.unit_bar
            and self.barred == other.barred
        )

    def __add__(self, other: "KElement") -> "KElement":
        return KElement(self.unit + other.unit, self.plain + other.plain,
                        self.unit_bar + other.unit_bar, self.barred + other.barred)

    def __sub__(self, other: "KElement") -> "KElement":
        return self + other.scale(-1)

    def scale(self, k) -> "KElement":
        if not k:
            return KElement()
        return KElement(k * self.unit, self.plain.scale(k),
                        k * self.unit_bar, self.barred.scale(k))

    def items(self):
        if self.unit:
            yield JordanMonomial(None), self.unit
        for m, c in self.plain.items():
            yield JordanMonomial(m), c
        if self.unit_bar:
            yield JordanMonomial(None, barred=True), self.unit_bar
        for m, c in self.barred.items():
            yield JordanMonomial(m, barred=True), c

    def support(self):
        return [jm for jm, _ in self.items()]

    def coeff(self, jm: JordanMonomial):
        if jm.base is None:
            return self.unit_bar if jm.barred else self.unit
        part = self.barred if jm.barred else self.plain
        return part.coeffs.get(jm.base, 0)

    def parity(self):
        parities = set()
        if self.unit:
            parities.add(0)
        if self.unit_bar:
            parities.add(1)
        parities |= {m.parity() for m in self.plain.support()}
        parities |= {m.parity() ^ 1 for m in self.barred.support()}
        if not parities:
            return 0
        if len(parities) > 1:
            return "mixed"
        return parities.pop()

    def max_head(self) -> int:
        return max(self.plain.max_head(), self.barred.max_head())

    def __repr__(self):
        return _format_terms(list(self.items()), "KElement")


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------


def kantor_mul(a: JElement, b: JElement, char: int = 0, window: int | None = None) -> JElement:
    """Doubled product on J; signs taken case by case as in the module header."""
    plain = PElement()
    barred = PElement()
    if a.plain and b.plain:
        plain = plain + p_product(a.plain, b.plain, char, window)
    if a.plain and b.barred:
        barred = barred + p_product(a.plain, b.barred, char, window)
    if a.barred and b.plain:
        for bp in b.plain.homogeneous_parts():
            part = p_product(a.barred, bp, char, window)
            barred = barred + (part.scale(-1) if bp.parity() else part)
    if a.barred and b.barred:
        for bb in b.barred.homogeneous_parts():
            part = p_bracket(a.barred, bb, char, window)
            plain = plain + (part.scale(-1) if bb.parity() else part)
    return JElement(plain, barred)


def jor_q_mul(a: KElement, b: KElement, char: int = 0, window: int | None = None) -> KElement:
    """Direct product on K: the doubled product of the trivial extension."""
    unit = a.unit * b.unit
    unit_bar = a.unit * b.unit_bar + a.unit_bar * b.unit
    plain = QElement()
    barred = QElement()
    if a.unit:
        plain = plain + b.plain.scale(a.unit)
        barred = barred + b.barred.scale(a.unit)
    if b.unit:
        plain = plain + a.plain.scale(b.unit)
        barred = barred + a.barred.scale(b.unit)
    if b.unit_bar and a.plain:
        barred = barred + a.plain.scale(b.unit_bar)
    if a.unit_bar and b.plain:
        for xp in b.plain.homogeneous_parts():
            sign = -1 if xp.parity() else 1
            barred = barred + xp.scale(sign * a.unit_bar)
    if a.barred and b.barred:
        for yb in b.barred.homogeneous_parts():
            part = bracket(a.barred, yb, char, window)
            plain = plain + (part.scale(-1) if yb.parity() else part)
    return KElement(unit, plain, unit_bar, barred)


def _mul_for(a, b):
    if isinstance(a, JElement) and isinstance(b, JElement):
        return kantor_mul
    if isinstance(a, KElement) and isinstance(b, KElement):
        return jor_q_mul
    raise TypeError("arguments must both be JElement or both be KElement")


def _homogeneous_parity(x) -> int:
    p = x.parity()
    if p == "mixed":
        raise ValueError("argument must be parity-homogeneous")
    return p


def supercommutator_residual(a, b, char: int = 0, window: int | None = None):
    """a.b - (-1)^{|a||b|} b.a for homogeneous a, b; zero iff supercommutative."""
    mul = _mul_for(a, b)
    pa = _homogeneous_parity(a)
    pb = _homogeneous_parity(b)
    sign = -1 if pa and pb else 1
    return mul(a, b, char, window) - mul(b, a, char, window).scale(sign)


def jordan_identity_check(a, b, c, d, char: int = 0, window: int | None = None):
    """Residual of the graded linearized Jordan identity; zero iff satisfied.

    For homogeneous a, b, c, d the identity is

        (ab)(cd) + (-1)^{|b||c|}(ac)(bd) + (-1)^{(|b|+|c|)|d|}(ad)(bc)
      = ((ab)c)d + (-1)^{|b|(|c|+|d|)+|c||d|}((ad)c)b
                 + (-1)^{|a|(|b|+|c|+|d|)+|c||d|}((bd)c)a.
    """
    mul = _mul_for(a, b)
    _mul_for(c, d)
    _mul_for(a, c)
    pa, pb, pc, pd = (_homogeneous_parity(x) for x in (a, b, c, d))

    def mm(u, v):
        return mul(u, v, char, window)

    def sg(e):
        return -1 if e & 1 else 1

    lhs = (
        mm(mm(a, b), mm(c, d))
        + mm(mm(a, c), mm(b, d)).scale(sg(pb * pc))
        + mm(mm(a, d), mm(b, c)).scale(sg((pb + pc) * pd))
    )
    rhs = (
        mm(mm(mm(a, b), c), d)
        + mm(mm(mm(a, d), c), b).scale(sg(pb * (pc + pd) + pc * pd))
        + mm(mm(mm(b, d), c), a).scale(sg(pa * (pb + pc + pd) + pc * pd))
    )
    return lhs - rhs


# ---------------------------------------------------------------------------
# Jordan weight and the extended multidegree
# ---------------------------------------------------------------------------


def _mult_v(base) -> int:
    if base is None:
        return 0
    if isinstance(base, PBasisMonomial):
        return base.level()
    return 1


def jwt(w: JordanMonomial) -> int:
    """Jordan weight: twice the pivot-letter count, minus one if barred."""
    return 2 * _mult_v(w.base) - (1 if w.barred else 0)


def ext_multidegree(w: JordanMonomial) -> Tuple[int, int, int, int]:
    """(X1, X2, X3, X4) with X4 = 2(X1 + X2 + X3) - jwt; additive on products."""
    base = w.base
    if base is None or (isinstance(base, PBasisMonomial) and base.is_unit):
        g = (0, 0, 0)
    elif isinstance(base, PBasisMonomial):
        g = p_multidegree(base)
    else:
        g = multidegree(base)
    x4 = 2 * (g[0] + g[1] + g[2]) - jwt(w)
    return (g[0], g[1], g[2], x4)


# ---------------------------------------------------------------------------
# nillity and solvability
# ---------------------------------------------------------------------------


class NilDegreeExceeded(ArithmeticError):
    """A principal power survived past the sixth."""


def nil_probe(a: KElement, char: int = 0) -> int:
    """Least k with a^k = 0 under principal powers a^{k+1} = a^k . a.

    The argument must carry no unit component; every such element dies by
    the sixth power, so a surviving seventh is a hard failure.
    """
    if a.unit:
        raise ValueError("principal powers need an element without unit component")
    power = a
    k = 1
    while power:
        if k >= 6:
            raise NilDegreeExceeded("power %d of %r is still nonzero" % (k, a))
        power = jor_q_mul(power, a, char)
        k += 1
    return k


def derived_cube(a: KElement, char: int = 0) -> KElement:
    """(a.a).(a.a) then times a.a: zero for every a without unit component.

    This is the element form of the derived-square chain: a.a never has a
    bar(1) component, squares of that space land in Q, and products of Q
    against anything without bar(1) vanish.  Principal powers are weaker:
    for parity-mixed a they follow the adjoint orbit of the barred part
    and can survive past the sixth power, so the bounded nillity of K
    without unit is exactly this statement, not the principal one.
    """
    if a.unit:
        raise ValueError("the derived chain needs an element without unit component")
    sq = jor_q_mul(a, a, char)
    return jor_q_mul(jor_q_mul(sq, sq, char), sq, char)


def _k_text(m: Optional[StandardMonomial], barred: bool) -> str:
    return JordanMonomial(m, barred).text()


def solvability_check(length_cap: int = 10, char: int = 0, seed: int = 0,
                      exhaustive_head: int = 5, samples: int = 250) -> dict:
    """Derived-square chain of K0 = K without unit: three steps to zero.

    Checks, on spanning sets with basis heads at most length_cap, that
    products of K0 land in Q + bar(Q), that products of that space land in
    Q, and that products of Q vanish; pairs are exhaustive up to
    exhaustive_head and seeded samples beyond.  The middle step is exact:
    [v_{n-1}, x_{n-1} v_{n+2}] = v_{n+2} puts every pivot from v_3 up in
    the second derived span.
    """
    rng = random.Random(seed)
    standards = enumerate_basis(length_cap, char)
    small = [m for m in standards if m.head <= exhaustive_head]
    one_bar = KElement(unit_bar=1)
    violations: List[dict] = []
    stage_pairs = [0, 0, 0]

    def offending(prod: KElement, allowed: str) -> bool:
        if allowed == "plain+barred":
            return bool(prod.unit) or bool(prod.unit_bar)
        if allowed == "plain":
            return bool(prod.unit) or bool(prod.unit_bar) or bool(prod.barred)
        return bool(prod)

    def record(stage: int, left: str, right: str, allowed: str, prod: KElement):
        stage_pairs[stage - 1] += 1
        if offending(prod, allowed):
            violations.append({"stage": stage, "pair": (left, right), "value": repr(prod)})

    # stage 1: products of the K0 spanning set land in Q + bar(Q)
    for m in standards:
        w = KElement(plain=QElement.monomial(m))
        record(1, _k_text(m, False), "bar(1)", "plain+barred", jor_q_mul(w, one_bar, char))
        record(1, "bar(1)", _k_text(m, False), "plain+barred", jor_q_mul(one_bar, w, char))
    record(1, "bar(1)", "bar(1)", "plain+barred", jor_q_mul(one_bar, one_bar, char))

    def barred_pairs():
        for i, m1 in enumerate(small):
            for m2 in small[i:]:
                yield m1, m2
        for _ in range(samples):
            yield rng.choice(standards), rng.choice(standards)

    derived: List[QElement] = []
    for m1, m2 in barred_pairs():
        b1 = KElement(barred=QElement.monomial(m1))
        b2 = KElement(barred=QElement.monomial(m2))
        prod = jor_q_mul(b1, b2, char)
        record(1, _k_text(m1, True), _k_text(m2, True), "plain+barred", prod)
        # the same products are the spanning products of the second stage:
        # the first derived span is spanned by bar(Q) and values in Q
        record(2, _k_text(m1, True), _k_text(m2, True), "plain", prod)
        if prod.plain:
            derived.append(prod.plain)
    for _ in range(samples):
        m1, m2 = rng.choice(standards), rng.choice(standards)
        w1 = KElement(plain=QElement.monomial(m1))
        w2 = KElement(plain=QElement.monomial(m2))
        record(1, _k_text(m1, False), _k_text(m2, False), "plain+barred",
               jor_q_mul(w1, w2, char))
        record(2, _k_text(m1, False), _k_text(m2, True), "plain",
               jor_q_mul(w1, KElement(barred=QElement.monomial(m2)), char))

    # stage 3: the second derived span sits in Q, whose products vanish
    pool = derived if derived else [QElement()]
    for _ in range(min(samples, len(pool) * len(pool))):
        q1 = KElement(plain=rng.choice(pool))
        q2 = KElement(plain=rng.choice(pool))
        record(3, "derived", "derived", "zero", jor_q_mul(q1, q2, char))

    # exactness of the middle step: v_{n+2} = [v_{n-1}, x_{n-1} v_{n+2}]
    exact_pivots: List[int] = []
    for n in range(1, length_cap - 1):
        lead = StandardMonomial(n - 1, 0)
        mate = StandardMonomial(n + 2, 1 << (n - 1))
        prod = jor_q_mul(KElement(barred=QElement.monomial(lead)),
                         KElement(barred=QElement.monomial(mate)), char)
        if prod.plain.coeffs.get(StandardMonomial(n + 2, 0), 0):
            exact_pivots.append(n + 2)

    return {
        "check": "solvability",
        "length_cap": length_cap,
        "exhaustive_head": exhaustive_head,
        "seed": seed,
        "stage_pairs": tuple(stage_pairs),
        "middle_exact_pivots": exact_pivots,
        "violations": violations,
        "ok": not violations and bool(exact_pivots),
    }


# ---------------------------------------------------------------------------
# the quotient K = J / I
# ---------------------------------------------------------------------------


def _project_monomial(m: PBasisMonomial) -> Optional[StandardMonomial]:
    if m.is_unit:
        return None
    head = m.ys_mask().bit_length() - 1
    return StandardMonomial(head, m.alpha)


def _project_to_k(a: JElement) -> KElement:
    out = KElement()
    for part, barred in ((a.plain, False), (a.barred, True)):
        for m, c in part.items():
            if m.level() >= 2:
                continue
            out = out + KElement.monomial(_project_monomial(m), c, barred)
    return out


def quotient_check(weight_cap: float, char: int = 0, seed: int = 0,
                   samples: int = 250) -> dict:
    """K as J modulo the span I of monomials with two or more pivot letters.

    Verifies on sampled pairs under the weight cap that products against I
    stay in I, and that the product of J followed by the projection that
    kills I matches the direct K product on the level-one representatives.
    """
    rng = random.Random(seed)
    jbasis = p_basis_under_weight(weight_cap)
    ideal = [m for m in jbasis if m.level() >= 2]
    reps = [m for m in jbasis if m.level() <= 1]
    violations: List[dict] = []
    mismatches: List[dict] = []

    ideal_pairs = 0
    if ideal:
        for _ in range(samples):
            mi = rng.choice(ideal)
            mj = rng.choice(jbasis)
            fi, fj = rng.random() < 0.5, rng.random() < 0.5
            prod = kantor_mul(JElement.monomial(mi, barred=fi),
                              JElement.monomial(mj, barred=fj), char)
            ideal_pairs += 1
            bad = [jm.text() for jm in prod.support() if _mult_v(jm.base) < 2]
            if bad:
                violations.append({
                    "pair": (JordanMonomial(mi, fi).text(), JordanMonomial(mj, fj).text()),
                    "outside": bad,
                })

    def rep_pairs():
        light = [m for m in reps if p_monomial_weight(m) <= compute_roots()["lambda"] ** 3 + _TOL]
        for m1 in light:
            for m2 in light:
                for f1 in (False, True):
                    for f2 in (False, True):
                        yield m1, f1, m2, f2
        for _ in range(samples):
            yield (rng.choice(reps), rng.random() < 0.5,
                   rng.choice(reps), rng.random() < 0.5)

    sc_pairs = 0
    for m1, f1, m2, f2 in rep_pairs():
        a_j = JElement.monomial(m1, barred=f1)
        b_j = JElement.monomial(m2, barred=f2)
        lhs = _project_to_k(kantor_mul(a_j, b_j, char))
        rhs = jor_q_mul(KElement.monomial(_project_monomial(m1), 1, f1),
                        KElement.monomial(_project_monomial(m2), 1, f2), char)
        sc_pairs += 1
        if lhs != rhs:
            mismatches.append({
                "pair": (JordanMonomial(m1, f1).text(), JordanMonomial(m2, f2).text()),
                "projected": repr(lhs),
                "direct": repr(rhs),
            })

    return {
        "check": "quotient",
        "weight_cap": weight_cap,
        "seed": seed,
        "ideal_dim": len(ideal),
        "ideal_pairs": ideal_pairs,
        "ideal_violations": violations,
        "structure_pairs": sc_pairs,
        "structure_mismatches": mismatches,
        "ok": not violations and not mismatches,
    }


# ---------------------------------------------------------------------------
# component dimensions of K
# ---------------------------------------------------------------------------


def k_component_dims(n_cap: int = 10, head_cap: int = 12) -> dict:
    """Dimensions of K by total extended degree, against the ladder

        K_0 = <1>, K_1 = Q_1 + <bar(1)>, K_{3n-2} = Q_n, K_{3n-1} = bar(Q_n),
        K_{3n} = 0 for n >= 1,

    plus exhaustive N^4-fineness (components at most one-dimensional) and
    N^3-components of dimension exactly two, for basis heads <= head_cap.
    """
    _table, totals = hilbert_q(n_cap)  # totals[n - 1] = dim Q_n
    expected = [0] * (3 * n_cap + 1)
    expected[0] = 1
    expected[1] = 1  # bar(1)
    for n in range(1, n_cap + 1):
        expected[3 * n - 2] += totals[n - 1]
        expected[3 * n - 1] += totals[n - 1]

    counted = [0] * (3 * n_cap + 1)
    counted[0] += 1
    counted[sum(ext_multidegree(JordanMonomial(None, barred=True)))] += 1
    for m in enumerate_basis(head_cap_for_degree(n_cap)):
        if total_degree(m) > n_cap:
            continue
        for barred in (False, True):
            d = sum(ext_multidegree(JordanMonomial(m, barred)))
            if d <= 3 * n_cap:
                counted[d] += 1

    ext_seen: Dict[Tuple[int, int, int, int], int] = {}
    n3_seen: Dict[Tuple[int, int, int], int] = {}
    monomials = [JordanMonomial(None), JordanMonomial(None, barred=True)]
    for m in enumerate_basis(head_cap):
        monomials.append(JordanMonomial(m))
        monomials.append(JordanMonomial(m, barred=True))
    negative = []
    for jm in monomials:
        e = ext_multidegree(jm)
        if min(e) < 0:
            negative.append(jm.text())
        ext_seen[e] = ext_seen.get(e, 0) + 1
        n3_seen[e[:3]] = n3_seen.get(e[:3], 0) + 1

    n3_sizes = sorted(set(n3_seen.values()))
    return {
        "check": "k_component_dims",
        "n_cap": n_cap,
        "head_cap": head_cap,
        "degree_dims": expected,
        "matches_enumeration": counted == expected,
        "n4_max_multiplicity": max(ext_seen.values()),
        "n3_component_sizes": n3_sizes,
        "negative_degrees": negative,
        "ok": (counted == expected and max(ext_seen.values()) == 1
               and n3_sizes == [2] and not negative),
    }


# ---------------------------------------------------------------------------
# the four-step product chain on the generators
# ---------------------------------------------------------------------------


def display_identity_check(n_max: int = 8, algebra: str = "K", char: int = 0) -> dict:
    """Evaluates (V_{n-1}.bar(1)) . (((V_{n-1}.bar(1)) . (V_n.bar(1))) . bar(1)).

    The chain collapses to a single multiple of V_{n+2}; the report lists
    the computed coefficient for each n and compares it with the stated
    value -1.  The faithful product gives +V_{n+2}: the middle step is
    - {V_{n-1}, V_n} = +x_{n-1} V_{n+2} after the doubling sign, and the
    final bracket consumes x_{n-1} with no further sign.
    """
    rows = []
    for n in range(1, n_max + 1):
        if algebra == "J":
            gen = lambda i: JElement.monomial(PBasisMonomial(i, 0, 0))
            one_bar = JElement.unit(barred=True)
            mul = kantor_mul
            target = JordanMonomial(PBasisMonomial(n + 2, 0, 0))
        elif algebra == "K":
            gen = lambda i: KElement(plain=QElement.monomial(StandardMonomial(i, 0)))
            one_bar = KElement(unit_bar=1)
            mul = jor_q_mul
            target = JordanMonomial(StandardMonomial(n + 2, 0))
        else:
            raise ValueError("algebra must be 'J' or 'K'")
        a = mul(gen(n - 1), one_bar, char)
        b = mul(gen(n), one_bar, char)
        inner = mul(mul(a, b, char), one_bar, char)
        out = mul(a, inner, char)
        coeff = out.coeff(target)
        rows.append({
            "n": n,
            "coefficient": coeff,
            "single_term": out.support() == [target],
            "matches_stated": coeff == -1,
        })
    return {
        "check": "display_identity",
        "algebra": algebra,
        "stated_coefficient": -1,
        "rows": rows,
        "all_match_stated": all(r["matches_stated"] for r in rows),
        "all_single_term": all(r["single_term"] for r in rows),
    }


# ---------------------------------------------------------------------------
# generation of J
# ---------------------------------------------------------------------------


def j_generation_check(weight_cap: float | None = None, char: int = 0) -> dict:
    """Closure of {V0, V1, V2, bar(1)} under the product reaches every basis
    monomial of J up to the weight cap (default lambda^6), except the unit:
    products of the generators always carry a pivot letter or a bar, so 1
    is adjoined, never generated.

    Weight is additive on products, so only pairs whose weights sum under
    the cap are multiplied; the closure is run monomial by monomial (the
    support of a product of reached monomials is reached).
    """
    lam = compute_roots()["lambda"]
    if weight_cap is None:
        weight_cap = lam**6
    targets: Dict[JordanMonomial, float] = {}
    for m in p_basis_under_weight(weight_cap):
        if m.is_unit:
            targets[JordanMonomial(m, barred=True)] = 0.0
            continue
        w = p_monomial_weight(m)
        targets[JordanMonomial(m)] = w
        targets[JordanMonomial(m, barred=True)] = w

    seeds = [JordanMonomial(PBasisMonomial(i, 0, 0)) for i in range(3)]
    seeds.append(JordanMonomial(P_UNIT, barred=True))
    reached: Dict[JordanMonomial, float] = {jm: targets[jm] for jm in seeds}
    frontier = list(seeds)
    products = 0
    while frontier:
        new: Dict[JordanMonomial, float] = {}
        partners = list(reached.items())
        for jm1 in frontier:
            w1 = reached[jm1]
            a = JElement.monomial(jm1.base, barred=jm1.barred)
            for jm2, w2 in partners:
                if w1 + w2 > weight_cap + _TOL:
                    continue
                b = JElement.monomial(jm2.base, barred=jm2.barred)
                products += 1
                for jm, _c in kantor_mul(a, b, char).items():
                    if jm in reached or jm in new:
                        continue
                    if jm.base.is_unit and not jm.barred:
                        continue
                    wt = 0.0 if jm.base.is_unit else p_monomial_weight(jm.base)
                    if wt <= weight_cap + _TOL:
                        new[jm] = wt
        reached.update(new)
        frontier = list(new)

    missing = sorted(jm.text() for jm in targets if jm not in reached)
    return {
        "check": "j_generation",
        "weight_cap": weight_cap,
        "targets": len(targets),
        "reached": len(reached),
        "products": products,
        "missing": missing,
        "ok": not missing,
    }
