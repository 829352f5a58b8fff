"""Weights, multidegrees, coordinates, Hilbert series, and geometric checks.

The recurrence v_i = d_i + x_i x_{i+1} v_{i+3} forces any additive weight
function with wt(x_i) = -wt(v_i) to satisfy a_{i+3} = a_{i+1} + 2 a_i, whose
characteristic polynomial is t^3 - t - 2 with one real root lambda ~ 1.5214
and a complex pair mu, conj(mu). Powers of the roots give three independent
additive weights:

    wt(v_n) = lambda^n,  swt(v_n) = mu^n,  and the conjugate of swt.

The multidegree Gr(w) in the generators v_0, v_1, v_2 is an exact integer
vector; weights are linear in it through the Vandermonde matrix B (rows
(1, t, t^2) per root) and its real form C. Twisted coordinates are
(Y1, Y2, Y3) = (wt, Re swt, Im swt).

Float arithmetic appears only here: gradings and dimension counts always
compare exact integer multidegrees, while inequalities (paraboloid bounds,
weight estimates) are evaluated in doubles with a small guard band.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .lieq import (
    QElement,
    StandardMonomial,
    bracket,
    enumerate_basis,
    false_monomials,
    is_false,
    monomial_text,
    square,
)
from .operators import indices_of

GUARD = 1e-9


class DegenerateAngle(Exception):
    """A splitting line passes within tolerance of a monomial's projection."""


class CapExceeded(Exception):
    """An iteration probe did not terminate within its step cap."""


# ---------------------------------------------------------------------------
# roots of t^3 - t - 2
# ---------------------------------------------------------------------------

_roots_cache: dict = {}


def compute_roots() -> dict:
    """The real root lambda, complex root mu, and sigma = log_|mu| lambda.

    Cardano's formulas give the closed forms; a Newton polish brings both
    roots to machine precision.
    """
    if _roots_cache:
        return dict(_roots_cache)
    eps = complex(-0.5, math.sqrt(3.0) / 2.0)
    s = math.sqrt(26.0 / 27.0)
    theta1 = (1.0 + s) ** (1.0 / 3.0)
    theta2 = (1.0 - s) ** (1.0 / 3.0)
    lam = theta1 + theta2
    for _ in range(8):
        lam -= (lam**3 - lam - 2.0) / (3.0 * lam**2 - 1.0)
    mu = eps * theta1 + eps * eps * theta2
    for _ in range(8):
        mu -= (mu**3 - mu - 2.0) / (3.0 * mu**2 - 1.0)
    abs_mu = math.sqrt(2.0 / lam)
    sigma = math.log(lam) / math.log(abs_mu)
    _roots_cache.update(
        {
            "lambda": lam,
            "mu": mu,
            "mu_bar": mu.conjugate(),
            "abs_mu": abs_mu,
            "sigma": sigma,
        }
    )
    return dict(_roots_cache)


def weight_lambda() -> float:
    return compute_roots()["lambda"]


def weight_mu() -> complex:
    return compute_roots()["mu"]


def sigma_value() -> float:
    return compute_roots()["sigma"]


def _lambda_powers(n: int) -> np.ndarray:
    return weight_lambda() ** np.arange(n + 1)


def _mu_powers(n: int) -> np.ndarray:
    return weight_mu() ** np.arange(n + 1)


# ---------------------------------------------------------------------------
# multidegree
# ---------------------------------------------------------------------------

_gr_table: List[Tuple[int, int, int]] = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def pivot_multidegree(n: int) -> Tuple[int, int, int]:
    """Gr(v_n), exact integers, from Gr(v_{i+3}) = Gr(v_{i+1}) + 2 Gr(v_i)."""
    while len(_gr_table) <= n:
        a = _gr_table[-2]
        b = _gr_table[-3]
        _gr_table.append((a[0] + 2 * b[0], a[1] + 2 * b[1], a[2] + 2 * b[2]))
    return _gr_table[n]


def multidegree_parts(head: int, tail: int) -> Tuple[int, int, int]:
    n1, n2, n3 = pivot_multidegree(head)
    for i in indices_of(tail):
        g = pivot_multidegree(i)
        n1 -= g[0]
        n2 -= g[1]
        n3 -= g[2]
    return (n1, n2, n3)


def multidegree(m: StandardMonomial) -> Tuple[int, int, int]:
    return multidegree_parts(m.head, m.tail)


def total_degree(m: StandardMonomial) -> int:
    return sum(multidegree(m))


def shift_multidegree(gr: Tuple[int, int, int]) -> Tuple[int, int, int]:
    """Multidegree of the index-shift image: (n1,n2,n3) -> (2n3, n1+n3, n2)."""
    n1, n2, n3 = gr
    return (2 * n3, n1 + n3, n2)


# ---------------------------------------------------------------------------
# weights of monomials
# ---------------------------------------------------------------------------


def monomial_weight_parts(head: int, tail: int) -> float:
    lam = weight_lambda()
    return lam**head - sum(lam**i for i in indices_of(tail))


def monomial_weight(m: StandardMonomial) -> float:
    return monomial_weight_parts(m.head, m.tail)


def monomial_super_weight_parts(head: int, tail: int) -> complex:
    mu = weight_mu()
    return mu**head - sum(mu**i for i in indices_of(tail))


def monomial_super_weight(m: StandardMonomial) -> complex:
    return monomial_super_weight_parts(m.head, m.tail)


def weights(m: StandardMonomial) -> Tuple[tuple, tuple]:
    """((Z1, Z2, Z3), (Y1, Y2, Y3)): weight and twisted coordinates."""
    z1 = monomial_weight(m)
    z2 = monomial_super_weight(m)
    return ((z1, z2, z2.conjugate()), (z1, z2.real, z2.imag))


def twisted_coordinates(m: StandardMonomial) -> Tuple[float, float, float]:
    return weights(m)[1]


def element_weight(a: QElement) -> float:
    """Common weight of a multihomogeneous element's support (must agree)."""
    values = {multidegree(m) for m in a.support()}
    if len(values) != 1:
        raise ValueError("element is not weight-homogeneous")
    return weight_of_multidegree(values.pop())


def weight_of_multidegree(gr: Sequence[int]) -> float:
    lam = weight_lambda()
    return gr[0] + gr[1] * lam + gr[2] * lam * lam


def super_weight_of_multidegree(gr: Sequence[int]) -> complex:
    mu = weight_mu()
    return gr[0] + gr[1] * mu + gr[2] * mu * mu


# ---------------------------------------------------------------------------
# transition matrices
# ---------------------------------------------------------------------------


def transition_matrices():
    """(B, C, B^-1, C^-1).

    B has rows (1, t, t^2) for t = lambda, mu, conj(mu), so Z = B X for a
    multidegree column X. C is the real form with rows (wt, Re swt, Im swt).
    B^-1 has the closed-form columns ((2/t), t, 1) / (3t^2 - 1).
    """
    r = compute_roots()
    lam, mu = r["lambda"], r["mu"]
    roots = [lam, mu, mu.conjugate()]
    b = np.array([[1.0, t, t * t] for t in roots], dtype=complex)
    c = np.array(
        [
            [1.0, lam, lam * lam],
            [1.0, mu.real, (mu * mu).real],
            [0.0, mu.imag, (mu * mu).imag],
        ],
        dtype=float,
    )
    b_inv = np.array(
        [[(2.0 / t) / (3.0 * t * t - 1.0) for t in roots],
         [t / (3.0 * t * t - 1.0) for t in roots],
         [1.0 / (3.0 * t * t - 1.0) for t in roots]],
        dtype=complex,
    )
    c_inv = np.linalg.inv(c)
    return b, c, b_inv, c_inv


def oy1_direction() -> np.ndarray:
    """Multidegree-space direction of the axis Y2 = Y3 = 0: (2/lambda, lambda, 1)."""
    lam = weight_lambda()
    return np.array([2.0 / lam, lam, 1.0])


def pivot_multidegree_closed_form(n: int) -> np.ndarray:
    """Gr(v_n) as the closed form B^-1 (lambda^n, mu^n, conj(mu)^n)."""
    r = compute_roots()
    lam, mu = r["lambda"], r["mu"]
    _, _, b_inv, _ = transition_matrices()
    z = np.array([lam**n, mu**n, mu.conjugate() ** n], dtype=complex)
    return (b_inv @ z).real


def pivot_degree_closed_form(n: int) -> float:
    """deg(v_n) = (4 lambda^2 + lambda + 6)/26 lambda^n + conjugate terms."""
    r = compute_roots()
    lam, mu = r["lambda"], r["mu"]
    total = (4 * lam * lam + lam + 6) / 26.0 * lam**n
    total += 2.0 * ((4 * mu * mu + mu + 6) / 26.0 * mu**n).real
    return total


# ---------------------------------------------------------------------------
# Hilbert series
# ---------------------------------------------------------------------------


def head_cap_for_degree(max_total_degree: int) -> int:
    """Heads that can reach total degree <= D: wt <= lambda^2 D and
    wt > lambda^(n-5) force n < 7 + log_lambda D."""
    if max_total_degree < 1:
        return 0
    return 7 + max(0, math.ceil(math.log(max_total_degree, weight_lambda())))


def hilbert_series(basis: Iterable[StandardMonomial], max_total_degree: int):
    """(multigraded table, total-degree coefficient list) from a basis list.

    The caller must supply a basis complete through total degree D; use
    head_cap_for_degree to pick the enumeration bound.
    """
    table: Dict[Tuple[int, int, int], int] = {}
    totals = [0] * (max_total_degree + 1)
    for m in basis:
        gr = multidegree(m)
        d = gr[0] + gr[1] + gr[2]
        if 0 <= d <= max_total_degree:
            table[gr] = table.get(gr, 0) + 1
            totals[d] += 1
    return table, totals[1:]


def hilbert_q(max_total_degree: int, char: int = 0):
    basis = enumerate_basis(head_cap_for_degree(max_total_degree), char)
    return hilbert_series(basis, max_total_degree)


# ---------------------------------------------------------------------------
# vectorized per-head enumeration helpers
# ---------------------------------------------------------------------------


def _doubling_sums(base, values, dtype):
    """Array over all subsets S of `values` (row index = subset bitmask) of
    base - sum(S)."""
    out = np.full(1, base, dtype=dtype)
    for v in values:
        out = np.concatenate([out, out - v])
    return out


def _doubling_gr(base: np.ndarray, grs: List[np.ndarray]) -> np.ndarray:
    out = base.reshape(1, 3).copy()
    for g in grs:
        out = np.concatenate([out, out - g])
    return out


def _head_tail_families(head: int):
    """(free index list, fixed-neck mask) per family of quasi-standard tails."""
    yield list(range(max(head - 2, 0))), 0
    if head >= 2:
        yield list(range(max(head - 4, 0))), 1 << (head - 2)


def _encode_gr(gr_rows: np.ndarray) -> np.ndarray:
    shifted = gr_rows.astype(np.int64) + 4
    return shifted[:, 0] + (shifted[:, 1] << 16) + (shifted[:, 2] << 32)


def _decode_gr(code: int) -> Tuple[int, int, int]:
    return (
        int(code & 0xFFFF) - 4,
        int((code >> 16) & 0xFFFF) - 4,
        int((code >> 32) & 0xFFFF) - 4,
    )


def _false_code(head: int, tail: int) -> int:
    return int(_encode_gr(np.array([multidegree_parts(head, tail)]))[0])


# ---------------------------------------------------------------------------
# fine grading
# ---------------------------------------------------------------------------


def fine_grading_check(max_length: int = 20, population: str = "standard") -> dict:
    """Verify pairwise-distinct multidegrees over all monomials of head <= L.

    population "standard" excludes the 24 false monomials, "quasi" keeps
    them. Comparison is exact on integer multidegrees; since 1, lambda,
    lambda^2 are rationally independent (the minimal polynomial of lambda
    is an irreducible cubic), distinct multidegrees also have distinct wt
    values, so this simultaneously checks weight injectivity.
    """
    chunks = []
    for head in range(max_length + 1):
        base_gr = np.array(pivot_multidegree(head), dtype=np.int64)
        for free, neck in _head_tail_families(head):
            base = base_gr.copy()
            if neck:
                base = base - np.array(
                    pivot_multidegree(head - 2), dtype=np.int64
                )
            grs = [np.array(pivot_multidegree(i), dtype=np.int64) for i in free]
            chunks.append(_encode_gr(_doubling_gr(base, grs)))
    codes = np.concatenate(chunks)
    uniq, counts = np.unique(codes, return_counts=True)
    if population == "standard":
        for head, tail in false_monomials(min(max_length, 12)):
            pos = np.searchsorted(uniq, _false_code(head, tail))
            counts[pos] -= 1
    collisions = [_decode_gr(c) for c in uniq[counts > 1]]
    return {
        "check": "fine_grading",
        "params": {"max_length": max_length, "population": population},
        "violations": collisions,
        "stats": {"monomials": int(counts.sum()), "distinct": int((counts > 0).sum())},
    }


# ---------------------------------------------------------------------------
# paraboloid bounds
# ---------------------------------------------------------------------------


def _q_weight_arrays(max_head: int, with_type: bool = False):
    """Yield (head, [type,] wt array, swt array) per quasi-standard family."""
    lam_pow = _lambda_powers(max_head)
    mu_pow = _mu_powers(max_head)
    for head in range(max_head + 1):
        for mtype, (free, neck) in enumerate(_head_tail_families(head), start=1):
            base_wt = lam_pow[head]
            base_swt = mu_pow[head]
            if neck:
                base_wt -= lam_pow[head - 2]
                base_swt -= mu_pow[head - 2]
            wt = _doubling_sums(base_wt, [lam_pow[i] for i in free], np.float64)
            swt = _doubling_sums(base_swt, [mu_pow[i] for i in free], np.complex128)
            if with_type:
                yield head, mtype, wt, swt
            else:
                yield head, wt, swt


def paraboloid_check(algebra: str = "Q", max_head: int = 25, constant: float | None = None) -> dict:
    """Zero violations of sqrt(Y2^2 + Y3^2) < c * Y1^(1/sigma).

    c defaults to 14 for Q and 16 for P or A. The Q scan covers every
    quasi-standard monomial; the P/A scan covers every per-index difference
    pattern of the basis shapes, a superset of the basis.
    """
    if constant is None:
        constant = 14.0 if algebra == "Q" else 16.0
    sigma = sigma_value()
    if algebra == "Q":
        stream = _q_weight_arrays(max_head)
    elif algebra in ("P", "A"):
        from .poisson import pattern_weight_arrays

        stream = pattern_weight_arrays(max_head)
    else:
        raise ValueError("algebra must be Q, P, or A")
    total = 0
    violations = 0
    max_ratio = 0.0
    for _head, wt, swt in stream:
        radial = np.abs(swt)
        bound = constant * np.power(wt, 1.0 / sigma)
        total += wt.size
        violations += int(np.count_nonzero(radial >= bound))
        ratio = float(np.max(radial / bound))
        if ratio > max_ratio:
            max_ratio = ratio
    return {
        "check": "paraboloid",
        "params": {"algebra": algebra, "max_head": max_head, "constant": constant},
        "violations": violations,
        "stats": {"monomials": total, "max_ratio": max_ratio},
    }


def pivots_on_paraboloid(max_n: int = 25, rtol: float = 1e-6) -> dict:
    """v_n satisfies Y1 = (Y2^2 + Y3^2)^(sigma/2) to relative tolerance."""
    r = compute_roots()
    lam, mu, sigma = r["lambda"], r["mu"], r["sigma"]
    worst = 0.0
    bad = []
    for n in range(max_n + 1):
        y1 = lam**n
        radial_sq = abs(mu**n) ** 2
        err = abs(radial_sq ** (sigma / 2.0) - y1) / y1
        worst = max(worst, err)
        if err > rtol:
            bad.append(n)
    return {
        "check": "pivots_on_paraboloid",
        "params": {"max_n": max_n, "rtol": rtol},
        "violations": bad,
        "stats": {"max_relative_error": worst},
    }


# ---------------------------------------------------------------------------
# weight bounds
# ---------------------------------------------------------------------------


def weight_bounds_check(algebra: str = "Q", max_length: int = 20) -> dict:
    """Exhaustive weight and superweight estimates, strict sides guarded.

    Q side, for every quasi-standard monomial of head n <= L:
      first type:   1.3 lambda^(n-5) < wt <= lambda^n
      second type:  1.1 lambda^(n-4) < wt <= 2 lambda^(n-3)  (n >= 2)
      both types:   lambda^(n-5) < wt <= lambda^n,  |swt| < 7 |mu|^n
    P/A side, for every basis monomial of head n <= L:
      lambda^(n-5) < wt < 2 lambda^(n+1),  |swt| < 8 |mu|^n
    """
    r = compute_roots()
    lam, abs_mu = r["lambda"], r["abs_mu"]
    failures = []
    total = 0

    def strict(values: np.ndarray, bound: float, label: str, head: int):
        # strict inequality values < bound, with a guard band on the margin
        bad = int(np.count_nonzero(values >= bound - GUARD * max(1.0, abs(bound))))
        if bad:
            failures.append({"head": head, "rule": label, "count": bad})

    def loose(values: np.ndarray, bound: float, label: str, head: int):
        # values <= bound, tolerating float fuzz of the same band
        bad = int(np.count_nonzero(values > bound + GUARD * max(1.0, abs(bound))))
        if bad:
            failures.append({"head": head, "rule": label, "count": bad})

    if algebra == "Q":
        for head, mtype, wt, swt in _q_weight_arrays(max_length, with_type=True):
            total += wt.size
            strict(-wt, -(lam ** (head - 5)), "lambda^(n-5) < wt", head)
            loose(wt, lam**head, "wt <= lambda^n", head)
            if mtype == 1:
                strict(-wt, -1.3 * lam ** (head - 5), "1.3 lambda^(n-5) < wt", head)
            else:
                strict(-wt, -1.1 * lam ** (head - 4), "1.1 lambda^(n-4) < wt", head)
                loose(wt, 2 * lam ** (head - 3), "wt <= 2 lambda^(n-3)", head)
            strict(np.abs(swt), 7 * abs_mu**head, "|swt| < 7 |mu|^n", head)
    elif algebra in ("P", "A"):
        from .poisson import basis_weight_arrays

        for head, wt, swt in basis_weight_arrays(max_length):
            total += wt.size
            strict(-wt, -(lam ** (head - 5)), "lambda^(n-5) < wt", head)
            strict(wt, 2 * lam ** (head + 1), "wt < 2 lambda^(n+1)", head)
            strict(np.abs(swt), 8 * abs_mu**head, "|swt| < 8 |mu|^n", head)
    else:
        raise ValueError("algebra must be Q, P, or A")
    return {
        "check": "weight_bounds",
        "params": {"algebra": algebra, "max_length": max_length},
        "violations": failures,
        "stats": {"monomials": total},
    }


# ---------------------------------------------------------------------------
# growth
# ---------------------------------------------------------------------------


def head_cap_for_weight(max_weight: float) -> int:
    """Largest head a monomial of weight <= max_weight can have."""
    return math.ceil(5 + math.log(max_weight, weight_lambda()) - 1e-9) - 1


def standard_weight_counts(thresholds: Sequence[float]) -> List[int]:
    """Number of standard monomials of weight <= m, per threshold."""
    cap = head_cap_for_weight(max(thresholds))
    chunks = [wt for _head, wt in ((h, w) for h, w, _s in _q_weight_arrays(cap))]
    all_wt = np.sort(np.concatenate(chunks))
    false_wt = np.array(
        [monomial_weight_parts(h, t) for h, t in false_monomials(min(cap, 12))]
    )
    out = []
    for m in thresholds:
        count = int(np.searchsorted(all_wt, m, side="right"))
        count -= int(np.count_nonzero(false_wt <= m))
        out.append(count)
    return out


def growth_grid(lo_exp: int = 8, hi_exp: int = 16) -> np.ndarray:
    return weight_lambda() ** np.arange(lo_exp, hi_exp + 1, dtype=float)


def growth_report(algebras: Sequence[str] = ("Q", "K", "P", "A", "J"),
                  lo_exp: int = 8, hi_exp: int = 16) -> dict:
    """Log-log regression slope of weight-growth counts over the grid.

    Expected limits: log_lambda 2 ~ 1.6518 for Q and its Jordan double K,
    2 log_lambda 2 ~ 3.3036 for P, A, and J. Desk scale only approximates
    the limit, so acceptance uses loose bands.
    """
    ms = growth_grid(lo_exp, hi_exp)
    slopes: Dict[str, float] = {}
    counts: Dict[str, List[int]] = {}
    q_counts = None
    p_counts = None
    for name in algebras:
        if name in ("Q", "K") and q_counts is None:
            q_counts = standard_weight_counts(ms)
        if name in ("P", "A", "J") and p_counts is None:
            from .poisson import basis_weight_counts

            p_counts = basis_weight_counts(ms)
    for name in algebras:
        if name == "Q":
            c = q_counts
        elif name == "K":
            # the Jordan double carries a barred copy of every monomial
            # plus the two unit elements
            c = [2 * v + 2 for v in q_counts]
        elif name in ("P", "A"):
            c = p_counts
        elif name == "J":
            c = [2 * v + 2 for v in p_counts]
        else:
            raise ValueError("unknown algebra %r" % name)
        counts[name] = list(c)
        slopes[name] = float(np.polyfit(np.log(ms), np.log(c), 1)[0])
    base = math.log(2) / math.log(weight_lambda())
    targets = {"Q": (base, 0.15), "K": (base, 0.15),
               "P": (2 * base, 0.2), "A": (2 * base, 0.2), "J": (2 * base, 0.2)}
    bands: Dict[str, dict] = {}
    violations = []
    for name in algebras:
        target, tolerance = targets[name]
        bands[name] = {"slope": slopes[name], "target": target, "tolerance": tolerance}
        if abs(slopes[name] - target) > tolerance:
            violations.append({"algebra": name, "slope": slopes[name],
                               "target": target, "tolerance": tolerance})
    return {
        "check": "growth",
        "params": {"grid_exponents": [lo_exp, hi_exp]},
        "violations": violations,
        "stats": {"slopes": slopes, "counts": counts, "bands": bands},
    }


def lattice_share_report(lo_exp: int = 8, hi_exp: int = 14) -> dict:
    """Share of paraboloid lattice points realized by standard monomials.

    For each m in the grid, the ratio of standard monomials of weight <= m
    to nonnegative lattice points (n1,n2,n3) with Y1 <= m inside the Q
    paraboloid. Reported (with the minimum recorded), not asserted against
    a reference value.
    """
    r = compute_roots()
    lam, mu, sigma = r["lambda"], r["mu"], r["sigma"]
    ms = growth_grid(lo_exp, hi_exp)
    monomial_counts = standard_weight_counts(ms)
    ratios = []
    for m, mono in zip(ms, monomial_counts):
        lattice = 0
        for n3 in range(int(m / lam**2) + 2):
            for n2 in range(int((m - n3 * lam**2) / lam) + 2):
                rest = n2 * lam + n3 * lam * lam
                if rest > m:
                    continue
                n1 = np.arange(0, int(m - rest) + 1)
                y1 = n1 + rest
                z = n1 + n2 * mu + n3 * mu * mu
                inside = np.abs(z) < 14.0 * np.power(
                    np.maximum(y1, 1e-300), 1.0 / sigma
                )
                inside &= y1 > 0
                lattice += int(np.count_nonzero(inside))
        ratios.append(mono / lattice if lattice else 0.0)
    return {
        "check": "lattice_share",
        "params": {"grid_exponents": [lo_exp, hi_exp]},
        "violations": [],
        "stats": {
            "ratios": [float(x) for x in ratios],
            "min_ratio": float(min(ratios)),
        },
    }


# ---------------------------------------------------------------------------
# plane splits
# ---------------------------------------------------------------------------


def _side_of(swt: complex, theta: float) -> int:
    s = math.cos(theta) * swt.real + math.sin(theta) * swt.imag
    if abs(s) <= 1e-12:
        raise DegenerateAngle("projection %.3e lies on the splitting line" % s)
    return 1 if s > 0 else -1


def plane_split(theta: float, basis: Sequence[StandardMonomial]):
    """Partition monomials by the sign of cos(theta) Y2 + sin(theta) Y3.

    The plane contains the axis OY1; superweights add under brackets, so
    each open half-plane spans a subalgebra. Raises DegenerateAngle when a
    monomial projects onto the line within 1e-12.
    """
    plus, minus = [], []
    for m in basis:
        if _side_of(monomial_super_weight(m), theta) > 0:
            plus.append(m)
        else:
            minus.append(m)
    return plus, minus


def plane_split_check(theta: float, max_head: int = 15, seed: int = 0,
                      bracket_samples: int = 200, char: int = 0,
                      window_slack: int = 0) -> dict:
    """Split all standard monomials of head <= max_head and verify closure.

    Checks: no monomial projects onto the line, both sides are nonempty, no
    monomial has superweight (0,0) (exact: its multidegree would have to
    vanish, impossible for positive-weight monomials), and brackets of
    seeded same-side pairs land on the same side. Closure holds in general
    because superweights add; the sampled brackets exercise the oracle.
    """
    basis = enumerate_basis(max_head, char)
    for m in basis:
        if multidegree(m) == (0, 0, 0):
            raise AssertionError("monomial with vanishing multidegree: %r" % m)
    plus, minus = plane_split(theta, basis)
    rng = np.random.default_rng(seed)
    checked = 0
    offside = []
    for side, pool in ((1, plus), (-1, minus)):
        if len(pool) < 2:
            continue
        for _ in range(bracket_samples // 2):
            i, j = rng.integers(0, len(pool), size=2)
            m1, m2 = pool[int(i)], pool[int(j)]
            window = max(m1.head, m2.head) + 18 + window_slack
            prod = bracket(
                QElement.monomial(m1), QElement.monomial(m2), char, window=window
            )
            checked += 1
            for m in prod.support():
                if _side_of(monomial_super_weight(m), theta) != side:
                    offside.append((monomial_text(m1), monomial_text(m2)))
    return {
        "check": "plane_split",
        "params": {"theta": theta, "max_head": max_head, "seed": seed},
        "violations": offside,
        "stats": {
            "side_plus": len(plus),
            "side_minus": len(minus),
            "brackets_checked": checked,
        },
    }


def angle_partition_difference(theta1: float, theta2: float, max_k: int = 40) -> List[int]:
    """Pivot indices k <= max_k on which the two splittings disagree."""
    mu = weight_mu()
    out = []
    for k in range(max_k + 1):
        if _side_of(mu**k, theta1) != _side_of(mu**k, theta2):
            out.append(k)
    return out


# ---------------------------------------------------------------------------
# nilpotency probes
# ---------------------------------------------------------------------------


def local_nilpotency_probe(generators: Sequence[QElement], step_cap: int = 20,
                           char: int = 0, dim_cap: int = 400,
                           window_slack: int = 0) -> int:
    """Nilpotency class of the subalgebra generated by the given elements.

    Builds the bracket-and-square closure (finite when the generators lie
    on one side of a valid splitting plane, by local nilpotency), then runs
    the lower central series until it vanishes. Returns the least k with
    S^k = 0; raises CapExceeded past step_cap or dim_cap.
    """
    from .linalg import Echelon

    def _bracket(a: QElement, b: QElement) -> QElement:
        window = max(a.max_head(), b.max_head()) + 18 + window_slack
        return bracket(a, b, char, window=window)

    span = Echelon(char)
    basis: List[QElement] = []
    for g in generators:
        if g and span.insert(dict(g.items())):
            basis.append(g)
    if not basis:
        return 0
    frontier = list(basis)
    while frontier:
        fresh: List[QElement] = []
        for a in frontier:
            candidates = [_bracket(a, b) for b in basis]
            if a.parity() == 1:
                candidates.append(square(a, char, window=a.max_head() + 18 + window_slack))
            for c in candidates:
                if c and span.insert(dict(c.items())):
                    basis.append(c)
                    fresh.append(c)
                    if len(basis) > dim_cap:
                        raise CapExceeded("closure dimension exceeded %d" % dim_cap)
        frontier = fresh
    layer = list(basis)
    k = 1
    while layer:
        k += 1
        if k > step_cap:
            raise CapExceeded("lower central series still nonzero at step %d" % step_cap)
        level = Echelon(char)
        rows: List[QElement] = []
        for a in basis:
            for b in layer:
                c = _bracket(a, b)
                if c and level.insert(dict(c.items())):
                    rows.append(c)
        layer = rows
    return k


def ad_nilpotency_probe(a: QElement, targets: Sequence[StandardMonomial],
                        cap: int = 60, char: int = 0,
                        window_slack: int = 0) -> int:
    """max over targets b of the least k with (ad a)^k(b) = 0.

    Each bracket against a basis monomial is computed once at its own safe
    window and cached, so iterated applications are sparse map lookups.
    Raises CapExceeded if any chain survives past `cap` steps.
    """
    if a.parity() == "mixed":
        raise ValueError("ad source must be homogeneous")
    cache: Dict[StandardMonomial, QElement] = {}

    def image(m: StandardMonomial) -> QElement:
        out = cache.get(m)
        if out is None:
            window = max(a.max_head(), m.head) + 18 + window_slack
            out = cache[m] = bracket(a, QElement.monomial(m), char, window=window)
        return out

    worst = 0
    for t in targets:
        v = QElement.monomial(t)
        k = 0
        while v:
            k += 1
            if k > cap:
                raise CapExceeded("ad chain from %r not dead after %d steps" % (t, cap))
            acc = QElement()
            for m, c in v.items():
                acc = acc + image(m).scale(c)
            v = acc
        worst = max(worst, k)
    return worst


def nil_p_mapping_probe(a: QElement, cap: int = 12, window_slack: int = 0,
                        _caches: dict | None = None) -> int:
    """Least k with the k-fold formal square of `a` equal to 0, over F2.

    The square of a sum expands as sum of squares plus pairwise brackets,
    so per-monomial squares and pairwise brackets are cached and reused
    across probe calls via the optional `_caches` dict.
    """
    if _caches is None:
        _caches = {}
    sq_cache = _caches.setdefault("sq", {})
    br_cache = _caches.setdefault("br", {})

    def mono_square(m: StandardMonomial) -> QElement:
        out = sq_cache.get(m)
        if out is None:
            out = sq_cache[m] = square(
                QElement.monomial(m), 2, window=m.head + 18 + window_slack
            )
        return out

    def mono_bracket(m1: StandardMonomial, m2: StandardMonomial) -> QElement:
        key = (m1, m2) if m1.key() <= m2.key() else (m2, m1)
        out = br_cache.get(key)
        if out is None:
            window = max(m1.head, m2.head) + 18 + window_slack
            out = br_cache[key] = bracket(
                QElement.monomial(key[0]), QElement.monomial(key[1]), 2, window=window
            )
        return out

    k = 0
    v = a
    while v:
        k += 1
        if k > cap:
            raise CapExceeded("formal squares not dead after %d steps" % cap)
        support = sorted(v.support())
        acc = QElement()
        for i, m in enumerate(support):
            acc = acc + mono_square(m)
            for m2 in support[i + 1:]:
                acc = acc + mono_bracket(m, m2)
        v = acc
    return k


# ---------------------------------------------------------------------------
# point export
# ---------------------------------------------------------------------------


def points_rows(max_head: int, char: int = 0) -> List[tuple]:
    """Rows (head, type, X1, X2, X3, Y1, Y2, Y3, wt, abs_swt) per monomial."""
    rows = []
    for m in enumerate_basis(max_head, char):
        gr = multidegree(m)
        z, y = weights(m)
        rows.append(
            (
                m.head,
                2 if m.type2 else 1,
                gr[0],
                gr[1],
                gr[2],
                y[0],
                y[1],
                y[2],
                z[0],
                abs(z[1]),
            )
        )
    return rows
