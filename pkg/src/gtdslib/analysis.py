"""Exhaustive differential and linear analysis with bound checking.

Tables index states big-endian (component 1 is the most significant base-q
digit). Full sweeps are capped at q^n <= 2^10 by default -- they cost
O(q^2n) -- while single-pair correlation queries go up to q^n <= 2^16.
Count tables are exact integers; correlations are double-precision complex,
with a 1e-9 zero threshold and 1e-6 slack on bound comparisons.
"""

from __future__ import annotations

import cmath
import functools
from dataclasses import dataclass, field as dc_field
from math import comb, gcd, sqrt

import numpy as np

from .cipher import AffineLayer, CipherSpec, RoundKeys
from .errors import ArityMismatch, DegreeTooLow, DomainTooLarge, HypothesisUnverified
from .field import FieldCtx, FieldElement
from .gtds import Gtds, all_states, state_index
from .polynomial import UniPoly, perm_poly_certificate, is_permutation_polynomial, reduce_mod

FULL_SWEEP_CAP = 1 << 10
PAIR_CAP = 1 << 16
UNI_CAP = 1 << 12
ZERO_TOL = 1e-9
BOUND_SLACK = 1e-6


# -- domain tables -----------------------------------------------------------


def _check_domain(size: int, cap: int) -> None:
    if size > cap:
        raise DomainTooLarge(f"domain {size} exceeds cap {cap}")


def _component_table(ctx: FieldCtx, n: int) -> np.ndarray:
    """(N, n) array: component element-indices of every state index."""
    q = ctx.q
    idx = np.arange(q**n, dtype=np.int64)
    return np.stack([(idx // q ** (n - 1 - j)) % q for j in range(n)], axis=1)


def _digit_table(ctx: FieldCtx, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Base-p digit expansion of every state, plus the recombination weights."""
    p, m, q = ctx.p, ctx.m, ctx.q
    comps = _component_table(ctx, n)
    digits = np.concatenate(
        [np.stack([(comps[:, j] // p**k) % p for k in range(m)], axis=1) for j in range(n)],
        axis=1,
    )
    weights = np.array(
        [p**k * q ** (n - 1 - j) for j in range(n) for k in range(m)], dtype=np.int64
    )
    return digits.astype(np.int64), weights


def permutation_table(fn, ctx: FieldCtx, n: int) -> np.ndarray:
    """Index-coded value table of fn over all of F_q^n."""
    out = np.empty(ctx.q**n, dtype=np.int64)
    for i, xs in enumerate(all_states(ctx, n)):
        out[i] = state_index(ctx, fn(xs))
    return out


def _char_matrix(ctx: FieldCtx) -> np.ndarray:
    """q x q matrix chi(u * v) of the canonical additive character."""
    q, p = ctx.q, ctx.p
    chi_of_residue = np.exp(2j * np.pi * np.arange(p) / p)
    if ctx.m == 1:
        prod = np.outer(np.arange(q), np.arange(q)) % p
        return chi_of_residue[prod]
    elems = list(ctx.elements())
    trace = np.array([ctx.trace(e) for e in elems], dtype=np.int64)
    mul = np.empty((q, q), dtype=np.int64)
    for i, a in enumerate(elems):
        for j in range(i, q):
            k = ctx.index(a * elems[j])
            mul[i, j] = k
            mul[j, i] = k
    return chi_of_residue[trace[mul]]


def _coerce_mask(ctx: FieldCtx, n: int, v) -> tuple[FieldElement, ...]:
    if len(v) != n:
        raise ArityMismatch(f"expected {n} components, got {len(v)}")
    return tuple(ctx.element(x) for x in v)


def _fn_ctx_n(F, ctx, n):
    if isinstance(F, Gtds):
        return F.eval, F.ctx, F.n
    if ctx is None or n is None:
        raise ValueError("plain callables need explicit ctx and n")
    return F, ctx, n


# -- differential tables ------------------------------------------------------


def ddt_table(fn, ctx: FieldCtx, n: int, max_domain: int = FULL_SWEEP_CAP) -> np.ndarray:
    """Exact (N, N) table of counts #{x : f(x + dx) - f(x) = dy}."""
    N = ctx.q**n
    _check_domain(N, max_domain)
    perm = permutation_table(fn, ctx, n)
    digits, weights = _digit_table(ctx, n)
    out_digits = digits[perm]
    p = ctx.p
    table = np.empty((N, N), dtype=np.int64)
    for dx in range(N):
        shifted = ((digits + digits[dx]) % p) @ weights
        dy = ((out_digits[shifted] - out_digits) % p) @ weights
        table[dx] = np.bincount(dy, minlength=N)
    return table


@dataclass
class DdtReport:
    """Exhaustive differential table plus per-entry bounds and violations."""

    ctx: FieldCtx
    n: int
    table: np.ndarray
    delta_uniformity: int
    bound_table: np.ndarray | None = None
    simple_bound_degree: int | None = None  # d in the q^{n-wt} d^wt bound, if applicable
    violations: list = dc_field(default_factory=list)

    def count(self, dx, dy) -> int:
        i = state_index(self.ctx, _coerce_mask(self.ctx, self.n, dx))
        j = state_index(self.ctx, _coerce_mask(self.ctx, self.n, dy))
        return int(self.table[i, j])

    def summary(self) -> dict:
        return {
            "delta_uniformity": int(self.delta_uniformity),
            "violations": len(self.violations),
        }


def ddt(F, ctx: FieldCtx | None = None, n: int | None = None, max_domain: int = FULL_SWEEP_CAP) -> DdtReport:
    """Full differential distribution table of any map on F_q^n."""
    fn, ctx, n = _fn_ctx_n(F, ctx, n)
    table = ddt_table(fn, ctx, n, max_domain)
    delta = int(table[1:].max()) if len(table) > 1 else int(table.max())
    return DdtReport(ctx=ctx, n=n, table=table, delta_uniformity=delta)


@dataclass
class UniDeltaReport:
    """Differential uniformity of a univariate map, with the degree comparison."""

    delta: int
    degree: int
    lemma_applies: bool  # delta < q, the non-excluded case
    lemma_holds: bool | None  # delta < degree (None when delta = q)

    def __int__(self) -> int:
        return self.delta


def differential_uniformity_uni(f: UniPoly, max_domain: int = UNI_CAP) -> UniDeltaReport:
    ctx = f.ctx
    table = ddt_table(lambda xs: (f.eval(xs[0]),), ctx, 1, max_domain)
    delta = int(table[1:].max())
    deg = reduce_mod(f).degree()
    applies = delta < ctx.q
    return UniDeltaReport(
        delta=delta,
        degree=deg,
        lemma_applies=applies,
        lemma_holds=(delta < deg) if applies else None,
    )


@functools.lru_cache(maxsize=4096)
def _uni_delta(f: UniPoly) -> int:
    return differential_uniformity_uni(f).delta


# -- difference-polynomial criteria ---------------------------------------------


@dataclass(frozen=True)
class CriteriaResult:
    kind: str  # "criterion1" | "criterion2" | "inconclusive"
    k: int | None = None  # binomial witness for criterion 2


def difference_nonconstant_criteria(f: UniPoly) -> CriteriaResult:
    """Show f(x+a) - f(x) is non-constant for every a != 0, without a DDT.

    Over a prime field any degree > 1 works (criterion 1). Over a prime
    power, search for d' <= k <= d-1 with the binomial (d choose k) nonzero
    mod p (criterion 2); the search runs downward from d-1 so the witness
    matches the leading-term argument.
    """
    fr = reduce_mod(f)
    d = fr.degree()
    if d <= 1:
        raise DegreeTooLow(f"degree {d} <= 1")
    if f.ctx.m == 1:
        return CriteriaResult("criterion1")
    p = f.ctx.p
    rest = {e: c for e, c in fr.coeffs.items() if e != d}
    d_prime = max(max(rest, default=-1), 1)
    for k in range(d - 1, d_prime - 1, -1):
        if gcd(p, comb(d, k)) == 1:
            return CriteriaResult("criterion2", k=k)
    return CriteriaResult("inconclusive")


# -- GTDS differential bounds -----------------------------------------------------


@functools.lru_cache(maxsize=4096)
def _delta_below_q(f: UniPoly) -> bool:
    """Establish delta(f) < q for a reduced-degree >= 2 permutation polynomial."""
    try:
        crit = difference_nonconstant_criteria(f)
    except DegreeTooLow:
        return False
    if crit.kind != "inconclusive":
        return True
    if f.ctx.q > UNI_CAP:
        return False
    return _uni_delta(f) < f.ctx.q


def _verified_degree(F: Gtds, i: int) -> int:
    """Reduced degree of branch i's permutation polynomial, after checking
    the differential theorem's hypothesis (deg = 1, or deg >= 2 with
    delta < q)."""
    poly = F.branch_perm_polys[i]
    deg = reduce_mod(poly).degree()
    if deg == 1:
        return deg
    if deg >= 2 and _delta_below_q(poly):
        return deg
    raise HypothesisUnverified(i + 1, detail=f"cannot establish delta(p_{i + 1}) < q")


def _core_masks(F: Gtds, *vs):
    out = []
    for v in vs:
        v = _coerce_mask(F.ctx, F.n, v)
        out.append(tuple(reversed(v)) if F.flip else v)
    return out


def gtds_ddt_bound(F: Gtds, dx, dy) -> int:
    """Per-entry differential bound: the last-branch case factor times the
    product over the other branches of deg p_i (difference active,
    nonlinear) or q."""
    (cdx, cdy) = _core_masks(F, dx, dy)
    n, q = F.n, F.ctx.q
    if all(v.is_zero() for v in cdx):
        return q**n if all(v.is_zero() for v in cdy) else 0
    bound = 1
    for i in range(n - 1):
        deg = _verified_degree(F, i)
        bound *= deg if (not cdx[i].is_zero() and deg > 1) else q
    _verified_degree(F, n - 1)
    if not cdx[n - 1].is_zero():
        bound *= _uni_delta(F.branch_perm_polys[n - 1])
    elif cdy[n - 1].is_zero():
        bound *= q
    else:
        bound = 0
    return bound


@dataclass(frozen=True)
class SimpleBound:
    count_bound: int
    prob_bound: float
    d: int
    wt: int


def gtds_ddt_bound_simple(F: Gtds, dx) -> SimpleBound:
    """Uniform bound q^{n-wt} * d^wt and probability (d/q)^wt, valid when
    every branch polynomial has degree in (1, d] and delta < q."""
    degs = []
    for i in range(F.n):
        deg = _verified_degree(F, i)
        if deg <= 1:
            raise HypothesisUnverified(i + 1, detail="needs deg > 1 on every branch")
        degs.append(deg)
    d = max(degs)
    dx = _coerce_mask(F.ctx, F.n, dx)
    wt = sum(1 for v in dx if not v.is_zero())
    q = F.ctx.q
    return SimpleBound(
        count_bound=q ** (F.n - wt) * d**wt,
        prob_bound=(d / q) ** wt,
        d=d,
        wt=wt,
    )


def check_ddt_against_bounds(F: Gtds, max_domain: int = FULL_SWEEP_CAP) -> DdtReport:
    """Full DDT sweep compared entry-by-entry against both bounds."""
    ctx, n = F.ctx, F.n
    q = ctx.q
    N = q**n
    table = ddt_table(F.eval, ctx, n, max_domain)
    comps = _component_table(ctx, n)

    # theorem bound, rowwise: prefix product over branches 1..n-1, then the
    # last-branch factor which depends on dy only through its last component
    degs = [_verified_degree(F, i) for i in range(n)]
    delta_last = _uni_delta(F.branch_perm_polys[n - 1])
    last_pos = 0 if F.flip else n - 1  # user-order position of the core's last branch
    dy_last = comps[:, last_pos]
    bounds = np.empty((N, N), dtype=np.int64)
    bounds[0] = 0
    bounds[0, 0] = N
    for dx in range(1, N):
        cdx = comps[dx][::-1] if F.flip else comps[dx]
        prefix = 1
        for i in range(n - 1):
            prefix *= degs[i] if (cdx[i] != 0 and degs[i] > 1) else q
        if cdx[n - 1] != 0:
            bounds[dx] = prefix * delta_last
        else:
            bounds[dx] = np.where(dy_last == 0, prefix * q, 0)

    violations = []
    for dx, dy in np.argwhere(table > bounds):
        violations.append(
            {"dx": int(dx), "dy": int(dy), "count": int(table[dx, dy]),
             "bound": int(bounds[dx, dy]), "kind": "theorem"}
        )

    # uniform corollary bound, when its stronger hypotheses hold
    simple_d = None
    if all(d > 1 for d in degs):
        simple_d = max(degs)
        wts = np.count_nonzero(comps, axis=1)
        simple = q ** (n - wts) * np.int64(simple_d) ** wts
        for dx in range(1, N):
            for dy in np.nonzero(table[dx] > simple[dx])[0]:
                violations.append(
                    {"dx": int(dx), "dy": int(dy), "count": int(table[dx, dy]),
                     "bound": int(simple[dx]), "kind": "simple"}
                )

    return DdtReport(
        ctx=ctx,
        n=n,
        table=table,
        delta_uniformity=int(table[1:].max()) if N > 1 else int(table.max()),
        bound_table=bounds,
        simple_bound_degree=simple_d,
        violations=violations,
    )


# -- correlation ------------------------------------------------------------------


def correlation(F, a, b, ctx: FieldCtx | None = None, n: int | None = None,
                max_domain: int = PAIR_CAP) -> complex:
    """corr(a, b) = (1/q^n) sum_x chi(<a, F(x)> + <b, x>)."""
    fn, ctx, n = _fn_ctx_n(F, ctx, n)
    N = ctx.q**n
    _check_domain(N, max_domain)
    a = _coerce_mask(ctx, n, a)
    b = _coerce_mask(ctx, n, b)
    chi = {i: cmath.exp(2j * cmath.pi * ctx.trace(ctx.from_index(i)) / ctx.p) for i in range(ctx.q)}
    zero = ctx.zero
    total = 0j
    for xs in all_states(ctx, n):
        acc = zero
        for ai, yi in zip(a, fn(xs)):
            acc = acc + ai * yi
        for bi, xi in zip(b, xs):
            acc = acc + bi * xi
        total += chi[ctx.index(acc)]
    return total / N


def correlation_table(fn, ctx: FieldCtx, n: int, max_domain: int = FULL_SWEEP_CAP) -> np.ndarray:
    """All correlations at once: (1/N) W[:, perm] @ W with W the n-fold
    Kronecker power of the base character matrix."""
    N = ctx.q**n
    _check_domain(N, max_domain)
    perm = permutation_table(fn, ctx, n)
    W = base = _char_matrix(ctx)
    for _ in range(n - 1):
        W = np.kron(W, base)
    return (W[:, perm] @ W) / N


def gtds_correlation_bound(F: Gtds, a, b) -> float:
    """Case bound on |corr|, keyed on the first active output-mask branch j:
    zero unless b_j is active there, then 1 for a linear p_j or
    (min(deg p_j, deg p_j^-1) - 1)/sqrt(q) past degree one."""
    (ca, cb) = _core_masks(F, a, b)
    q = F.ctx.q
    polys = F.branch_perm_polys
    for i, poly in enumerate(polys):
        cert = perm_poly_certificate(poly)
        if gcd(cert.deg_f, q) != 1 or gcd(cert.deg_finv, q) != 1:
            raise HypothesisUnverified(i + 1, detail="degree shares a factor with q")
    if all(v.is_zero() for v in ca):
        return 1.0 if all(v.is_zero() for v in cb) else 0.0
    if all(v.is_zero() for v in cb):
        return 0.0
    j = next(i for i, v in enumerate(ca) if not v.is_zero())
    if cb[j].is_zero():
        return 0.0
    cert = perm_poly_certificate(polys[j])
    if cert.deg_f == 1:
        return 1.0
    return (min(cert.deg_f, cert.deg_finv) - 1) / sqrt(q)


@dataclass
class CorrReport:
    """Exhaustive correlation/LP tables with the case bound per entry.

    `bound` bounds |corr|; violations compare LP against bound^2 + slack.
    """

    ctx: FieldCtx
    n: int
    corr: np.ndarray
    lp: np.ndarray
    bound: np.ndarray
    violations: list = dc_field(default_factory=list)

    def corr_at(self, a, b) -> complex:
        i = state_index(self.ctx, _coerce_mask(self.ctx, self.n, a))
        j = state_index(self.ctx, _coerce_mask(self.ctx, self.n, b))
        return complex(self.corr[i, j])

    def max_lp(self) -> float:
        """Largest LP outside the trivial (0, 0) entry."""
        masked = self.lp.copy()
        masked[0, 0] = 0.0
        return float(masked.max())

    def summary(self) -> dict:
        return {"max_lp": self.max_lp(), "violations": len(self.violations)}


def check_correlation_against_bounds(
    F: Gtds, max_domain: int = FULL_SWEEP_CAP, slack: float = BOUND_SLACK
) -> CorrReport:
    """Full (a, b) sweep of the correlation against the case bound."""
    ctx, n = F.ctx, F.n
    q = ctx.q
    N = q**n
    corr = correlation_table(F.eval, ctx, n, max_domain)
    lp = np.abs(corr) ** 2
    comps = _component_table(ctx, n)

    polys = F.branch_perm_polys
    certs = [perm_poly_certificate(p) for p in polys]
    for i, cert in enumerate(certs):
        if gcd(cert.deg_f, q) != 1 or gcd(cert.deg_finv, q) != 1:
            raise HypothesisUnverified(i + 1, detail="degree shares a factor with q")
    case45 = [
        1.0 if c.deg_f == 1 else (min(c.deg_f, c.deg_finv) - 1) / sqrt(q) for c in certs
    ]

    bound = np.zeros((N, N), dtype=np.float64)
    bound[0, 0] = 1.0
    for a_idx in range(1, N):
        ca = comps[a_idx][::-1] if F.flip else comps[a_idx]
        j = next(i for i in range(n) if ca[i] != 0)
        user_pos = n - 1 - j if F.flip else j
        bj = comps[:, user_pos]
        bound[a_idx] = np.where(bj == 0, 0.0, case45[j])

    violations = []
    for a_idx, b_idx in np.argwhere(lp > bound**2 + slack):
        violations.append(
            {"a": int(a_idx), "b": int(b_idx), "lp": float(lp[a_idx, b_idx]),
             "bound": float(bound[a_idx, b_idx] ** 2)}
        )
    return CorrReport(ctx=ctx, n=n, corr=corr, lp=lp, bound=bound, violations=violations)


# -- Weil sum check -------------------------------------------------------------


@dataclass(frozen=True)
class WeilCheck:
    lhs: float
    bound: float
    ok: bool


def weil_sum_check(f: UniPoly, a, b, slack: float = BOUND_SLACK) -> WeilCheck:
    """|sum_x chi(a f(x) + b x)| against (min(deg f, deg f^-1) - 1) sqrt(q)."""
    ctx = f.ctx
    a = ctx.element(a)
    b = ctx.element(b)
    if a.is_zero() or b.is_zero():
        raise HypothesisUnverified(detail="a and b must be nonzero")
    if not is_permutation_polynomial(f):
        raise HypothesisUnverified(detail="f is not a permutation polynomial")
    cert = perm_poly_certificate(f)
    if gcd(cert.deg_f, ctx.q) != 1 or gcd(cert.deg_finv, ctx.q) != 1:
        raise HypothesisUnverified(detail="degree shares a factor with q")
    if min(cert.deg_f, cert.deg_finv) < 2:
        raise HypothesisUnverified(detail="linear maps are out of scope here")
    total = 0j
    for x in ctx.elements():
        total += ctx.additive_character(a * f.eval(x) + b * x)
    bound = (min(cert.deg_f, cert.deg_finv) - 1) * sqrt(ctx.q)
    lhs = abs(total)
    return WeilCheck(lhs=lhs, bound=bound, ok=lhs <= bound + slack)


# -- linear trails ----------------------------------------------------------------


@dataclass
class LinearTrail:
    """Masks omega_0..omega_r; (omega_{i-1}, omega_i) approximates round i."""

    masks: tuple

    def __len__(self) -> int:
        return len(self.masks)


def trail_lp(
    cipher: CipherSpec,
    keys: RoundKeys,
    trail: LinearTrail,
    max_domain: int = PAIR_CAP,
) -> float:
    """Product of per-round LPs (rounds treated as independent).

    Round-key addition only rotates the correlation by a unit phase, so
    each factor is computed on the full keyed round map. Correlations below
    the zero threshold are exact zeros up to roundoff and zero the product.
    """
    masks = [
        _coerce_mask(cipher.ctx, cipher.n, m)
        for m in (trail.masks if isinstance(trail, LinearTrail) else trail)
    ]
    if len(masks) != cipher.r + 1:
        raise ArityMismatch(f"trail needs {cipher.r + 1} masks, got {len(masks)}")
    cipher._check_keys(keys)
    total = 1.0
    for i, rnd in enumerate(cipher.rounds):
        c = correlation(
            lambda x: rnd.apply(keys[i + 1], x),
            masks[i + 1],
            masks[i],
            ctx=cipher.ctx,
            n=cipher.n,
            max_domain=max_domain,
        )
        if abs(c) < ZERO_TOL:
            return 0.0
        total *= abs(c) ** 2
    return total


def affine_mask_transport(L: AffineLayer, a, b) -> tuple:
    """LP_{L o F}(a, b) = LP_F(A^T a, b): push the output mask through the mix."""
    return L.transpose_mul(a), _coerce_mask(L.ctx, L.n, b)
