"""Factory constructors for the classic design families.

Every factory returns either a plain triangular system, a round
specification (core pipeline plus mixing layer), or -- for the generalized
Lai-Massey -- an object exposing both the direct map and its five-stage
decomposition into triangular systems and affine permutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .cipher import STAGE_DECODERS, AffineLayer, RoundSpec
from .errors import (
    BadExponent,
    BadM,
    DiscriminantResidue,
    DomainTooLarge,
    GiHasZero,
    NotAPermutation,
    ParseError,
    WeightSumNonzero,
)
from .field import FieldCtx, FieldElement
from .gtds import Branch, Gtds, State, all_states
from .polynomial import (
    MultiPoly,
    UniPoly,
    has_no_zeros,
    is_permutation_polynomial,
    poly_from_json,
    poly_to_json,
)

EQUIV_CHECK_CAP = 1 << 16


def _const_one(ctx: FieldCtx, n: int) -> MultiPoly:
    return MultiPoly.constant(ctx, n, 1)


def _const_zero(ctx: FieldCtx, n: int) -> MultiPoly:
    return MultiPoly(ctx, n, {})


def _identity_poly(ctx: FieldCtx) -> UniPoly:
    return UniPoly.x(ctx)


def gtds_round(F: Gtds, mix: AffineLayer | None = None) -> RoundSpec:
    """Wrap a single system into a round (identity mix unless given)."""
    return RoundSpec([F], mix or AffineLayer.identity(F.ctx, F.n))


# -- Feistel ---------------------------------------------------------------


def make_feistel_unbalanced(f: UniPoly, n: int) -> RoundSpec:
    """Unbalanced Feistel with expanding round function.

    Branches add f(x_n) to x_1..x_{n-1}; the mixing layer is the rotation
    (x_1, ..., x_n) -> (x_n, x_1, ..., x_{n-1}). For n = 2 this is the
    classical swap-and-add Feistel round.
    """
    if n < 2:
        raise ValueError("Feistel needs n > 1")
    ctx = f.ctx
    h = MultiPoly.from_uni(f, n - 1, n)
    branches = [Branch(_identity_poly(ctx), _const_one(ctx, n), h) for _ in range(n - 1)]
    core = Gtds(ctx, branches, _identity_poly(ctx))
    shift = AffineLayer.permutation(ctx, [n - 1] + list(range(n - 1)))
    return RoundSpec([core], shift)


# -- SPN -------------------------------------------------------------------


def make_spn(S: UniPoly, n: int, mix: AffineLayer) -> RoundSpec:
    """Parallel S-box application followed by an affine mixing layer."""
    return make_partial_spn(S, n, range(1, n + 1), mix)


def make_partial_spn(S: UniPoly, n: int, active, mix: AffineLayer) -> RoundSpec:
    """S-box on the branches listed in `active` (1-based), identity elsewhere."""
    ctx = S.ctx
    if not is_permutation_polynomial(S):
        raise NotAPermutation(detail="S-box is not a permutation")
    if mix.n != n or mix.ctx != ctx:
        raise ValueError("mixing layer has the wrong geometry")
    active = set(active)
    one = _const_one(ctx, n)
    zero = _const_zero(ctx, n)
    ident = _identity_poly(ctx)
    branches = [Branch(S if i in active else ident, one, zero) for i in range(1, n)]
    p_last = S if n in active else ident
    return RoundSpec([Gtds(ctx, branches, p_last)], mix)


# -- Lai-Massey --------------------------------------------------------------


def make_lai_massey_2(g: UniPoly) -> RoundSpec:
    """Two-branch Lai-Massey round as a pipeline of three triangular systems.

    (x, y) -> (x - y, y) -> (x, y + g(x)) -> (x + y, y); the middle system
    runs against the variable order, hence its `flip`.
    """
    ctx = g.ctx
    n = 2
    ident = _identity_poly(ctx)
    one = _const_one(ctx, n)
    x2 = MultiPoly.variable(ctx, n, 1)
    f1 = Gtds(ctx, [Branch(ident, one, x2.scale(-1))], ident)
    f2 = Gtds(ctx, [Branch(ident, one, MultiPoly.from_uni(g, 1, n))], ident, flip=True)
    f3 = Gtds(ctx, [Branch(ident, one, x2)], ident)
    return RoundSpec([f1, f2, f3], AffineLayer.identity(ctx, n))


def lai_massey_2_direct(g: UniPoly):
    """Reference evaluator (x, y) -> (x + g(x-y), y + g(x-y))."""

    def direct(xs) -> State:
        x, y = (g.ctx.element(v) for v in xs)
        d = g.eval(x - y)
        return (x + d, y + d)

    return direct


@dataclass
class LaiMasseyParams:
    """Weights, per-branch permutation polynomials, and the shared polynomial g.

    g takes the weighted sum as its first slot followed by the untouched
    variables x_{m+1..n}; a univariate g is accepted when m = n (no spare
    variables to depend on).
    """

    omega: Sequence
    p_list: Sequence[UniPoly]
    g: UniPoly | MultiPoly


class GeneralizedLaiMassey:
    """Generalized Lai-Massey: direct map plus its five-stage decomposition.

    Direct form: y_i = p_i(x_i) + g(sum_j w_j p_j(x_j), x_{m+1..n}) for
    i <= m, and y_i = p_i(x_i) above m. The `pipeline` attribute holds the
    equivalent composition [system, affine, system, affine, system].
    """

    def __init__(self, params: LaiMasseyParams):
        p_list = list(params.p_list)
        ctx = p_list[0].ctx
        n = len(p_list)
        if len(params.omega) != n:
            raise BadM("omega and p_list lengths differ")
        omega = [ctx.element(w) for w in params.omega]
        total = ctx.zero
        for w in omega:
            total = total + w
        if not total.is_zero():
            raise WeightSumNonzero("weights must sum to zero")
        nz = [i for i, w in enumerate(omega) if not w.is_zero()]
        if not nz or nz[-1] + 1 < 2:
            raise BadM("need a nonzero weight at index >= 2")
        m = nz[-1] + 1  # 1-based pivot
        for i, p in enumerate(p_list):
            if not is_permutation_polynomial(p):
                raise NotAPermutation(i + 1)
        g = params.g
        slots = 1 + (n - m)
        if isinstance(g, UniPoly):
            g = MultiPoly.from_uni(g, 0, slots)
        if g.nvars != slots:
            raise BadM(f"g must take {slots} slots (weighted sum + x_{{m+1..n}})")
        self.params = params
        self.ctx = ctx
        self.n = n
        self.m = m
        self.omega = omega
        self.p_list = p_list
        self.g = g
        self.pipeline = self._build_pipeline()

    def eval(self, xs) -> State:
        xs = [self.ctx.element(x) for x in xs]
        m = self.m
        pv = [p.eval(x) for p, x in zip(self.p_list, xs)]
        s = self.ctx.zero
        for w, v in zip(self.omega[:m], pv[:m]):
            s = s + w * v
        gv = self.g.eval([s] + xs[m:])
        return tuple(v + gv if i < m else v for i, v in enumerate(pv))

    def _build_pipeline(self) -> RoundSpec:
        ctx, n, m = self.ctx, self.n, self.m
        ident = _identity_poly(ctx)
        one = _const_one(ctx, n)
        zero = _const_zero(ctx, n)

        def spn_like(polys: list[UniPoly]) -> Gtds:
            return Gtds(ctx, [Branch(p, one, zero) for p in polys[:-1]], polys[-1])

        # stage 1: p_i on the first m branches
        stage1 = spn_like([self.p_list[i] if i < m else ident for i in range(n)])
        # stage 2: scale the weighted branches, accumulate the sum in branch m
        rows = []
        for i in range(n):
            row = [ctx.zero] * n
            if i < m - 1:
                row[i] = self.omega[i] if not self.omega[i].is_zero() else ctx.one
            elif i == m - 1:
                for j in range(m):
                    row[j] = self.omega[j]
            else:
                row[i] = ctx.one
            rows.append(row)
        stage2 = AffineLayer(ctx, rows)
        # stage 3: add (scaled) g of the sum slot to the first m - 1 branches
        g_wide = self.g.remap_vars({j: m - 1 + j for j in range(self.g.nvars)}, n)
        branches = []
        for i in range(n - 1):
            if i < m - 1:
                w = self.omega[i]
                h = g_wide if w.is_zero() else g_wide.scale(w)
                branches.append(Branch(ident, one, h))
            else:
                branches.append(Branch(ident, one, zero))
        stage3 = Gtds(ctx, branches, ident)
        # stage 4: undo the scaling and recover branch m from the sum
        rows = []
        for i in range(n):
            row = [ctx.zero] * n
            if i < m - 1:
                row[i] = self.omega[i].inverse() if not self.omega[i].is_zero() else ctx.one
            elif i == m - 1:
                wm_inv = self.omega[m - 1].inverse()
                row[m - 1] = wm_inv
                for j in range(m - 1):
                    if not self.omega[j].is_zero():
                        row[j] = -wm_inv
            else:
                row[i] = ctx.one
            rows.append(row)
        stage4 = AffineLayer(ctx, rows)
        # stage 5: p_i on the remaining branches
        stage5 = spn_like([ident if i < m else self.p_list[i] for i in range(n)])
        return RoundSpec([stage1, stage2, stage3, stage4, stage5], AffineLayer.identity(ctx, n))


def make_generalized_lai_massey(params: LaiMasseyParams) -> GeneralizedLaiMassey:
    return GeneralizedLaiMassey(params)


def lai_massey_equivalence_check(
    params: LaiMasseyParams | GeneralizedLaiMassey, max_domain: int = EQUIV_CHECK_CAP
) -> bool:
    """Exhaustively compare the direct map with its stage decomposition."""
    glm = params if isinstance(params, GeneralizedLaiMassey) else GeneralizedLaiMassey(params)
    size = glm.ctx.q**glm.n
    if size > max_domain:
        raise DomainTooLarge(f"domain {size} exceeds cap {max_domain}")
    for xs in all_states(glm.ctx, glm.n):
        if glm.eval(xs) != glm.pipeline.core_apply(xs):
            return False
    return True


# -- Horst -------------------------------------------------------------------


def make_horst(g_list: Sequence[MultiPoly], h_list: Sequence[MultiPoly] | None = None) -> Gtds:
    """Feistel generalization x_i -> x_i * g_i + h_i with zero-free g_i."""
    n = len(g_list) + 1
    ctx = g_list[0].ctx
    if h_list is None:
        h_list = [_const_zero(ctx, n)] * (n - 1)
    ident = _identity_poly(ctx)
    branches = [Branch(ident, g, h) for g, h in zip(g_list, h_list)]
    return Gtds(ctx, branches, ident)


# -- Bricks --------------------------------------------------------------------


def make_bricks(ctx: FieldCtx, d: int, alphas: Sequence, betas: Sequence) -> Gtds:
    """Three-branch map (x1^d, x2*(x1^2 + a1 x1 + b1), x3*(x2^2 + a2 x2 + b2)).

    The multipliers read *earlier* branches, so the system is stored in
    reversed variable order (`flip`); callers still see the layout above.
    """
    if len(alphas) != 2 or len(betas) != 2:
        raise ValueError("Bricks takes two (alpha, beta) pairs")
    if d < 1 or gcd(d, ctx.q - 1) != 1:
        raise BadExponent(f"gcd(d={d}, q-1) must be 1")
    alphas = [ctx.element(a) for a in alphas]
    betas = [ctx.element(b) for b in betas]
    for i, (a, b) in enumerate(zip(alphas, betas), start=1):
        disc = a * a - b * 4
        if ctx.is_quadratic_residue(disc):
            raise DiscriminantResidue(f"alpha_{i}^2 - 4*beta_{i} is a square")
    n = 3

    def quad(a: FieldElement, b: FieldElement, var: int) -> MultiPoly:
        return MultiPoly.from_uni(UniPoly(ctx, {2: 1, 1: a, 0: b}), var, n)

    ident = _identity_poly(ctx)
    zero = _const_zero(ctx, n)
    # reversed order: u = (x3, x2, x1)
    branches = [
        Branch(ident, quad(alphas[1], betas[1], 1), zero),
        Branch(ident, quad(alphas[0], betas[0], 2), zero),
    ]
    return Gtds(ctx, branches, UniPoly.monomial(ctx, d), flip=True)


# -- Arion ----------------------------------------------------------------------


@dataclass
class ArionParams:
    """Exponents and per-branch quadratics for the feed-forward system.

    d1 is the forward power (coprime to q - 1); e inverts the chosen d2,
    i.e. e * d2 = 1 mod (q - 1); e may be omitted and derived from d2.
    """

    d1: int
    d2: int
    g_list: Sequence[UniPoly]
    h_list: Sequence[UniPoly]
    e: int | None = None


class ArionGtds(Gtds):
    """Triangular system with running-sum feed-forward.

    Branch i multiplies x_i^d1 by g_i(sigma) and adds h_i(sigma), where
    sigma accumulates x_j + y_j over the branches below; the last branch is
    x_n^e. Since every y_j below branch i depends only on x_{i+1..n},
    triangularity is preserved; evaluation runs bottom-up and caches the
    outputs instead of composing polynomials symbolically.
    """

    def __init__(self, ctx: FieldCtx, n: int, params: ArionParams):
        q = ctx.q
        if params.d1 <= 1 or gcd(params.d1, q - 1) != 1:
            raise BadExponent(f"gcd(d1={params.d1}, q-1) must be 1 and d1 > 1")
        if gcd(params.d2, q - 1) != 1:
            raise BadExponent(f"gcd(d2={params.d2}, q-1) must be 1")
        e = params.e
        derived = pow(params.d2 % (q - 1), -1, q - 1) if q > 2 else 1
        if derived == 0:
            derived = 1
        if e is None:
            e = derived
        elif (e * params.d2) % (q - 1) != 1 % (q - 1):
            raise BadExponent(f"e*d2 = {e * params.d2} is not 1 mod q-1")
        if e <= 1:
            raise BadExponent("e must exceed 1; pick a different d2")
        g_list = list(params.g_list)
        h_list = list(params.h_list)
        if len(g_list) != n - 1 or len(h_list) != n - 1:
            raise ValueError(f"need {n - 1} g and h polynomials")
        for i, g in enumerate(g_list, start=1):
            if g.degree() != 2:
                raise ValueError(f"g_{i} must be quadratic")
            if not has_no_zeros(g, ctx):
                raise GiHasZero(i)
        for i, h in enumerate(h_list, start=1):
            if h.degree() > 2:
                raise ValueError(f"h_{i} must have degree <= 2")
        self.d1 = params.d1
        self.d2 = params.d2
        self.e = e
        self.g_list = tuple(g_list)
        self.h_list = tuple(h_list)
        pd1 = UniPoly.monomial(ctx, params.d1)
        one = _const_one(ctx, n)
        zero = _const_zero(ctx, n)
        # placeholder branch polynomials: _brackets supplies the real g/h values
        branches = [Branch(pd1, one, zero) for _ in range(n - 1)]
        super().__init__(ctx, branches, UniPoly.monomial(ctx, e), _validate=False)
        self.validated = True

    def _brackets(self, i: int, xs: list, ys: list):
        sigma = self.ctx.zero
        for j in range(i + 1, self.n):
            sigma = sigma + xs[j] + ys[j]
        return self.g_list[i].eval(sigma), self.h_list[i].eval(sigma)

    def stage_json(self) -> dict:
        return {
            "arion": {
                "n": self.n,
                "d1": self.d1,
                "d2": self.d2,
                "e": self.e,
                "g_list": [poly_to_json(g) for g in self.g_list],
                "h_list": [poly_to_json(h) for h in self.h_list],
            }
        }


def make_arion_gtds(params: ArionParams, n: int) -> ArionGtds:
    ctx = params.g_list[0].ctx
    return ArionGtds(ctx, n, params)


def _arion_from_json(doc, ctx: FieldCtx, n: int) -> ArionGtds:
    try:
        params = ArionParams(
            d1=int(doc["d1"]),
            d2=int(doc["d2"]),
            e=int(doc["e"]) if "e" in doc else None,
            g_list=[poly_from_json(g, ctx) for g in doc["g_list"]],
            h_list=[poly_from_json(h, ctx) for h in doc["h_list"]],
        )
        return ArionGtds(ctx, int(doc.get("n", n)), params)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad arion stage: {exc}") from exc


STAGE_DECODERS["arion"] = _arion_from_json
