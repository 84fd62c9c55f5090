"""Shared builders for the test suite: small fields, zero-free quadratics,
and one round per design family at a given geometry."""

from math import gcd

import gtdslib as g


def small_perm_exponent(q: int, minimum: int = 2) -> int:
    """Smallest exponent >= minimum that is coprime to q - 1."""
    d = minimum
    while gcd(d, q - 1) != 1:
        d += 1
    return d


def inverse_pair_exponent(q: int) -> tuple[int, int]:
    """(d2, e) with e * d2 = 1 mod (q - 1) and e > 1."""
    d2 = 3
    while True:
        if gcd(d2, q - 1) == 1:
            e = pow(d2, -1, q - 1)
            if e > 1:
                return d2, e
        d2 += 1


def no_zero_quadratic_const(ctx) -> int:
    """c such that x^2 + c has no roots in the (odd prime) field."""
    for c in range(1, ctx.p):
        if not ctx.is_quadratic_residue(ctx.element(-c)):
            return c
    raise AssertionError(f"no zero-free quadratic x^2 + c over F_{ctx.p}")


def unit_upper_mix(ctx, n: int) -> g.AffineLayer:
    """Invertible mixing layer: ones on the diagonal and superdiagonal."""
    rows = [[1 if j == i or j == i + 1 else 0 for j in range(n)] for i in range(n)]
    return g.AffineLayer(ctx, rows)


def quad_in_var(ctx, n: int, var: int, c: int) -> g.MultiPoly:
    return g.MultiPoly(ctx, n, {tuple(2 if j == var else 0 for j in range(n)): 1,
                                (0,) * n: c})


def horst_instance(ctx, n: int = 3) -> g.Gtds:
    c = no_zero_quadratic_const(ctx)
    g_list = [quad_in_var(ctx, n, i + 1, c) for i in range(n - 1)]
    h_list = [
        g.MultiPoly(ctx, n, {tuple(3 if j == i + 1 else 0 for j in range(n)): 1})
        for i in range(n - 1)
    ]
    return g.make_horst(g_list, h_list)


def bricks_instance(ctx) -> g.Gtds:
    d = small_perm_exponent(ctx.q)
    for beta in range(1, ctx.p):
        if not ctx.is_quadratic_residue(ctx.element(-4 * beta)):
            return g.make_bricks(ctx, d, [0, 0], [beta, beta])
    raise AssertionError("no usable beta")


def arion_instance(ctx, n: int) -> g.ArionGtds:
    d1 = small_perm_exponent(ctx.q)
    d2, _ = inverse_pair_exponent(ctx.q)
    c = no_zero_quadratic_const(ctx)
    params = g.ArionParams(
        d1=d1,
        d2=d2,
        g_list=[g.UniPoly(ctx, {2: 1, 0: c}) for _ in range(n - 1)],
        h_list=[g.UniPoly(ctx, {2: 1, 1: 1, 0: 3}) for _ in range(n - 1)],
    )
    return g.make_arion_gtds(params, n)


def glm_classic(ctx) -> g.GeneralizedLaiMassey:
    params = g.LaiMasseyParams(
        omega=[1, ctx.p - 1],
        p_list=[g.UniPoly.x(ctx), g.UniPoly.x(ctx)],
        g=g.UniPoly.monomial(ctx, 2),
    )
    return g.make_generalized_lai_massey(params)


def family_rounds(ctx, n: int) -> dict[str, g.RoundSpec]:
    """One representative round per family that fits the geometry (q, n)."""
    d = small_perm_exponent(ctx.q)
    S = g.UniPoly.monomial(ctx, d)
    mix = unit_upper_mix(ctx, n)
    out = {
        "feistel": g.make_feistel_unbalanced(g.UniPoly.monomial(ctx, 2), n),
        "spn": g.make_spn(S, n, mix),
        "pspn": g.make_partial_spn(S, n, {1}, mix),
    }
    if n == 2:
        out["laimassey"] = g.make_lai_massey_2(g.UniPoly.monomial(ctx, 2))
        out["glm"] = glm_classic(ctx).pipeline
        out["arion"] = g.gtds_round(arion_instance(ctx, n))
    if n >= 2 and ctx.p != 2:
        out["horst"] = g.gtds_round(horst_instance(ctx, n))
    if n == 3 and ctx.p != 2:
        out["bricks"] = g.gtds_round(bricks_instance(ctx))
        out["arion"] = g.gtds_round(arion_instance(ctx, n))
    return out


def round_as_map(rnd: g.RoundSpec):
    """Keyless view of a round: core pipeline plus mixing layer."""
    zeros = (0,) * rnd.n

    def fn(x):
        return rnd.apply(zeros, x)

    return fn
