import itertools
import random
from math import gcd

import pytest

import gtdslib as g
from gtdslib.errors import (
    ArityMismatch,
    DomainTooLarge,
    DuplicateAbscissa,
    NotAPermutation,
)


def test_eval_uni(F5):
    f = g.UniPoly(F5, {2: 1, 0: 1})  # x^2 + 1
    assert f.eval(F5.element(3)) == 0  # 9 + 1 = 10
    assert g.UniPoly(F5, {}).eval(F5.element(2)) == 0
    for c in F5.elements():
        assert g.UniPoly.x(F5).eval(c) == c


def test_eval_multi(F5):
    f = g.MultiPoly(F5, 2, {(1, 1): 1})  # x1*x2
    assert f.eval((F5.element(2), F5.element(3))) == 1
    f = g.MultiPoly(F5, 2, {(0, 2): 1, (0, 0): 3})  # x2^2 + 3
    for a in F5.elements():
        assert f.eval((a, F5.element(1))) == 4
    const = g.MultiPoly.constant(F5, 3, 2)
    assert const.eval((F5.zero,) * 3) == 2
    with pytest.raises(ArityMismatch):
        f.eval((F5.zero,))


def test_reduce_mod_examples(F5):
    assert g.reduce_mod(g.UniPoly.monomial(F5, 5)) == g.UniPoly.x(F5)
    assert g.reduce_mod(g.UniPoly.monomial(F5, 8)) == g.UniPoly.monomial(F5, 4)
    c = g.UniPoly.constant(F5, 3)
    assert g.reduce_mod(c) == c


@pytest.mark.parametrize("q_ctx", ["F5", "F7", "F9"])
def test_reduce_mod_pointwise(q_ctx, request):
    ctx = request.getfixturevalue(q_ctx)
    rng = random.Random(0)
    for _ in range(20):
        f = g.UniPoly(ctx, {rng.randrange(3 * ctx.q): rng.randrange(1, ctx.q) for _ in range(4)})
        fr = g.reduce_mod(f)
        assert fr.degree() < ctx.q
        for x in ctx.elements():
            assert f.eval(x) == fr.eval(x)
        m = g.MultiPoly(
            ctx, 2,
            {(rng.randrange(3 * ctx.q), rng.randrange(3 * ctx.q)): rng.randrange(1, ctx.q)
             for _ in range(3)},
        )
        mr = g.reduce_mod(m)
        for xs in itertools.product(ctx.elements(), repeat=2):
            assert m.eval(xs) == mr.eval(xs)


def test_is_permutation_examples(F5, F7):
    assert g.is_permutation_polynomial(g.UniPoly.monomial(F5, 3))  # gcd(3,4)=1
    assert not g.is_permutation_polynomial(g.UniPoly.monomial(F7, 3))  # gcd(3,6)=3
    for c in range(5):
        assert g.is_permutation_polynomial(g.UniPoly(F5, {1: 1, 0: c}))
    assert not g.is_permutation_polynomial(g.UniPoly(F5, {}))
    assert not g.is_permutation_polynomial(g.UniPoly.constant(F5, 2))


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_monomial_criterion_vs_exhaustive(q):
    ctx = g.FieldCtx(q)
    for d in range(1, q - 1):
        claimed = g.is_permutation_polynomial(g.UniPoly.monomial(ctx, d))
        image = {ctx.index(ctx.pow(x, d)) for x in ctx.elements()}
        assert claimed == (len(image) == q), (q, d)


def test_invert_examples(F5, F7):
    assert g.invert_permutation_polynomial(g.UniPoly.monomial(F5, 3)) == g.UniPoly.monomial(F5, 3)
    assert g.invert_permutation_polynomial(g.UniPoly.monomial(F7, 5)) == g.UniPoly.monomial(F7, 5)
    inv = g.invert_permutation_polynomial(g.UniPoly(F5, {1: 1, 0: 2}))
    assert inv == g.UniPoly(F5, {1: 1, 0: 3})
    with pytest.raises(NotAPermutation):
        g.invert_permutation_polynomial(g.UniPoly.monomial(F5, 2))


@pytest.mark.parametrize("q_ctx", ["F5", "F7", "F13", "F8", "F9"])
def test_invert_roundtrip(q_ctx, request):
    ctx = request.getfixturevalue(q_ctx)
    rng = random.Random(1)
    polys = [g.UniPoly.x(ctx)]
    # a guaranteed non-monomial permutation: interpolate a random shuffle
    elems = list(ctx.elements())
    shuffled = elems[:]
    rng.shuffle(shuffled)
    polys.append(g.interpolate(ctx, list(zip(elems, shuffled))))
    d = next(d for d in range(2, ctx.q) if gcd(d, ctx.q - 1) == 1)
    polys.append(g.UniPoly.monomial(ctx, d, ctx.q - 1))
    for f in polys:
        finv = g.invert_permutation_polynomial(f)
        for x in elems:
            assert finv.eval(f.eval(x)) == x
            assert f.eval(finv.eval(x)) == x


def test_interpolate(F5):
    pts = [(x, x) for x in F5.elements()]
    assert g.interpolate(F5, pts) == g.UniPoly.x(F5)
    sq = g.UniPoly.monomial(F5, 2)
    pts = [(x, sq.eval(x)) for x in F5.elements()]
    assert g.interpolate(F5, pts) == sq
    assert g.interpolate(F5, [(F5.element(2), F5.element(4))]) == g.UniPoly.constant(F5, 4)
    with pytest.raises(DuplicateAbscissa):
        g.interpolate(F5, [(F5.one, F5.one), (F5.one, F5.zero)])


def test_perm_poly_certificate(F5, F11):
    cert = g.perm_poly_certificate(g.UniPoly.monomial(F11, 3))
    assert cert.kind == "monomial_gcd"
    assert (cert.deg_f, cert.deg_finv) == (3, 7)  # 3 * 7 = 21 = 1 mod 10
    # non-monomial goes through interpolation; f(f^-1) must be the identity
    f = g.UniPoly(F5, {3: 2, 1: 1})
    if g.is_permutation_polynomial(f):
        cert = g.perm_poly_certificate(f)
        assert cert.kind == "exhaustive"
        for x in F5.elements():
            assert f.eval(cert.inverse.eval(x)) == x


def test_has_no_zeros_examples(F5):
    assert g.has_no_zeros(g.UniPoly(F5, {2: 1, 0: 3}))  # disc -12 = 3, non-residue
    assert g.has_no_zeros(g.UniPoly(F5, {2: 1, 0: 3})).method == "certificate"
    assert g.has_no_zeros(g.MultiPoly.constant(F5, 2, 1))
    assert not g.has_no_zeros(g.MultiPoly.variable(F5, 2, 1))  # zero at x2 = 0
    assert not g.has_no_zeros(g.MultiPoly(F5, 2, {}))  # the zero polynomial
    assert not g.has_no_zeros(g.UniPoly(F5, {1: 2, 0: 1}))  # linears always vanish


@pytest.mark.parametrize("p", [5, 7, 11])
def test_quadratic_certificate_vs_scan(p):
    ctx = g.FieldCtx(p)
    for alpha in range(p):
        for beta in range(p):
            f = g.UniPoly(ctx, {2: 1, 1: alpha, 0: beta})
            claimed = bool(g.has_no_zeros(f))
            scanned = all(not f.eval(x).is_zero() for x in ctx.elements())
            assert claimed == scanned, (p, alpha, beta)


def test_has_no_zeros_multivariate_scan(F5):
    # x1^2 + x2^2 + 1 over F_5: 2^2 + 0 + 1 = 5 = 0, so it has a zero
    f = g.MultiPoly(F5, 2, {(2, 0): 1, (0, 2): 1, (0, 0): 1})
    res = g.has_no_zeros(f)
    assert not res and res.method == "exhaustive"
    # x1^2 + x2^2 + 2 over F_5 never vanishes: -2 = 3 is not a sum of two squares mod 5?
    f = g.MultiPoly(F5, 2, {(2, 0): 1, (0, 2): 1, (0, 0): 2})
    sums = {(a * a + b * b) % 5 for a in range(5) for b in range(5)}
    expected = (5 - 2) % 5 not in sums
    assert bool(g.has_no_zeros(f)) == expected


def test_domain_cap():
    ctx = g.FieldCtx(127)
    f = g.MultiPoly(ctx, 3, {(1, 1, 1): 1, (0, 0, 0): 1})
    with pytest.raises(DomainTooLarge):
        g.has_no_zeros(f)  # 127^3 > 2^20


def test_poly_json_roundtrip(F5, F8):
    f = g.UniPoly(F5, {3: 2, 0: 1})
    assert g.poly_from_json(g.poly_to_json(f), F5) == f
    m = g.MultiPoly(F8, 2, {(0, 2): [1, 1, 0], (1, 0): 1})
    assert g.poly_from_json(g.poly_to_json(m), F8) == m
    with pytest.raises(g.errors.ParseError):
        g.poly_from_json({"neither": 1}, F5)
