import itertools
import random

import pytest

import gtdslib as g
from gtdslib.errors import (
    ArityMismatch,
    DomainTooLarge,
    GiHasZero,
    NotAPermutation,
    VariableOutOfScope,
)


def identity_system(ctx, n):
    x = g.UniPoly.x(ctx)
    one = g.MultiPoly.constant(ctx, n, 1)
    zero = g.MultiPoly(ctx, n, {})
    return g.Gtds(ctx, [(x, one, zero) for _ in range(n - 1)], x)


def test_build_validates(F5):
    x = g.UniPoly.x(F5)
    x3 = g.UniPoly.monomial(F5, 3)
    one = g.MultiPoly.constant(F5, 2, 1)
    zero = g.MultiPoly(F5, 2, {})
    ident = identity_system(F5, 2)
    assert ident.validated and ident.n == 2

    ok = g.build_gtds(
        F5, [(x3, g.MultiPoly(F5, 2, {(0, 2): 1, (0, 0): 3}), g.MultiPoly.variable(F5, 2, 1))], x3
    )
    assert ok.validated

    with pytest.raises(GiHasZero) as exc:
        g.Gtds(F5, [(x, g.MultiPoly.variable(F5, 2, 1), zero)], x)
    assert str(exc.value) == "GiHasZero(1)"

    with pytest.raises(NotAPermutation):
        g.Gtds(F5, [(g.UniPoly.monomial(F5, 2), one, zero)], x)

    with pytest.raises(VariableOutOfScope):
        # h_1 references x_1
        g.Gtds(F5, [(x, one, g.MultiPoly.variable(F5, 2, 0))], x)

    with pytest.raises(ArityMismatch):
        g.Gtds(F5, [(x, g.MultiPoly.constant(F5, 3, 1), zero)], x)


def test_eval_examples(F5, gtds_f5, identity_gtds_f5):
    for xs in itertools.product(F5.elements(), repeat=2):
        assert identity_gtds_f5.eval(xs) == xs
    # hand arithmetic mod 5: (1,2) -> (1*(4+3)+2, 2^3) = (4, 3)
    assert gtds_f5.eval((1, 2)) == (F5.element(4), F5.element(3))
    images = {gtds_f5.eval(xs) for xs in itertools.product(F5.elements(), repeat=2)}
    assert len(images) == 25
    with pytest.raises(ArityMismatch):
        gtds_f5.eval((1, 2, 3))


def test_invert_examples(F5, gtds_f5, identity_gtds_f5):
    for ys in itertools.product(F5.elements(), repeat=2):
        assert identity_gtds_f5.invert(ys) == ys
    assert gtds_f5.invert((4, 3)) == (F5.element(1), F5.element(2))


def test_invert_random_roundtrips(F5, F7, gtds_f5):
    rng = random.Random(7)
    x5 = g.UniPoly.monomial(F7, 5)
    sys7 = g.Gtds(
        F7,
        [
            (x5, g.MultiPoly(F7, 3, {(0, 2, 0): 1, (0, 0, 0): 1}), g.MultiPoly.variable(F7, 3, 2)),
            (x5, g.MultiPoly(F7, 3, {(0, 0, 2): 1, (0, 0, 0): 1}), g.MultiPoly(F7, 3, {})),
        ],
        x5,
    )
    for F in (gtds_f5, sys7):
        q, n = F.ctx.q, F.n
        for _ in range(250):
            y = tuple(F.ctx.from_index(rng.randrange(q)) for _ in range(n))
            assert F.eval(F.invert(y)) == y
            x = tuple(F.ctx.from_index(rng.randrange(q)) for _ in range(n))
            assert F.invert(F.eval(x)) == x


def test_power_inverse_conformance(gtds_f5):
    # extended-gcd division and the closed-form (.)^(q-2) route must agree
    for ys in itertools.product(gtds_f5.ctx.elements(), repeat=2):
        assert gtds_f5.invert(ys) == gtds_f5.invert(ys, use_power_inverse=True)


def test_orthogonality(F5, F7, identity_gtds_f5, gtds_f5):
    assert g.is_orthogonal_exhaustive(identity_gtds_f5)
    assert g.is_orthogonal_exhaustive(gtds_f5)
    sys53 = identity_system(F5, 3)
    assert g.is_orthogonal_exhaustive(sys53)
    with pytest.raises(DomainTooLarge):
        g.is_orthogonal_exhaustive(gtds_f5, max_domain=10)


def test_unchecked_negative_control(F5):
    # g_1 = x2 vanishes at x2 = 0, collapsing branch 1 there
    x = g.UniPoly.x(F5)
    raw = g.Gtds.unchecked(F5, [(x, g.MultiPoly.variable(F5, 2, 1), g.MultiPoly(F5, 2, {}))], x)
    assert not raw.validated
    assert not g.is_orthogonal_exhaustive(raw)


def test_triangularity(F7):
    # y_i may depend only on x_i..x_n: sweep the earlier coordinates
    x5 = g.UniPoly.monomial(F7, 5)
    F = g.Gtds(
        F7,
        [
            (x5, g.MultiPoly(F7, 3, {(0, 2, 0): 1, (0, 0, 0): 1}), g.MultiPoly.variable(F7, 3, 1)),
            (x5, g.MultiPoly(F7, 3, {(0, 0, 2): 1, (0, 0, 0): 1}), g.MultiPoly.variable(F7, 3, 2)),
        ],
        x5,
    )
    elems = list(F7.elements())
    for suffix in itertools.product(elems, repeat=2):
        outs = {F.eval((e, *suffix))[1:] for e in elems}
        assert len(outs) == 1  # branches 2..n blind to x_1
    for x2, x3 in itertools.product(elems, repeat=2):
        outs = {F.eval((e, x2, x3))[2] for e in elems}
        assert len(outs) == 1


def test_nontrivial_linear_combinations_balanced(F5, gtds_f5):
    # any nonzero mask a gives a balanced map x -> <a, F(x)>
    elems = list(F5.elements())
    for a in itertools.product(elems, repeat=2):
        if all(v.is_zero() for v in a):
            continue
        counts = {}
        for xs in itertools.product(elems, repeat=2):
            y = gtds_f5.eval(xs)
            v = (a[0] * y[0] + a[1] * y[1]).index()
            counts[v] = counts.get(v, 0) + 1
        assert set(counts.values()) == {5}


def test_state_codecs(F9):
    for i in range(F9.q**2):
        xs = g.state_from_index(F9, 2, i)
        assert g.state_index(F9, xs) == i
    listed = list(g.all_states(F9, 2))
    assert [g.state_index(F9, xs) for xs in listed] == list(range(F9.q**2))


def test_gtds_json_roundtrip(F5, gtds_f5, F7):
    doc = g.gtds_to_json(gtds_f5)
    back = g.gtds_from_json(doc)
    for xs in itertools.product(F5.elements(), repeat=2):
        assert back.eval(xs) == gtds_f5.eval(xs)
    # flipped system survives the trip
    bricks = g.make_bricks(F7, 5, [0, 0], [1, 1])
    back = g.gtds_from_json(g.gtds_to_json(bricks))
    assert back.flip
    for xs in itertools.product(F7.elements(), repeat=3):
        assert back.eval(xs) == bricks.eval(xs)
    with pytest.raises(g.errors.ParseError):
        g.gtds_from_json({"branches": []})
