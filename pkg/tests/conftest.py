import pytest

import gtdslib as g


@pytest.fixture(scope="session")
def F5():
    return g.FieldCtx(5)


@pytest.fixture(scope="session")
def F7():
    return g.FieldCtx(7)


@pytest.fixture(scope="session")
def F11():
    return g.FieldCtx(11)


@pytest.fixture(scope="session")
def F13():
    return g.FieldCtx(13)


@pytest.fixture(scope="session")
def F4():
    return g.FieldCtx(2, 2, [1, 1, 1])


@pytest.fixture(scope="session")
def F8():
    return g.FieldCtx(2, 3, [1, 1, 0, 1])


@pytest.fixture(scope="session")
def F9():
    return g.FieldCtx(3, 2, [1, 0, 1])


@pytest.fixture(scope="session")
def gtds_f5(F5):
    """Two-branch system over F_5: p_i = x^3, g_1 = x2^2 + 3, h_1 = x2."""
    x3 = g.UniPoly.monomial(F5, 3)
    return g.Gtds(
        F5,
        [(x3, g.MultiPoly(F5, 2, {(0, 2): 1, (0, 0): 3}), g.MultiPoly.variable(F5, 2, 1))],
        x3,
    )


@pytest.fixture(scope="session")
def gtds_f11(F11):
    """Two-branch system over F_11: p_i = x^3, g_1 = x2^2 + 1, h_1 = x2."""
    x3 = g.UniPoly.monomial(F11, 3)
    return g.Gtds(
        F11,
        [(x3, g.MultiPoly(F11, 2, {(0, 2): 1, (0, 0): 1}), g.MultiPoly.variable(F11, 2, 1))],
        x3,
    )


@pytest.fixture(scope="session")
def identity_gtds_f5(F5):
    return g.Gtds(
        F5,
        [(g.UniPoly.x(F5), g.MultiPoly.constant(F5, 2, 1), g.MultiPoly(F5, 2, {}))],
        g.UniPoly.x(F5),
    )
