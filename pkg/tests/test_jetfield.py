import pytest

from lambdaquad.expr import ONE, ZERO, is_zero_sampled, parse
from lambdaquad.jetfield import JetField, LambdaPair, apply, evolution_field, field_is_zero, lambda_prolong, lie_bracket

PHI_F0 = parse("ux^2/(2*u) - 2*u*ux - u^3/2 - 1/(2*u)")
PHI_9 = parse("-ux/u - 1/u - u")
L1 = parse("ux/u - u + 1/u")
L2 = parse("ux/u - u - 1/u")
RHO1 = parse("-ux/u - u + 1/u")


def same(a, b, box):
    return is_zero_sampled(a - b, box)


def test_evolution_field(box):
    A = evolution_field(PHI_F0)
    assert A.cx == ONE and A.cu == parse("ux") and A.cux == PHI_F0
    assert evolution_field(ZERO).components == (ONE, parse("ux"), ZERO)
    assert evolution_field(PHI_9).cux == parse("-ux/u - 1/u - u")


def test_prolong_vertical_unit_field():
    X = lambda_prolong(LambdaPair.vertical(L1), PHI_F0)
    assert X.cx == ZERO and X.cu == ONE
    assert X.cux == L1


def test_prolong_gives_Y1(box):
    Y = lambda_prolong(LambdaPair(ZERO, parse("u^2"), RHO1), PHI_F0)
    assert same(Y.cu, parse("u^2"), box)
    assert same(Y.cux, parse("ux*u - u^3 + u"), box)


def test_translation_field():
    V = lambda_prolong(LambdaPair(ONE, ZERO, ZERO), PHI_9)
    assert V.components == (ONE, ZERO, ZERO)


def test_apply(box, problems):
    A = evolution_field(PHI_F0)
    w2 = parse("(ux + u^2 - 1)/(2*u)")
    assert same(apply(A, w2), parse("-((ux + u^2 - 1)/(2*u))^2 - 1/2"), box)
    assert apply(A, parse("7")) == ZERO
    X2 = JetField(ZERO, ONE, L2)
    assert same(apply(X2, parse("u^2")), parse("2*u"), box)


def test_brackets_pg27_pair(box):
    X1, X2 = JetField(ZERO, ONE, L1), JetField(ZERO, ONE, L2)
    rho = parse("2/u")
    assert all(field_is_zero(lie_bracket(X1, X2) - (X1 - X2).scale(rho), box))
    assert all(field_is_zero(lie_bracket(X1, X1), box))
    RHO2 = parse("-ux/u - u - 1/u")
    Y1 = lambda_prolong(LambdaPair(ZERO, parse("u^2"), RHO1), PHI_F0)
    Y2 = lambda_prolong(LambdaPair(ZERO, parse("u^2"), RHO2), PHI_F0)
    assert all(field_is_zero(lie_bracket(Y1, Y2), box))


CATALOG = ["pg27_f0", "pg27_general", "pg27_airy", "example9"]


@pytest.mark.parametrize("name", CATALOG)
def test_field_identities(name, commuting, problems):
    d, P = commuting(name), problems(name)
    A, X1, X2 = d.A, d.X1, d.X2
    box = P.box
    assert all(field_is_zero(lie_bracket(X1, X2) + lie_bracket(X2, X1), box))
    jac = lie_bracket(A, lie_bracket(X1, X2)) + lie_bracket(X1, lie_bracket(X2, A)) + lie_bracket(X2, lie_bracket(A, X1))
    assert all(field_is_zero(jac, box, tol=1e-8))
    f = d.f1
    leib = lie_bracket(X1.scale(f), X2) - (lie_bracket(X1, X2).scale(f) - X1.scale(apply(X2, f)))
    assert all(field_is_zero(leib, box))
    for X, lam in ((X1, d.lambda1), (X2, d.lambda2)):
        assert all(field_is_zero(lie_bracket(X, A) - X.scale(lam), box))
