import pytest

from lambdaquad.commute import EquivalentPairsError, ResidualCheckFailed, build_commuting, rho_fn, verify_f_pair, verify_g_pair
from lambdaquad.expr import ONE, ZERO, div, is_zero_sampled, parse, sub
from lambdaquad.jetfield import apply, field_is_zero

PHI_F0 = parse("ux^2/(2*u) - 2*u*ux - u^3/2 - 1/(2*u)")
L1 = parse("ux/u - u + 1/u")
L2 = parse("ux/u - u - 1/u")


def test_rho(box, problems):
    assert is_zero_sampled(rho_fn(L1, L2, PHI_F0) - parse("2/u"), box)
    assert rho_fn(parse("2"), parse("3")) == ZERO
    P = problems("example9")
    assert is_zero_sampled(rho_fn(P.lambda1, P.lambda2, P.phi) - parse("(ux + 1)/(ux*u)"), P.box)


def test_rho_equivalent_guard():
    with pytest.raises(EquivalentPairsError, match="equivalent symmetry pairs"):
        rho_fn(L1, L1)


def test_f_pair(box, problems):
    u2 = parse("u^2")
    rho = rho_fn(L1, L2, PHI_F0)
    assert all(is_zero_sampled(r, box) for r in verify_f_pair(u2, u2, rho, L1, L2, PHI_F0))
    assert all(r == ZERO for r in verify_f_pair(ONE, ONE, ZERO, parse("1"), parse("2")))
    P = problems("example9")
    rho = rho_fn(P.lambda1, P.lambda2, P.phi)
    assert all(is_zero_sampled(r, P.box) for r in verify_f_pair(P.f1, P.f2, rho, P.lambda1, P.lambda2, P.phi))


@pytest.mark.parametrize("name", ["pg27_f0", "pg27_general", "pg27_airy", "example9"])
def test_g_pair(name, commuting, problems):
    d, P = commuting(name), problems(name)
    res = verify_g_pair(d.g1, d.g2, d.rho1, d.rho2, d.phi, d.Y1, d.Y2)
    assert all(is_zero_sampled(r, P.box) for r in res)


def test_g_pair_failure(commuting, problems):
    d = commuting("pg27_f0")
    first = verify_g_pair(ONE, ONE, d.rho1, d.rho2, d.phi, d.Y1, d.Y2)[0]
    assert is_zero_sampled(first + d.rho1, problems("pg27_f0").box)
    assert not is_zero_sampled(first, problems("pg27_f0").box)


def test_rhos_for_pg27_pair(commuting, box):
    d = commuting("pg27_f0")
    assert is_zero_sampled(d.rho1 - parse("-ux/u - u + 1/u"), box)
    assert is_zero_sampled(d.rho2 - parse("-ux/u - u - 1/u"), box)


def test_Z1_for_f0(commuting, problems):
    d, P = commuting("pg27_f0"), problems("pg27_f0")
    assert is_zero_sampled(d.h1 - parse("((u^2 + ux - 1)^2 + 2*u^2)/2"), P.box)
    assert all(field_is_zero(d.Z1 - d.X1.scale(parse("((u^2 + ux - 1)^2 + 2*u^2)/2")), P.box))
    # the variant coefficient with u^2 in place of 2*u^2 is not a symmetry factor
    shown = parse("((u^2 + ux - 1)^2 + u^2)/2")
    assert not is_zero_sampled(sub(d.lambda1, div(apply(d.A, shown), shown)), P.box)


@pytest.mark.parametrize("name", ["pg27_f0", "pg27_general", "pg27_airy", "example9"])
def test_build_commuting(name, problems):
    P = problems(name)
    data, report = build_commuting(P.phi, P.lambda1, P.lambda2, P.f1, P.f2, P.g1, P.g2, P.box, tol=1e-8)
    assert set(report) == {"[Y1,A]-rho1*Y1", "[Y2,A]-rho2*Y2", "[Y1,Y2]", "[Z1,A]", "[Z2,A]", "[Z1,Z2]"}
    assert all(t for tests in report.values() for t in tests)
    for lam, h in ((data.lambda1, data.h1), (data.lambda2, data.h2)):
        assert is_zero_sampled(lam - div(apply(data.A, h), h), P.box)


def test_build_commuting_rejects_bad_f(box):
    with pytest.raises(ResidualCheckFailed) as info:
        build_commuting(PHI_F0, L1, L2, parse("u"), parse("u^2"), ONE, ONE, box)
    assert info.value.name.startswith("X2(f1)")


def test_equal_lambdas_rejected(box):
    with pytest.raises(EquivalentPairsError):
        build_commuting(PHI_F0, L1, L1, ONE, ONE, ONE, ONE, box)


def test_rho_zero_specialization():
    # constant-coefficient case where rho vanishes: X1(l2) = X2(l1) = 0
    from lambdaquad.commute import vertical_field

    l1, l2, phi = parse("1"), parse("-1"), parse("u")
    assert rho_fn(l1, l2, phi) == ZERO
    assert apply(vertical_field(l1, phi), l2) == ZERO and apply(vertical_field(l2, phi), l1) == ZERO
