import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from lambdaquad.commute import construct
from lambdaquad.expr import ONE, ZERO, Box, Num, Point, compile_expr, eval_at, is_zero_sampled, parse
from lambdaquad.quad import (
    I_forms,
    OneForm,
    Potential,
    QuadratureError,
    auxiliary_factor,
    auxiliary_relation_residual,
    closedness_residuals,
    cross_identity_residual,
    divergence_residual,
    first_order_factor_residual,
    gk15,
    integrate,
    integrating_factors,
    jacobi_last_multiplier,
    path_integrate,
    reduced_box,
    reduced_dependence,
    reduced_integrating_factors,
    reduced_rhs_residual,
    solved_I_forms,
    w_forms,
)
from lambdaquad.quad.gk import G_WEIGHTS, K_WEIGHTS, NODES


# -- Gauss-Kronrod rule --------------------------------------------------------


def test_gauss_nodes_match_legendre():
    x, w = np.polynomial.legendre.leggauss(7)
    gauss = G_WEIGHTS != 0
    np.testing.assert_allclose(NODES[gauss], x, atol=1e-15)
    np.testing.assert_allclose(G_WEIGHTS[gauss], w, atol=1e-15)
    assert K_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_exact_to_degree_22(deg):
    k, _ = gk15(lambda t: t**deg, [0.0], [1.0])
    assert k[0] == pytest.approx(1 / (deg + 1), rel=1e-14)


def test_gauss_error_estimate_vanishes_to_degree_13():
    _, err = gk15(lambda t: t**13 - 3 * t**4, [-0.5], [1.5])
    assert err[0] < 1e-14
    _, err = gk15(lambda t: t**14, [-0.5], [1.5])
    assert err[0] > 1e-6


@pytest.mark.parametrize(
    "f, a, b",
    [(lambda t: np.exp(np.sin(t)), 0.0, 3.0), (lambda t: 1 / (1 + 25 * t**2), -1.0, 1.0), (lambda t: np.sqrt(t), 0.0, 2.0)],
)
def test_adaptive_against_scipy(f, a, b):
    ref, _ = sp_integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13)
    val, err = integrate(f, a, b, atol=1e-10)
    assert abs(val - ref) < 1e-10 and err < 1e-10


def test_runge_closed_form():
    val, _ = integrate(lambda t: 1 / (1 + 25 * t**2), -1, 1)
    assert val == pytest.approx(0.4 * math.atan(5), abs=1e-12)


def test_reversed_and_empty_interval():
    assert integrate(np.cos, 1.0, 1.0) == (0.0, 0.0)
    assert integrate(np.cos, 1.0, 0.0)[0] == pytest.approx(-math.sin(1.0), abs=1e-13)


def test_non_finite_integrand():
    with pytest.raises(QuadratureError):
        integrate(lambda t: 1 / t, 0.0, 1.0)


# -- forms and potentials ------------------------------------------------------


def test_closedness(commuting, problems, box):
    d = commuting("pg27_f0")
    w1, w2 = w_forms(d, box)
    res = closedness_residuals(w2)
    assert len(res) == 1 and all(is_zero_sampled(r, box) for r in res)
    assert closedness_residuals(OneForm({"u": ONE}, box)) == []
    I1, _ = I_forms(d, box)
    res = closedness_residuals(I1)
    assert len(res) == 3 and all(is_zero_sampled(r, box) for r in res)
    assert not all(is_zero_sampled(r, box) for r in closedness_residuals(OneForm({"u": parse("ux"), "ux": ZERO}, box)))


def test_path_integrate_examples(commuting, box):
    d = commuting("pg27_f0")
    _, w2 = w_forms(d, box)
    r = path_integrate(w2, (0, 1, 0), (0, 1, 2))
    assert r.value == pytest.approx(1.0, abs=1e-10)
    assert r.estimated_error < 1e-10 and r.closedness_residual < 1e-9
    assert path_integrate(w2, (0, 1, 0), (0, 1, 0)).value == 0.0
    _, I2 = I_forms(d, box)
    assert path_integrate(I2, (0, 1, 0), (0.3, 1, 0)).value == pytest.approx(0.15, abs=1e-10)


def test_w_forms(commuting, problems, box):
    w1, w2 = w_forms(commuting("pg27_f0"), box)
    assert is_zero_sampled(w1.components["ux"] - parse("-1/(2*u)"), box)
    assert is_zero_sampled(w2.components["ux"] - parse("1/(2*u)"), box)
    P9 = problems("example9")
    _, w2 = w_forms(commuting("example9"), P9.box)
    assert is_zero_sampled(w2.components["ux"] - parse("-u/(u^2 + (ux + 1)^2)"), P9.box)


def test_w_forms_constant_lambdas(box):
    d = construct(ZERO, parse("3"), parse("1"), ONE, ONE, ONE, ONE)
    w1, _ = w_forms(d, box)
    assert w1.components["u"] == Num(3) / 2 and w1.components["ux"] == Num(-1) / 2
    pot = Potential(w1, (0, 1, 0))
    assert pot.at((0, 2, 1)) == pytest.approx(1.5 - 0.5, abs=1e-13)


def test_reduced_rhs(commuting, problems):
    for name in ("pg27_f0", "pg27_airy", "example9"):
        d, P = commuting(name), problems(name)
        for i in (1, 2):
            w = P.closed_forms[f"w{i}"]
            assert is_zero_sampled(reduced_rhs_residual(d, w, P.reduced[f"phi{i}"]), P.box)
            assert reduced_dependence(d, w, P.box, n=40).passed
    d = commuting("pg27_f0")
    assert reduced_rhs_residual(d, parse("x"), ONE) == ZERO


def test_reduced_dependence_detects_wrong_invariant(commuting, problems):
    P = problems("pg27_f0")
    assert not reduced_dependence(commuting("pg27_f0"), parse("u + ux"), P.box, n=40).passed


def test_I_forms_x_components(commuting, problems):
    P = problems("pg27_f0")
    I1, I2 = I_forms(commuting("pg27_f0"), P.box)
    assert is_zero_sampled(I1.components["x"] + parse("1/2"), P.box)
    assert is_zero_sampled(I2.components["x"] - parse("1/2"), P.box)


def test_example9_I2_orientation(commuting, problems):
    # the construction yields minus the gradient of x - arctan(u/(ux + 1))
    P = problems("example9")
    _, I2 = I_forms(commuting("example9"), P.box)
    assert is_zero_sampled(I2.components["ux"] + parse("u/(u^2 + (ux + 1)^2)"), P.box)


def test_integrating_factors(commuting, problems):
    P = problems("pg27_f0")
    mu1, mu2 = integrating_factors(commuting("pg27_f0"))
    assert is_zero_sampled(mu1 - parse("-u/((u^2 + ux + 1)^2 - 2*u^2)"), P.box)
    assert eval_at(mu1, (0, 1, -2)) == pytest.approx(0.5)
    G = problems("pg27_general")
    mu1, mu2 = integrating_factors(commuting("pg27_general"))
    assert is_zero_sampled(mu1 - G.closed_forms["mu1"], G.box)
    assert is_zero_sampled(mu2 + G.closed_forms["mu2"], G.box)


def test_last_multiplier(commuting, problems):
    P = problems("pg27_f0")
    d = commuting("pg27_f0")
    M = jacobi_last_multiplier(d)
    assert is_zero_sampled(M - parse("-2*u/(((u^2 + ux - 1)^2 + 2*u^2)*((u^2 + ux + 1)^2 - 2*u^2))"), P.box)
    G = problems("pg27_general")
    Mg = jacobi_last_multiplier(commuting("pg27_general"))
    assert is_zero_sampled(Mg + G.closed_forms["M"], G.box)
    for name in ("pg27_f0", "pg27_general", "example9"):
        d, Q = commuting(name), problems(name)
        M = jacobi_last_multiplier(d)
        assert is_zero_sampled(divergence_residual(M, d.phi), Q.box, tol=1e-9)
        I1, _ = I_forms(d, Q.box)
        assert is_zero_sampled(cross_identity_residual(M, I1, d.f1, d.g1), Q.box)
    assert not is_zero_sampled(divergence_residual(parse("u"), P.phi), P.box)


def test_reduced_factors(problems):
    P = problems("pg27_f0")
    nu1, nu2 = reduced_integrating_factors(P.reduced["g1"], P.reduced["g2"])
    assert nu1 == parse("1/(2*w^2 - 1)")
    rb = reduced_box(P.closed_forms["w1"], P.box)
    assert is_zero_sampled(first_order_factor_residual(nu1, P.reduced["phi1"], "w"), rb)
    G = problems("pg27_general")
    nu1, _ = reduced_integrating_factors(G.reduced["g1"], G.reduced["g2"])
    assert is_zero_sampled(nu1 - G.reduced["nu1"], reduced_box(G.closed_forms["w1"], G.box))
    assert first_order_factor_residual(ONE, ZERO, "w") == ZERO


def test_auxiliary_factor(commuting, problems):
    G = problems("pg27_general")
    d = commuting("pg27_general")
    C = {"C": 0.3}
    H1 = G.aux["H1"]
    assert is_zero_sampled(auxiliary_relation_residual(H1, G.phi), G.box, params=C)
    nt = auxiliary_factor(d, H1, 1)
    assert is_zero_sampled(first_order_factor_residual(nt, H1, "u"), G.box, params=C, tol=1e-8)
    shown = G.aux["nu_tilde1_variant"]
    assert not is_zero_sampled(first_order_factor_residual(shown, H1, "u"), G.box, params=C)
    trivial = construct(ZERO, ONE, parse("-1"), ONE, ONE, ONE, ONE)
    assert auxiliary_factor(trivial, parse("u*x + C"), 1) == ONE
    assert not is_zero_sampled(auxiliary_relation_residual(parse("u"), G.phi), G.box)


# -- properties of potentials --------------------------------------------------


@pytest.mark.parametrize("name", ["pg27_f0", "pg27_airy", "example9"])
def test_path_independence(name, commuting, problems):
    P = problems(name)
    forms = I_forms(commuting(name), P.box)
    pts = P.box.sample(6, seed=11, extra_loci=forms[1].loci())
    base = P.base_point
    checked = 0
    for i in range(6):
        t = (pts["x"][i], pts["u"][i], pts["ux"][i])
        b = np.asarray(base.as_tuple())
        mid = tuple(0.5 * (b + np.asarray(t)) + [0.0, 0.03, 0.04])
        try:
            a = path_integrate(forms[1], base, t).value
            c = path_integrate(forms[1], base, t, waypoints=[mid]).value
        except Exception:
            continue
        assert abs(a - c) <= 1e-8 + 1e-8 * abs(a)
        checked += 1
    assert checked >= 3


def test_potential_gradient_matches_form(commuting, problems):
    P = problems("pg27_f0")
    _, I2 = I_forms(commuting("pg27_f0"), P.box)
    pot = Potential(I2, P.base_point)
    p = np.array([0.4, 1.2, 0.3])
    h = 1e-4
    env = dict(zip(("x", "u", "ux"), p))
    for k, v in enumerate(("x", "u", "ux")):
        e = np.zeros(3)
        e[k] = h
        fd = (pot.at(tuple(p + e)) - pot.at(tuple(p - e))) / (2 * h)
        comp = float(compile_expr(I2.components[v])(env))
        assert abs(fd - comp) <= 1e-5 * (1 + abs(comp))


def test_functional_independence(commuting, problems):
    for name in ("pg27_f0", "example9"):
        P = problems(name)
        I1, I2 = I_forms(commuting(name), P.box)
        pts = P.box.sample(200)
        a = np.stack([compile_expr(I1.components[v])(pts) for v in ("x", "u", "ux")])
        b = np.stack([compile_expr(I2.components[v])(pts) for v in ("x", "u", "ux")])
        minor = np.abs(np.cross(a.T, b.T)).max(axis=1)
        assert np.mean(minor > 1e-6) >= 0.95


@pytest.mark.parametrize("name", ["pg27_f0", "pg27_airy", "example9"])
def test_solved_forms_agree_with_factor_forms(name, commuting, problems):
    P, d = problems(name), commuting(name)
    for a, b in zip(I_forms(d, P.box), solved_I_forms(d, P.box)):
        for v in ("x", "u", "ux"):
            assert is_zero_sampled(a.components[v] - b.components[v], P.box)


def test_solved_forms_detect_wrong_g(commuting, problems):
    # doubling g2 halves mu1 but leaves the solved gradient unchanged
    P, d = problems("pg27_f0"), commuting("pg27_f0")
    bad = construct(d.phi, d.lambda1, d.lambda2, d.f1, d.f2, d.g1, d.g2 * 2)
    assert not is_zero_sampled(I_forms(bad, P.box)[0].components["ux"] - solved_I_forms(d, P.box)[0].components["ux"], P.box)
