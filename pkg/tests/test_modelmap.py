"""The one-dimensional model map mu - A|X|^nu and its bifurcation curves."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from shimor import modelmap as mm
from shimor.errors import DomainError

A_REF, NU_REF = 0.63, 0.8

# closed forms at (A, nu) = (0.63, 0.8)
L2_REF = 0.63 ** 5            # A^(1/(1-nu))
L1LA_REF = 0.315 ** 5         # (A/2)^(1/(1-nu))

# solved curves at (A, nu) = (0.63, 0.8), frozen from converged brentq
# runs (residuals < 2e-17)
L_SN_REF = 0.008130040160255994
L_PD_REF = 0.07317036144230393
L_LAC_REF = 0.020255008597251125
L2_LA_REF = 0.008340892038797138


def _f(x, p):
    return p.mu - p.A * abs(x) ** p.nu


def test_step_value():
    p = mm.ModelParams(0.1, A_REF, NU_REF)
    assert_allclose(mm.step(0.1, p), 0.1 - 0.63 * 10.0 ** -0.8, rtol=1e-15)


def test_orbit_matches_reference_iteration():
    p = mm.ModelParams(0.05, A_REF, NU_REF)
    xs = mm.orbit(p, 0.3, 25)
    x = 0.3
    for i, xi in enumerate(xs):
        assert xi == x if i == 0 else abs(xi - x) == 0.0
        x = _f(x, p)
    assert xs.shape == (26,)
    assert mm.orbit(p, 0.3, 0).tolist() == [0.3]
    with pytest.raises(DomainError):
        mm.orbit(p, 0.3, -1)


def test_critical_orbit_symbols():
    p = mm.ModelParams(0.01, A_REF, NU_REF)
    xs, sym = mm.critical_orbit(p, 6)
    assert xs[0] == 0.0 and xs[1] == p.mu
    assert sym[0] == "1"
    assert all((s == "1") == (x >= 0) for s, x in zip(sym, xs))
    # f(mu) < 0 at this mu, so the third symbol is 0
    assert sym[:3] == "110"

    # the map is even in X, so the minus branch shares the iterates and
    # flips only the corner symbol
    xs_m, sym_m = mm.critical_orbit(p, 6, branch="minus")
    assert np.all(xs_m[1:] == xs[1:])
    assert sym_m[0] == "0" and sym_m[1:] == sym[1:]
    with pytest.raises(DomainError):
        mm.critical_orbit(p, 6, branch="down")


def test_critical_orbit_truncates_on_escape():
    p = mm.ModelParams(3.0, 2.0, 1.5)
    xs, sym = mm.critical_orbit(p, 50)
    assert len(xs) < 51
    assert np.all(np.abs(xs) <= 1e6)
    assert len(sym) == len(xs)


def test_closed_forms():
    assert mm.analytic_curve("l1", A_REF, NU_REF) == 0.0
    assert_allclose(mm.analytic_curve("l2", A_REF, NU_REF), L2_REF, rtol=1e-15)
    assert_allclose(mm.analytic_curve("l1_LA", A_REF, NU_REF), L1LA_REF,
                    rtol=1e-15)
    assert abs(L2_REF - 0.0992436543) < 1e-10
    assert abs(L1LA_REF - 0.0031013642) < 1e-10


def test_closed_form_orbit_identities_small_grid():
    # l2: the corner orbit {0, mu} is a 2-cycle; l1_LA: the second
    # corner iterate lands on a fixed point
    for A in np.linspace(0.35, 0.85, 5):
        for nu in np.linspace(0.6, 0.9, 5):
            mu2 = mm.analytic_curve("l2", float(A), float(nu))
            p2 = mm.ModelParams(mu2, float(A), float(nu))
            assert abs(_f(_f(0.0, p2), p2)) < 1e-13

            mula = mm.analytic_curve("l1_LA", float(A), float(nu))
            pla = mm.ModelParams(mula, float(A), float(nu))
            x2 = _f(_f(0.0, pla), pla)
            assert abs(_f(x2, pla) - x2) < 1e-13


def test_analytic_curve_domain():
    with pytest.raises(DomainError):
        mm.analytic_curve("l2", A_REF, 1.0)
    with pytest.raises(DomainError):
        mm.analytic_curve("l1", A_REF, 1.2)   # exponent undefined even for l1
    with pytest.raises(DomainError):
        mm.analytic_curve("l_SN", A_REF, NU_REF)   # not a closed form
    with pytest.raises(DomainError):
        mm.analytic_curve("l2", -0.2, NU_REF)


def test_solved_curves_frozen_values():
    for kind, ref in [("l_SN", L_SN_REF), ("l_PD", L_PD_REF),
                      ("l_lac", L_LAC_REF), ("l2_LA", L2_LA_REF)]:
        pt = mm.solve_curve(kind, A_REF, NU_REF)
        assert abs(pt.params.mu - ref) < 1e-12, kind
        assert pt.residual < 1e-10, kind
        assert pt.kind == kind


def test_curve_ordering_on_reference_line():
    mus = {k: mm.solve_curve(k, A_REF, NU_REF).params.mu
           for k in ("l_SN", "l_PD", "l_lac", "l2_LA")}
    mus["l1_LA"] = mm.analytic_curve("l1_LA", A_REF, NU_REF)
    mus["l2"] = mm.analytic_curve("l2", A_REF, NU_REF)
    order = ["l1_LA", "l_SN", "l2_LA", "l_lac", "l_PD", "l2"]
    vals = [mus[k] for k in order]
    assert vals == sorted(vals)


def test_saddle_node_fixed_point_count():
    # the fixed-point pair on the increasing branch (x < 0) exists
    # below l_SN and collides away as mu crosses it
    def negative_fixed_points(mu):
        xs = np.linspace(-1.0, -1e-12, 20001)
        g = mu - A_REF * np.abs(xs) ** NU_REF - xs
        return int(np.sum(np.diff(np.sign(g)) != 0))

    assert negative_fixed_points(L_SN_REF - 1e-3) == 2
    assert negative_fixed_points(L_SN_REF + 1e-3) == 0
    # the decreasing-branch fixed point is untouched by the crossing
    from scipy.optimize import brentq
    for mu in (L_SN_REF - 1e-3, L_SN_REF + 1e-3):
        xf = brentq(lambda x: mu - A_REF * x ** NU_REF - x, 1e-15, mu)
        assert 0.0 < xf < mu


def test_period_doubling_derivative():
    pt = mm.solve_curve("l_PD", A_REF, NU_REF)
    p = pt.params
    # the positive fixed point sits where f' = -1
    from scipy.optimize import brentq
    xf = brentq(lambda x: _f(x, p) - x, 1e-9, p.mu)
    fprime = -p.A * p.nu * xf ** (p.nu - 1.0)
    assert abs(fprime + 1.0) < 1e-10


def test_lacuna_curve_lands_on_unstable_fixed_point():
    pt = mm.solve_curve("l_lac", A_REF, NU_REF)
    p = pt.params
    x3 = _f(_f(_f(0.0, p), p), p)
    assert abs(_f(x3, p) - x3) < 1e-12      # on a fixed point
    fprime = -p.A * p.nu * x3 ** (p.nu - 1.0)
    assert abs(abs(fprime) - 1.338) < 2e-3  # and it is a repelling one
    assert abs(fprime) > 1.0


def test_l2_LA_corner_orbit_hits_alternating_two_cycle():
    pt = mm.solve_curve("l2_LA", A_REF, NU_REF)
    p = pt.params
    xs = mm.orbit(p, 0.0, 5)
    p1, p2 = xs[3], xs[4]
    assert abs(p1 - (-0.001248153992)) < 1e-9
    assert abs(p2 - 0.005346179883) < 1e-9
    assert p1 < 0.0 < p2
    assert abs(_f(p1, p) - p2) < 1e-12 and abs(_f(p2, p) - p1) < 1e-12
    # the cycle is unstable where the corner orbit reaches it
    deriv = (p.A * p.nu * abs(p1) ** (p.nu - 1.0)
             * p.A * p.nu * abs(p2) ** (p.nu - 1.0))
    assert abs(deriv - 2.754) < 2e-3


def test_l2_LA_sits_inside_alternating_cycle_window():
    for A, nu in [(A_REF, NU_REF), (0.5, 0.7), (0.63, 0.95)]:
        lo = mm.analytic_curve("l1_LA", A, nu)
        hi = mm.analytic_curve("l2", A, nu)
        mu = mm.solve_curve("l2_LA", A, nu).params.mu
        assert lo < mu < hi


def test_solve_curve_errors():
    with pytest.raises(DomainError):
        mm.solve_curve("l2", A_REF, NU_REF)       # closed form, not solved
    with pytest.raises(DomainError):
        mm.solve_curve("no_such_kind", A_REF, NU_REF)
    with pytest.raises(DomainError):
        mm.solve_curve("l_SN", A_REF, NU_REF, bracket=(1e3, 2e3))


def test_classify_regimes():
    assert mm.classify_regime(mm.ModelParams(0.3, A_REF, NU_REF)) \
        == "stable_periodic"
    assert mm.classify_regime(mm.ModelParams(0.05, A_REF, NU_REF)) \
        == "chaotic_candidate"
    assert mm.classify_regime(mm.ModelParams(3.0, 2.0, 1.5)) == "escaped"
    with pytest.raises(DomainError):
        mm.classify_regime(mm.ModelParams(0.3, A_REF, NU_REF), N_probe=10)


def test_classification_survives_probe_doubling():
    for mu in (0.05, 0.12, 0.3, 0.02):
        p = mm.ModelParams(mu, A_REF, NU_REF)
        a = mm.classify_regime(p, N_probe=1000)
        b = mm.classify_regime(p, N_transient=4000, N_probe=2000)
        assert a == b, mu


def test_mirror_conjugacy_is_exact():
    p = mm.ModelParams(0.07, A_REF, NU_REF)
    q = mm.mirror_params(p)
    xs = mm.orbit(p, 0.2, 40)
    ys = mm.orbit(q, -0.2, 40)
    assert np.all(ys == -xs)


def test_regime_grid_matches_pointwise_classification():
    mus = np.linspace(0.01, 0.3, 7)
    nus = np.linspace(0.6, 0.9, 5)
    g = mm.regime_grid(mus, nus, other="nu", fixed=A_REF)
    assert g.shape == (5, 7)
    names = ("stable_periodic", "chaotic_candidate", "escaped")
    for i in (0, 2, 4):
        for j in (0, 3, 6):
            want = mm.classify_regime(
                mm.ModelParams(float(mus[j]), A_REF, float(nus[i])))
            assert names[g[i, j]] == want
    with pytest.raises(DomainError):
        mm.regime_grid(mus, nus, other="sigma")


def test_params_validation():
    with pytest.raises(DomainError):
        mm.ModelParams(0.1, A_REF, 0.0)
    with pytest.raises(DomainError):
        mm.ModelParams(0.1, A_REF, -0.5)
