"""Vector fields, equilibria, eigenstructure and analytic curves."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from shimor import dynsys
from shimor.errors import DomainError

# closed-form eigen data of the origin at (alpha, lambda) = (0.4, 0.9):
# gamma and lambda_ss are the roots of s^2 + 0.9 s - 1, lambda_s = -alpha
_DISC = np.sqrt(0.9 * 0.9 + 4.0)
GAMMA_REF = 0.5 * (-0.9 + _DISC)
LSS_REF = 0.5 * (-0.9 - _DISC)
IDX_REF = 0.8 / (_DISC - 0.9)

# numeric Hopf crossing on the alpha = 0.4 line (brentq on the wing
# eigenvalue margin, xtol 1e-13), frozen from a long-run reference
HOPF_LAM_04 = 1.2282856857085709


def test_vector_field_values():
    p = dynsys.sm(0.4, 0.9)
    f = dynsys.vector_field(p, [1.0, 2.0, 3.0])
    # xdot = y, ydot = x - lam*y - x*z, zdot = -alpha*z + x^2
    assert_allclose(f, [2.0, 1.0 - 1.8 - 3.0, -1.2 + 1.0], rtol=0, atol=1e-15)

    pl = dynsys.lorenz(8.0 / 3.0, 10.0, 28.0)
    fl = dynsys.vector_field(pl, [1.0, 1.0, 1.0])
    assert_allclose(fl, [0.0, 26.0, 1.0 - 8.0 / 3.0], rtol=0, atol=1e-14)


def test_ext_sm_reduces_to_sm_at_B_zero():
    rng = np.random.default_rng(3)
    p0 = dynsys.sm(0.4, 0.9)
    p1 = dynsys.ext_sm(0.4, 0.9, 0.0)
    for s in rng.normal(size=(20, 3)):
        assert_allclose(dynsys.vector_field(p1, s), dynsys.vector_field(p0, s),
                        rtol=0, atol=0)


def test_field_equivariance_under_symmetry():
    # F(sigma(s)) = sigma(F(s)) for sigma = (x, y, z) -> (-x, -y, z)
    rng = np.random.default_rng(11)
    p = dynsys.ext_sm(0.55, 0.7, 0.3)
    for s in rng.normal(size=(25, 3)):
        lhs = dynsys.vector_field(p, dynsys.symmetry_image(s))
        rhs = dynsys.symmetry_image(dynsys.vector_field(p, s))
        assert_allclose(lhs, rhs, rtol=0, atol=1e-14)


def test_divergence_is_constant():
    rng = np.random.default_rng(7)
    p = dynsys.sm(0.4, 0.9)
    for s in rng.normal(size=(10, 3)) * 3.0:
        tr = np.trace(dynsys.jacobian(p, s))
        assert abs(tr - (-1.3)) < 1e-14


def test_origin_saddle_closed_form():
    p = dynsys.sm(0.4, 0.9)
    rep = dynsys.equilibria(p)[0]
    assert rep.name == "O"
    assert_allclose(rep.location, np.zeros(3), atol=0)
    assert_allclose(rep.gamma, GAMMA_REF, rtol=1e-12)
    assert_allclose(rep.lambda_s, -0.4, rtol=1e-12)
    assert_allclose(rep.lambda_ss, LSS_REF, rtol=1e-12)
    assert_allclose(rep.saddle_index, IDX_REF, rtol=1e-12)
    assert rep.a2_condition_holds
    assert not rep.stable

    g, ls, lss = dynsys.saddle_eigenvalues(0.4, 0.9)
    assert_allclose([g, ls, lss], [GAMMA_REF, -0.4, LSS_REF], rtol=1e-12)
    assert_allclose(dynsys.saddle_index(0.4, 0.9), IDX_REF, rtol=1e-12)


def test_wing_equilibria_locations():
    p = dynsys.sm(0.4, 0.9)
    _, op, om = dynsys.equilibria(p)
    assert_allclose(op.location, [np.sqrt(0.4), 0.0, 1.0], rtol=1e-15)
    assert_allclose(om.location, [-np.sqrt(0.4), 0.0, 1.0], rtol=1e-15)

    # extended system shifts the pair to x^2 = alpha/(1 + alpha B)
    pe = dynsys.ext_sm(0.4, 0.9, 0.5)
    _, oep, _ = dynsys.equilibria(pe)
    assert_allclose(oep.location, [np.sqrt(0.4 / 1.2), 0.0, 1.0 / 1.2],
                    rtol=1e-14)


def test_wing_eigenvalues_match_cubic():
    # characteristic polynomial of the wing linearization:
    # s^3 + (lam + alpha) s^2 + alpha lam s + 2 alpha
    for alpha, lam in [(0.4, 0.9), (0.4, 1.3), (0.7, 0.6)]:
        rep = dynsys.equilibria(dynsys.sm(alpha, lam))[1]
        roots = np.roots([1.0, lam + alpha, alpha * lam, 2.0 * alpha])
        got = np.sort_complex(rep.eigenvalues)
        assert_allclose(np.sort_complex(roots), got, rtol=1e-9, atol=1e-10)


def test_wing_stability_flips_across_hopf():
    # wings are unstable foci inside the chaotic window and stable
    # beyond the Hopf curve
    assert dynsys.wing_stability_margin(0.4, 0.9) > 0.0
    assert dynsys.wing_stability_margin(0.4, 1.3) < 0.0
    assert not dynsys.equilibria(dynsys.sm(0.4, 0.9))[1].stable
    assert dynsys.equilibria(dynsys.sm(0.4, 1.3))[1].stable


def test_lorenz_equilibria():
    p = dynsys.lorenz(8.0 / 3.0, 10.0, 28.0)
    o, op, om = dynsys.equilibria(p)
    xs = np.sqrt(8.0 / 3.0 * 27.0)
    assert_allclose(op.location, [xs, xs, 27.0], rtol=1e-14)
    assert o.gamma > 0 > o.lambda_s > o.lambda_ss
    with pytest.raises(DomainError):
        dynsys.equilibria(dynsys.lorenz(8.0 / 3.0, 10.0, 0.5))


def test_unstable_eigenvector():
    p = dynsys.sm(0.4, 0.9)
    v = dynsys.unstable_eigenvector(0.4, 0.9)
    J = dynsys.jacobian(p, np.zeros(3))
    assert_allclose(J @ v, GAMMA_REF * v, rtol=0, atol=1e-13)
    assert v[0] > 0
    assert_allclose(np.linalg.norm(v), 1.0, rtol=1e-15)


def test_saddle_frame_orthonormal_and_ordered():
    Q = dynsys.saddle_frame(0.4, 0.9)
    assert_allclose(Q.T @ Q, np.eye(3), rtol=0, atol=1e-14)
    # first column is the unstable direction, second the z-axis
    assert_allclose(np.abs(Q[:, 0]), dynsys.unstable_eigenvector(0.4, 0.9),
                    rtol=0, atol=1e-14)
    assert_allclose(np.abs(Q[:, 1]), [0.0, 0.0, 1.0], rtol=0, atol=1e-14)


def test_saddle_index_domain():
    with pytest.raises(DomainError):
        dynsys.saddle_index(0.0, 0.9)
    with pytest.raises(DomainError):
        dynsys.saddle_index(-0.1, 0.9)


def test_hopf_curve_value():
    assert_allclose(dynsys.hopf_curve_alpha(0.9), (2.0 - 0.81) / 0.9,
                    rtol=1e-15)


def test_hopf_numeric_matches_analytic():
    worst = 0.0
    for lam in np.linspace(0.8, 1.4, 13):
        a_ref = dynsys.hopf_curve_alpha(float(lam))
        a_num = dynsys.hopf_alpha_numeric(float(lam))
        worst = max(worst, abs(a_num - a_ref))
    assert worst < 1e-8


def test_hopf_lambda_crossing_frozen():
    lam = dynsys.hopf_lambda_numeric(0.4)
    assert abs(lam - HOPF_LAM_04) < 1e-10
    # the margin genuinely changes sign there
    assert dynsys.wing_stability_margin(0.4, lam - 1e-6) > 0
    assert dynsys.wing_stability_margin(0.4, lam + 1e-6) < 0


def test_saddle_index_level_roundtrip():
    for nu0 in (0.5, 1.0, 1.5):
        for lam in (0.6, 0.9, 1.2):
            a = dynsys.saddle_index_level_alpha(nu0, lam)
            assert_allclose(dynsys.saddle_index(a, lam), nu0, rtol=1e-13)


def test_analytic_curve_dispatch():
    assert dynsys.analytic_curve("hopf", 0.9) == dynsys.hopf_curve_alpha(0.9)
    assert (dynsys.analytic_curve("saddle_index_level", 0.9, nu0=1.0)
            == dynsys.saddle_index_level_alpha(1.0, 0.9))
    with pytest.raises(DomainError):
        dynsys.analytic_curve("no_such_curve", 0.9)


def test_lorenz_parameter_transform():
    # exact closed forms: alpha = b/sqrt(q), lam = (1+sigma)/sqrt(q),
    # B = sqrt(q)/(2 sigma - b) with q = sigma (r - 1) = 270
    p = dynsys.lorenz_to_extended_sm(8.0 / 3.0, 10.0, 28.0)
    sq = np.sqrt(270.0)
    assert p.system_id == "ext_sm"
    assert_allclose(p.alpha, (8.0 / 3.0) / sq, rtol=1e-14)
    assert_allclose(p.lam, 11.0 / sq, rtol=1e-14)
    assert_allclose(p.B, sq / (20.0 - 8.0 / 3.0), rtol=1e-14)
    # agreement with the usual printed 6-decimal values is only to
    # ~2e-6: those prints are off by about one unit in the last digit
    assert abs(p.alpha - 0.162289) < 2.5e-6
    assert abs(p.lam - 0.669437) < 2.5e-6
    assert abs(p.B - 0.947981) < 2.5e-6


def test_lorenz_state_map_conjugacy_pointwise():
    # the state/time change sends the Lorenz field into the extended-SM
    # field identically, not only on the attractor
    b, sigma, r = 8.0 / 3.0, 10.0, 28.0
    pl = dynsys.lorenz(b, sigma, r)
    pe = dynsys.lorenz_to_extended_sm(b, sigma, r)
    phi, jac_phi, tscale = dynsys.lorenz_state_map(b, sigma, r)
    rng = np.random.default_rng(5)
    for s in rng.normal(size=(30, 3)) * np.array([8.0, 8.0, 15.0]) + [0, 0, 20]:
        lhs = jac_phi(s) @ dynsys.vector_field(pl, s) * tscale
        rhs = dynsys.vector_field(pe, phi(s))
        assert np.linalg.norm(lhs - rhs) < 1e-13


def test_state_map_domain_errors():
    with pytest.raises(DomainError):
        dynsys.lorenz_to_extended_sm(8.0 / 3.0, 10.0, 1.0)   # q = 0
    with pytest.raises(DomainError):
        dynsys.lorenz_state_map(25.0, 10.0, 28.0)            # b >= 2 sigma
