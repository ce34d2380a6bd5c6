"""Section portraits, the 1D map extraction and its shape diagnostics."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from shimor import dynsys, poincare
from shimor.errors import DomainError
from shimor.integrate import SectionSpec

P = dynsys.sm(0.4, 0.9)


def _synthetic(xn, xim, stride=1):
    return poincare.OneDMapData(
        xn=np.asarray(xn, float), xim=np.asarray(xim, float), stride=stride,
        folding="abs_fold", section=SectionSpec(), params=P, truncated=False)


def test_portrait_carries_both_crossing_families():
    pt = poincare.section_portrait(P, n_events=600)
    assert set(np.unique(pt.directions)) == {-1, 1}
    assert np.max(np.abs(pt.states[:, 2] - 1.0)) < 1e-10
    assert_allclose(pt.coords, pt.states[:, :2], rtol=0, atol=0)
    assert not pt.truncated


def test_portrait_truncates_on_short_horizon():
    pt = poincare.section_portrait(P, n_events=5000, t_max=50.0,
                                   transient_crossings=5)
    assert pt.truncated
    assert 0 < len(pt.directions) < 5000


def test_portrait_local_max_section():
    sec = SectionSpec(kind="z_local_max", direction="down")
    pt = poincare.section_portrait(P, section=sec, n_events=200)
    # coords are (x, z) for this section
    assert_allclose(pt.coords, pt.states[:, (0, 2)], rtol=0, atol=0)
    for s in pt.states[:20]:
        assert abs(dynsys.vector_field(P, s)[2]) < 1e-10


def test_one_d_map_projects_to_a_graph():
    d = poincare.one_d_map(P, n_pairs=2000)
    assert d.section.direction == "up"
    assert d.xn.size > 1800
    assert np.all(d.xn > 0) and np.all(d.xim >= 0)
    assert poincare.fiber_spread(d) < 0.05
    # the residual spread is a slope artifact: it shrinks under bin
    # refinement, which a genuinely 2D cloud would not do
    assert poincare.fiber_spread(d, 160) < 0.6 * poincare.fiber_spread(d, 20)


def test_downward_family_is_not_a_graph():
    sec = SectionSpec(kind="plane_z", value=1.0, direction="down")
    d = poincare.one_d_map(P, section=sec, n_pairs=1500)
    assert poincare.fiber_spread(d) > 0.5


def test_hook_discrimination():
    d_ref = poincare.one_d_map(P, n_pairs=2000)
    assert poincare.branch_turning_points(d_ref) == 1
    assert not poincare.hook_detected(d_ref)

    d_hook = poincare.one_d_map(dynsys.sm(0.4, 0.76), n_pairs=2000)
    assert poincare.branch_turning_points(d_hook) >= 2
    assert poincare.hook_detected(d_hook)


def test_lacuna_shows_as_second_component_in_stride_two():
    d_gap = poincare.one_d_map(dynsys.sm(0.4, 1.08), stride=2, n_pairs=1500)
    assert poincare.component_count(d_gap) >= 2
    d_full = poincare.one_d_map(dynsys.sm(0.4, 0.95), stride=2, n_pairs=1500)
    assert poincare.component_count(d_full) == 1


def test_stride_bookkeeping():
    d1 = poincare.one_d_map(P, side="both", folding="none", n_pairs=400)
    # consecutive pre-images overlap by one shift
    assert np.all(d1.xn[1:] == d1.xim[:-1])
    d2 = poincare.one_d_map(P, side="both", folding="none", n_pairs=400,
                            stride=2)
    assert np.all(d2.xn[2:] == d2.xim[:-2])


def test_folding_matches_raw_signs():
    raw = poincare.one_d_map(P, folding="none", n_pairs=500)
    folded = poincare.one_d_map(P, folding="abs_fold", n_pairs=500)
    assert np.all(raw.xn == folded.xn)
    assert np.all(np.abs(raw.xim) == folded.xim)
    # images genuinely change wing, otherwise the fold is vacuous
    assert np.any(raw.xim < 0) and np.any(raw.xim > 0)


def test_side_filter():
    neg = poincare.one_d_map(P, side="negative", n_pairs=300)
    assert np.all(neg.xn < 0)


def test_component_count_synthetic():
    left = np.linspace(0.1, 0.4, 40)
    right = np.linspace(0.6, 0.9, 40)
    d = _synthetic(np.concatenate([left, right]), np.zeros(80))
    assert poincare.component_count(d) == 2
    # affine rescaling does not change the count
    d2 = _synthetic(np.concatenate([left, right]) * 7.5 - 3.0, np.zeros(80))
    assert poincare.component_count(d2) == 2
    d3 = _synthetic(np.linspace(0.0, 1.0, 100), np.zeros(100))
    assert poincare.component_count(d3) == 1
    assert poincare.component_count(_synthetic([0.3], [0.1])) == 1
    assert poincare.component_count(_synthetic([], [])) == 0


def test_fiber_spread_synthetic():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.2, 1.0, 4000)
    # a clean graph with a steep slope: spread comes from binwidth only
    d_line = _synthetic(x, 2.0 * x)
    assert poincare.fiber_spread(d_line) < 0.05
    # an order-one-thick cloud keeps its extent however fine the bins
    d_cloud = _synthetic(x, rng.uniform(0.0, 1.0, 4000))
    assert poincare.fiber_spread(d_cloud) > 0.8
    assert poincare.fiber_spread(d_cloud, 320) > 0.8


def test_turning_points_synthetic():
    x = np.linspace(0.0, 1.0, 3000)
    d_mono = _synthetic(x, 1.0 - 0.9 * x)
    assert poincare.branch_turning_points(d_mono) == 0
    d_tent = _synthetic(x, 1.0 - 2.0 * np.abs(x - 0.5))
    assert poincare.branch_turning_points(d_tent) == 1
    assert not poincare.hook_detected(d_tent)
    wiggle = 1.0 - 2.0 * np.abs(x - 0.5) + 0.2 * np.sin(8 * np.pi * x)
    d_wiggle = _synthetic(x, wiggle)
    assert poincare.hook_detected(d_wiggle)


def test_one_d_map_validation():
    with pytest.raises(DomainError):
        poincare.one_d_map(P, stride=3)
    with pytest.raises(DomainError):
        poincare.one_d_map(P, folding="mirror")
    with pytest.raises(DomainError):
        poincare.one_d_map(P, side="upper")
    with pytest.raises(DomainError):
        poincare.section_portrait(P, n_events=0)
    with pytest.raises(DomainError):
        poincare.one_d_map(P, t_max=0.5)   # no crossings that early
    with pytest.raises(DomainError):
        poincare.fiber_spread(_synthetic([0.1], [0.1]))
    with pytest.raises(DomainError):
        poincare.branch_turning_points(_synthetic([0.1] * 12, [0.1] * 12))


def test_truncation_flag_on_short_run():
    d = poincare.one_d_map(P, n_pairs=10_000, t_max=400.0,
                           transient_crossings=10)
    assert d.truncated
    assert 0 < d.xn.size < 10_000
