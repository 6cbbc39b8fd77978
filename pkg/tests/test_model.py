import numpy as np
import pytest

from nlfv.model import (KernelSpec, LaneModel, SystemSpec, exchange_rates, source_exchange,
                        source_terms, two_lane_system, validate_system)
from oracles import exchange


def test_builtin_two_lane_model_is_valid():
    assert validate_system(two_lane_system()) == []


def test_constant_g_violates_a1():
    spec = SystemSpec((LaneModel.linear(1.0),), KernelSpec())
    kinds = {v.assumption for v in validate_system(spec)}
    assert "A1" in kinds


def test_increasing_tabulated_kernel_violates_a4():
    kernel = KernelSpec("tabulated", 0.1, samples=(2.0, 1.0, 1.5, 0.0))
    spec = SystemSpec((LaneModel.lwr(1.0),), kernel)
    assert any(v.assumption == "A4" for v in validate_system(spec))


def test_lip_f_and_nu_sup_derived_by_sampling():
    lane = LaneModel(v_scale=2.0, g=lambda u: (1 - u) ** 2)
    assert lane.lip_f == pytest.approx(1.0, abs=1e-6)  # |f'| = |(1-u)(1-3u)| peaks at u=0
    assert lane.nu_sup == pytest.approx(2.0)


def test_g_derivative_fallback_is_central_difference():
    lane = LaneModel(v_scale=1.0, g=lambda u: 1 - u**2)
    u = np.linspace(0, 1, 7)
    np.testing.assert_allclose(lane.g_derivative(u), -2 * u, atol=1e-8)


def test_source_lipschitz_default():
    assert two_lane_system().source_lipschitz == pytest.approx(5.0)
    assert SystemSpec((LaneModel.lwr(1.5),)).source_lipschitz == 0.0


@pytest.mark.parametrize("k", [0, 2, -1, 5])
def test_no_exchange_across_road_edges(k):
    spec = two_lane_system()
    assert source_exchange(spec, k, 0.3, 0.4, 0.9, 0.1, 0.7) == 0.0


def test_identical_lanes_equal_state_no_exchange():
    spec = two_lane_system(v_scales=(2.0, 2.0))
    assert source_exchange(spec, 1, 0.0, 0.3, 0.3, 0.6, 0.6) == 0.0


def test_hand_value_s1():
    spec = two_lane_system()
    s = source_exchange(spec, 1, 1.7, 0.5, 0.2, 0.5, 0.2)
    assert s == pytest.approx(0.6125, abs=1e-15)
    assert s == pytest.approx(exchange(0.5, 0.2, 0.5, 0.2, 1.5, 2.5), abs=1e-15)


def test_reverse_flow_takes_from_upper_lane():
    spec = two_lane_system(v_scales=(2.5, 1.5))
    s = source_exchange(spec, 1, 0.0, 0.2, 0.5, 0.2, 0.5)
    assert s < 0
    assert s == pytest.approx(exchange(0.2, 0.5, 0.2, 0.5, 2.5, 1.5))


def test_source_terms_shape_and_telescoping():
    rng = np.random.default_rng(1)
    spec = SystemSpec(tuple(LaneModel.lwr(v) for v in (1.0, 2.0, 1.5)))
    u, c = rng.random((3, 20)), rng.random((3, 20))
    s = exchange_rates(spec, 0.0, u, c)
    assert s.shape == (4, 20)
    assert np.all(s[0] == 0) and np.all(s[-1] == 0)
    r = source_terms(spec, 0.0, u, c)
    assert np.max(np.abs(r.sum(axis=0))) <= 1e-15 * max(1.0, np.abs(s).max())


def test_exchange_switch():
    spec = SystemSpec(two_lane_system().lanes, exchange=False)
    assert not spec.has_source
    assert spec.source_lipschitz == 0.0
