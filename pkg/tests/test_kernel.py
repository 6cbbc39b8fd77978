import numpy as np
import pytest

from nlfv.errors import GhostZoneTooSmall, MismatchedSupport, NegativeWeight
from nlfv.kernel import center_values, convolve_interfaces, discretize, n_eta_for, weights_for_grid
from nlfv.model import KernelSpec
from oracles import linear_density, look_ahead, midpoint_zeta


def test_linear_weights_match_midpoint_oracle():
    eta, n = 0.0625, 10
    w = discretize(KernelSpec(eta=eta), eta / n, n)
    np.testing.assert_allclose(w.zeta, midpoint_zeta(linear_density(eta), eta, n), atol=1e-10)
    assert w.zeta[0] == pytest.approx(0.19, abs=1e-15)
    assert w.zeta[9] == pytest.approx(0.01, abs=1e-15)


@pytest.mark.parametrize("n", [1, 3, 7])
def test_constant_weights_uniform(n):
    w = discretize(KernelSpec("constant", 0.3), 0.3 / n, n)
    np.testing.assert_allclose(w.zeta, 1.0 / n, rtol=0, atol=1e-15)


@pytest.mark.parametrize("shape", ["linear_decreasing", "constant"])
def test_single_cell_weight_is_one(shape):
    assert discretize(KernelSpec(shape, 0.01), 0.01, 1).zeta.tolist() == [1.0]


def test_tabulated_matches_linear_closed_form():
    eta, n = 0.5, 5
    tab = KernelSpec("tabulated", eta, samples=(1.0, 0.0))
    w = discretize(tab, eta / n, n)
    ref = discretize(KernelSpec(eta=eta), eta / n, n)
    np.testing.assert_allclose(w.zeta, ref.zeta, atol=1e-15)


def test_negative_tabulated_weight():
    kernel = KernelSpec("tabulated", 0.4, samples=(-1.0, -1.0), pre_normalized=True)
    with pytest.raises(NegativeWeight):
        discretize(kernel, 0.1, 4)


def test_mismatched_support():
    with pytest.raises(MismatchedSupport):
        discretize(KernelSpec(eta=0.0625), 0.01, 6)
    with pytest.raises(MismatchedSupport):
        n_eta_for(0.0625, 0.025)
    assert n_eta_for(0.0625, 0.00078125) == 80


def test_weights_read_only():
    w = weights_for_grid(KernelSpec(eta=0.1), 0.01)
    with pytest.raises(ValueError):
        w.zeta[0] = 1.0


def _with_ghost(u, m):
    return np.concatenate([u, np.zeros(m)])


def test_constant_state_gives_constant_average():
    w = weights_for_grid(KernelSpec(eta=0.05), 0.01)
    c = convolve_interfaces(_with_ghost(np.full(40, 0.4), 5), w)
    np.testing.assert_allclose(c[:36], 0.4, atol=1e-15)
    assert np.all(convolve_interfaces(np.zeros(10), w) == 0)


def test_step_data_constant_kernel():
    w = weights_for_grid(KernelSpec("constant", 0.02), 0.01)
    m = 6
    u = _with_ghost(np.r_[np.ones(m), np.zeros(4)], 2)
    c = convolve_interfaces(u, w)
    # c[j] averages cells j, j+1; the interface just left of cell m-1
    assert c[m - 1] == 0.5
    assert c[m - 2] == 1.0


def test_ghost_zone_required():
    w = weights_for_grid(KernelSpec(eta=0.03), 0.01)
    with pytest.raises(GhostZoneTooSmall):
        convolve_interfaces(np.ones(10), w)
    with pytest.raises(GhostZoneTooSmall):
        convolve_interfaces(np.zeros(3), w)


def test_convolution_matches_direct_sum_and_kahan():
    rng = np.random.default_rng(3)
    w = weights_for_grid(KernelSpec(eta=0.07), 0.01)
    u = _with_ghost(rng.random(50), 7)
    c = convolve_interfaces(u, w)
    ref = [look_ahead(list(u), list(w.zeta), j) for j in range(len(c))]
    np.testing.assert_allclose(c, ref, rtol=0, atol=1e-15)
    np.testing.assert_allclose(convolve_interfaces(u, w, kahan=True), ref, rtol=0, atol=1e-15)


def test_lane_wise_2d():
    rng = np.random.default_rng(4)
    w = weights_for_grid(KernelSpec(eta=0.04), 0.01)
    u = np.hstack([rng.random((3, 20)), np.zeros((3, 4))])
    c = convolve_interfaces(u, w)
    for k in range(3):
        np.testing.assert_array_equal(c[k], convolve_interfaces(u[k], w))


def test_center_values():
    np.testing.assert_allclose(center_values(np.full(6, 0.3)), 0.3, atol=1e-16)
    assert center_values(np.array([0.2, 0.4]))[0] == pytest.approx(0.3, abs=1e-16)
    c = np.arange(6.0)
    np.testing.assert_array_equal(center_values(c, "paper-proof"), [1.5, 2.5, 3.5, 4.5])
    with pytest.raises(ValueError):
        center_values(c, "left")


def test_center_values_from_random_density():
    rng = np.random.default_rng(5)
    w = weights_for_grid(KernelSpec(eta=0.05), 0.01)
    u = list(rng.random(30)) + [0.0] * 5
    mid = center_values(convolve_interfaces(np.array(u), w))
    for i in range(len(mid)):
        ref = 0.5 * (look_ahead(u, w.zeta, i) + look_ahead(u, w.zeta, i + 1))
        assert mid[i] == pytest.approx(ref, abs=1e-15)
