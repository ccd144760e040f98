import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zenonm.errors import DegenerateDenominator
from zenonm.oracles import rk4_populations
from zenonm.rcsink import RCParams, rabi_frequency, rc_amplitudes, rc_distance_measure, rc_map, tripartite_density


def test_initial_condition():
    a = rc_amplitudes(0.0, RCParams(lambda_c=1.3))
    assert (a.xi2, a.eta2, a.chi2) == pytest.approx((1.0, 0.0, 0.0), abs=1e-15)


def test_lossless_transfer_at_quarter_period():
    a = rc_amplitudes(math.pi / 2, RCParams(lambda_c=0.0))
    assert (a.xi2, a.eta2, a.chi2) == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)


def test_matches_time_stepping_oracle():
    p = RCParams(lambda_c=0.5)
    a = rc_amplitudes(1.0, p)
    ref = rk4_populations([1.0], p)[0]
    assert np.max(np.abs(np.array([a.xi2, a.eta2, a.chi2]) - ref)) < 1e-6


def test_overdamped_stays_real():
    p = RCParams(lambda_c=6.0)
    assert abs(rabi_frequency(p).real) < 1e-15
    a = rc_amplitudes(2.0, p)
    ref = rk4_populations([2.0], p)[0]
    assert np.max(np.abs(np.array([a.xi2, a.eta2, a.chi2]) - ref)) < 1e-6


def test_tripartite_at_origin():
    m = tripartite_density(0.0, RCParams()).matrix
    assert np.allclose(m, np.diag([0.5, 0, 0, 0, 0.5, 0, 0, 0]), atol=1e-15)


def test_tripartite_psd_example():
    rho = tripartite_density(2.0, RCParams(lambda_c=0.5))
    assert rho.eigenvalues().min() >= -1e-10
    assert rho.trace == pytest.approx(1.0, abs=1e-12)


def test_distance_measure_zero_at_origin():
    assert rc_distance_measure(0.0, 0.1, RCParams(lambda_c=1.0)) == 0.0


def test_distance_measure_lossless_period():
    p = RCParams(lambda_c=0.0)
    t = np.linspace(0.0, 3.0, 13)
    a = [rc_distance_measure(x, 0.2, p) for x in t]
    b = [rc_distance_measure(x + math.pi, 0.2, p) for x in t]
    assert np.allclose(a, b, atol=1e-10)


def test_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        rc_distance_measure(1.0, 1e-14, RCParams(lambda_c=1.0))


def test_distance_grows_with_damping_at_fixed_point():
    # expected trend: larger lambda_c enhances backflow at (t, tau) = (1, 0.1)
    d_low = rc_distance_measure(1.0, 0.1, RCParams(lambda_c=0.5))
    d_high = rc_distance_measure(1.0, 0.1, RCParams(lambda_c=2.0))
    assert d_high > d_low


def test_lossless_column_finite():
    h = rc_map(np.linspace(0, 10, 20), [0.0], 0.1)
    assert not h.errors and np.all(np.isfinite(h.cells))


def test_positive_count_nondecreasing_coarse():
    h = rc_map(np.linspace(0, 10, 20), np.linspace(0, 3, 20), 0.1)
    counts = h.metadata["positive_counts"]
    assert all(b >= a for a, b in zip(counts, counts[1:])), counts


def test_small_offset_has_larger_positive_region():
    t, lam = np.linspace(0, 10, 20), np.linspace(0, 3, 20)
    small = sum(rc_map(t, lam, 0.05).metadata["positive_counts"])
    large = sum(rc_map(t, lam, 0.5).metadata["positive_counts"])
    assert small > large


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.0, 3.9), st.floats(0.0, 20.0))
def test_populations_sum_to_one(v, lam, t):
    a = rc_amplitudes(t, RCParams(coupling=v, lambda_c=lam))
    assert abs(a.xi2 + a.eta2 + a.chi2 - 1.0) <= 1e-10
    assert min(a.xi2, a.eta2, a.chi2) >= 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 20.0))
def test_lossless_has_no_sink_population(t):
    assert rc_amplitudes(t, RCParams(lambda_c=0.0)).chi2 <= 1e-12
