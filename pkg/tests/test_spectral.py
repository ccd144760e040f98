import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zenonm import quadrature
from zenonm.errors import ToleranceNotMet
from zenonm.spectral import (
    QuadratureOptions,
    SpectralParams,
    ZenoKind,
    classify_zeno,
    cutoff_frequency,
    decay_ratio,
    effective_decay_rate,
    jump_time,
    modulating_function,
    natural_decay_rate,
    spectral_density,
    tail_bound,
    zeno_phase_map,
)
from reference import trapezoid_decay_rate

P25 = SpectralParams(alpha=0.25)


def test_gauss_kronrod_polynomial_exact():
    res = quadrature.integrate(lambda x: x**9 - 3 * x**2, [0.0, 2.0], abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=10)
    assert res.value == pytest.approx(2**10 / 10 - 8, rel=1e-14)


def test_quadrature_peaked_integrand():
    res = quadrature.integrate(
        lambda x: 1e-3 / (x * x + 1e-6), [-1.0, 1.0], abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=500
    )
    assert res.value == pytest.approx(2 * math.atan(1e3), rel=1e-11)


def test_quadrature_budget_exhausted():
    with pytest.raises(ToleranceNotMet):
        quadrature.integrate(np.sign, [-1.0, 0.3], abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=3)


def test_spectral_density_examples():
    assert spectral_density(0.0, P25) == 0.0
    assert spectral_density(1.0, P25) == pytest.approx(0.02 / 1.0625, rel=1e-15)
    assert natural_decay_rate(SpectralParams(alpha=1.0)) == pytest.approx(0.01, rel=1e-15)


def test_modulating_function_examples():
    tau = 0.7
    assert modulating_function(1.0, tau, P25) == pytest.approx(tau / (2 * math.pi), rel=1e-15)
    assert modulating_function(1.0 + 2 * math.pi / tau, tau, P25) == pytest.approx(0.0, abs=1e-20)


def test_modulating_function_normalized():
    # trapezoid over a wide window plus the analytic 1/x^2 tail estimate
    tau = 2.0
    w = np.linspace(1.0 - 4000.0, 1.0 + 4000.0, 4_000_001)
    y = modulating_function(w, tau, P25)
    total = float(np.sum((y[1:] + y[:-1]) * np.diff(w)) / 2)
    # sin^2 averages 1/2, so each side contributes 1 / (pi tau X)
    tail = 2.0 / (math.pi * tau * 4000.0)
    assert abs(total + tail - 1.0) < 1e-6


def test_short_interval_limit():
    assert effective_decay_rate(1e-4, P25) < 1e-3 * natural_decay_rate(P25)


def test_long_interval_limit():
    assert abs(decay_ratio(200.0, P25) - 1.0) < 0.05


def test_matches_trapezoid_oracle_at_unit_interval():
    p = SpectralParams(alpha=0.1)
    ref = trapezoid_decay_rate(1.0, 0.1)
    assert effective_decay_rate(1.0, p) == pytest.approx(ref, rel=1e-6)


def test_classification_examples():
    for alpha in (0.05, 0.1, 0.25, 0.5, 1.0):
        assert classify_zeno(0.1, SpectralParams(alpha=alpha)).kind is ZenoKind.ZENO
    assert classify_zeno(3.0, SpectralParams(alpha=0.1)).kind is ZenoKind.ANTI_ZENO
    assert classify_zeno(3.0, SpectralParams(alpha=0.5)).kind is ZenoKind.ZENO


def test_classification_boundary_band():
    c = classify_zeno(3.0, SpectralParams(alpha=0.1), band=1.0)
    assert c.kind is ZenoKind.BOUNDARY and c.sign == 0


def test_jump_time_brackets_crossing():
    p = SpectralParams(alpha=0.1)
    tj = jump_time(p, 1.0, 3.0, xtol=1e-6)
    assert decay_ratio(tj - 1e-4, p) < 1.0 < decay_ratio(tj + 1e-4, p)


def test_tail_bound_certifies_cutoff():
    q = QuadratureOptions()
    for tau in (0.02, 1.0, 5.0):
        cut = cutoff_frequency(tau, P25, q)
        assert tail_bound(tau, cut, P25) <= q.tail_tol * natural_decay_rate(P25) * (1 + 1e-12)


def test_phase_map_short_column_all_zeno():
    alphas = np.geomspace(0.05, 1.0, 8)
    m = zeno_phase_map([0.05, 3.0], alphas, P25)
    assert np.all(m.cells[:, 0] == -1)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        SpectralParams(alpha=0.0)
    with pytest.raises(ValueError):
        effective_decay_rate(0.0, P25)


@settings(max_examples=20, deadline=None)
@given(
    st.floats(0.02, 5.0),
    st.floats(0.05, 1.0),
    st.floats(1e-3, 1e3),
)
def test_coupling_invariance_and_positivity(tau, alpha, c):
    p = SpectralParams(alpha=alpha)
    scaled = SpectralParams(alpha=alpha, coupling=0.01 * c)
    r1 = effective_decay_rate(tau, p) / natural_decay_rate(p)
    r2 = effective_decay_rate(tau, scaled) / natural_decay_rate(scaled)
    assert effective_decay_rate(tau, p) >= 0
    assert abs(r1 - r2) <= 1e-12 * abs(r1)
