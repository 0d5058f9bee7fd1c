import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
import scipy.stats
from scipy import integrate

from kicked_chaos.errors import ContractViolation
from kicked_chaos.heff import variance_prediction
from kicked_chaos.reference import (
    CurveKind,
    ReferenceCurve,
    coefficient_gaussian,
    cue_exponential,
    histogram,
    ks_distance,
    log_porter_thomas,
    porter_thomas,
    ratio_constants,
    wigner_surmise,
)

CURVES = [
    ReferenceCurve.wigner(),
    ReferenceCurve.porter_thomas(),
    ReferenceCurve.log_porter_thomas(),
    ReferenceCurve.exponential_cue(),
    ReferenceCurve.gaussian(variance_prediction(4096)),
    ReferenceCurve.gaussian(0.7),
    ReferenceCurve.phase_uniform(),
]


def moment(f, k, lo, hi):
    return integrate.quad(lambda x: x**k * f(x), lo, hi, epsabs=1e-12, limit=200)[0]


@pytest.mark.parametrize("curve", CURVES, ids=lambda c: c.kind.value)
def test_normalized(curve):
    assert curve.cdf_quad(np.inf if curve.support[1] == np.inf else curve.support[1]) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("curve", CURVES, ids=lambda c: c.kind.value)
def test_closed_form_cdf_matches_quadrature(curve):
    lo, hi = curve.support
    sd = np.sqrt(curve.variance) if curve.variance else 1.0
    if curve.kind is CurveKind.LOG_PORTER_THOMAS:
        xs = [-8.0, -2.0, 0.0, 1.5]
    elif curve.kind is CurveKind.PHASE_UNIFORM:
        xs = [-3.0, -1.0, 0.5, 3.1]
    elif curve.kind is CurveKind.COEFFICIENT_GAUSSIAN:
        xs = [-2 * sd, -0.3 * sd, 0.0, 1.7 * sd]
    else:
        xs = [0.01, 0.5, 1.0, 3.0]
    for x in xs:
        assert float(curve.cdf(x)) == pytest.approx(curve.cdf_quad(x), abs=1e-9)


def test_wigner_examples():
    assert wigner_surmise(0.0) == 0.0
    assert moment(wigner_surmise, 1, 0, np.inf) == pytest.approx(1.0, abs=1e-10)
    assert wigner_surmise(1.0) == pytest.approx(np.pi / 2 * np.exp(-np.pi / 4), rel=1e-15)
    assert wigner_surmise(1.0) == pytest.approx(0.71619, abs=1e-5)
    with pytest.raises(ContractViolation):
        wigner_surmise(-0.1)


def test_porter_thomas_moments():
    m1 = moment(porter_thomas, 1, 0, np.inf)
    m2 = moment(porter_thomas, 2, 0, np.inf)
    assert m1 == pytest.approx(1.0, abs=1e-9)
    assert m2 - m1**2 == pytest.approx(2.0, abs=1e-8)
    with pytest.raises(ContractViolation):
        porter_thomas(0.0)


def test_exponential_moments():
    m1 = moment(cue_exponential, 1, 0, np.inf)
    m2 = moment(cue_exponential, 2, 0, np.inf)
    assert (m1, m2 - m1**2) == pytest.approx((1.0, 1.0), abs=1e-10)


@pytest.mark.parametrize("eta", [0.1, 1.0, 5.0])
def test_log_form_jacobian(eta):
    assert log_porter_thomas(np.log(eta)) == pytest.approx(eta * porter_thomas(eta), rel=1e-14)


def test_gaussian_examples():
    var = variance_prediction(4096)
    assert coefficient_gaussian(0.0, var) == pytest.approx(1 / np.sqrt(2 * np.pi * var))
    assert coefficient_gaussian(0.0, var) == pytest.approx(637.04, abs=0.01)
    with pytest.raises(ContractViolation):
        coefficient_gaussian(0.0, 0.0)


def test_ratio_constants():
    mean_r, mean_rt = ratio_constants()
    assert mean_r == 1.75
    assert mean_rt == pytest.approx(0.535898, abs=1e-6)
    assert mean_rt < 1


def test_histogram_density():
    data = np.random.default_rng(0).normal(size=1000)
    h = histogram(data, np.linspace(-5, 5, 41))
    assert len(h.counts) == len(h.edges) - 1
    assert np.sum(h.density * h.widths) == pytest.approx(1.0, abs=1e-12)
    assert np.all(h.density >= 0)
    with pytest.raises(ContractViolation):
        histogram(data, [0, 1, 1])


def test_bin_integration_handles_singularity():
    edges = np.linspace(0, 10, 51)
    p = ReferenceCurve.porter_thomas().bin_probabilities(edges)
    assert np.isfinite(p).all()
    assert p[0] == pytest.approx(integrate.quad(porter_thomas, 0, 0.2)[0], abs=1e-10)


def test_ks_uniform_samples():
    x = np.random.default_rng(1).uniform(-np.pi, np.pi, 10**5)
    assert ks_distance(x, ReferenceCurve.phase_uniform()) < 0.01


def test_ks_quantiles():
    n = 200
    curve = ReferenceCurve.wigner()
    q = np.sqrt(-4 / np.pi * np.log(1 - np.arange(1, n + 1) / (n + 1)))
    assert ks_distance(q, curve) <= 1 / n
    mid = np.sqrt(-4 / np.pi * np.log(1 - (np.arange(n) + 0.5) / n))
    assert ks_distance(mid, curve) == pytest.approx(1 / (2 * n), abs=1e-12)


def test_ks_porter_thomas_sampler():
    eta = np.random.default_rng(2).chisquare(1, 10**5)
    assert ks_distance(eta, ReferenceCurve.porter_thomas()) < 0.01


def test_ks_agrees_with_scipy():
    x = np.random.default_rng(3).exponential(size=500)
    ours = ks_distance(x, ReferenceCurve.exponential_cue())
    assert ours == pytest.approx(scipy.stats.kstest(x, "expon").statistic, abs=1e-12)


def test_ks_quadrature_route():
    x = np.random.default_rng(4).rayleigh(np.sqrt(2 / np.pi), 300)
    curve = ReferenceCurve.wigner()
    assert ks_distance(x, curve, quadrature=True) == pytest.approx(ks_distance(x, curve), abs=1e-9)


def test_ks_empty():
    with pytest.raises(ContractViolation):
        ks_distance([], ReferenceCurve.wigner())



@given(eta=st.floats(1e-8, 60.0))
def test_property_jacobian(eta):
    assert log_porter_thomas(np.log(eta)) == pytest.approx(eta * porter_thomas(eta), rel=1e-12, abs=1e-300)


@given(lo=st.floats(0, 5), width=st.floats(0.01, 5))
def test_property_bins_match_quadrature(lo, width):
    curve = ReferenceCurve.porter_thomas()
    p = curve.bin_probabilities([lo, lo + width])[0]
    assert p == pytest.approx(curve.cdf_quad(lo + width) - curve.cdf_quad(lo), abs=1e-9)


@settings(max_examples=50)
@given(data=st.lists(st.floats(0, 20, allow_nan=False), min_size=1, max_size=60))
def test_property_ks_bounds(data):
    d = ks_distance(data, ReferenceCurve.exponential_cue())
    assert 1 / (2 * len(data)) - 1e-12 <= d <= 1


@given(data=st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=200))
def test_property_histogram_normalized(data):
    h = histogram(data, np.linspace(-10, 10, 17))
    assert h.counts.sum() == len(data)
    assert np.sum(h.density * h.widths) == pytest.approx(1.0, abs=1e-12)
