import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from gwtrees.offspring import BUILTIN_SPECS, Kind, make_offspring


@pytest.fixture(params=BUILTIN_SPECS)
def dist(request):
    return make_offspring(request.param)


def test_geometric_constants():
    g = make_offspring("geometric")
    assert g.kind is Kind.GEOMETRIC_HALF
    assert g.variance == pytest.approx(2.0, abs=1e-12)
    assert g.span == 1


def test_binary_constants():
    b = make_offspring("binary")
    assert b.variance == pytest.approx(1.0)
    assert b.span == 2


def test_dary_span_and_variance():
    d = make_offspring("d-ary:3")
    assert d.span == 3
    assert d.variance == pytest.approx(2.0)  # d - 1


def test_poisson_probs_are_poisson():
    p = make_offspring("poisson").probs(20)
    assert np.allclose(p, sps.poisson.pmf(np.arange(21), 1.0), rtol=1e-13, atol=0)


@pytest.mark.parametrize(
    "spec",
    ["custom:0.5,0.5", "custom:0.2,0.2,0.6", "custom:-0.1,1.2", "custom:0,1", "banana", "d-ary:1", "d-ary:x", "custom:"],
)
def test_rejected_specs(spec):
    with pytest.raises(ValueError):
        make_offspring(spec)


def test_custom_is_normalized():
    d = make_offspring("custom:1,2,1")
    assert d.probs(2) == pytest.approx([0.25, 0.5, 0.25])
    assert d.variance == pytest.approx(0.5)


def test_pgf_known_values(dist):
    assert dist.pgf(1.0) == pytest.approx(1.0, abs=1e-12)
    assert dist.pgf(1.0, 1) == pytest.approx(1.0, abs=1e-12)
    assert dist.pgf(0.0) == pytest.approx(dist.probs(0)[0])


def test_second_derivative_at_one_is_variance(dist):
    assert dist.pgf(1.0, 2).real == pytest.approx(dist.variance, abs=1e-9)


def test_geometric_pgf_closed_form():
    g = make_offspring("geometric")
    assert g.pgf(0.0) == pytest.approx(0.5)
    assert g.pgf(1.0, 2) == pytest.approx(2.0)
    w = 0.3 - 0.4j
    assert g.pgf(w) == pytest.approx(1 / (2 - w))


def test_pgf_outside_disc_rejected(dist):
    with pytest.raises(ValueError):
        dist.pgf(1.01)
    with pytest.raises(ValueError):
        dist.pgf(0.5, order=3)


def test_span_divides_support(dist):
    p = dist.probs(40)
    support = np.flatnonzero(p > 0)
    assert np.all(support % dist.span == 0)


@given(w=st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_pgf_matches_power_series(w):
    for spec in ("geometric", "poisson"):
        d = make_offspring(spec)
        p = d.probs(200)
        for order in (0, 1, 2):
            c = np.polynomial.polynomial.polyder(p, order) if order else p
            assert d.pgf(w, order) == pytest.approx(np.polynomial.polynomial.polyval(w, c), rel=1e-9, abs=1e-9)


def test_sampler_mean_and_variance(dist):
    x = dist.sample(np.random.default_rng(3), 200_000)
    se = math.sqrt(dist.variance / len(x))
    assert abs(x.mean() - 1) < 5 * se
    assert np.all(x % dist.span == 0)


def test_sample_sums_match_convolution():
    d = make_offspring("custom:0.3,0.45,0.2,0.05")
    counts = np.full(50_000, 3)
    s = d.sample_sums(np.random.default_rng(0), counts)
    p3 = np.convolve(np.convolve(d.probs(3), d.probs(3)), d.probs(3))
    obs = np.bincount(s, minlength=len(p3))
    assert sps.chisquare(obs, p3 * len(s)).pvalue > 1e-3


@pytest.mark.parametrize("spec", ["geometric", "poisson", "binary", "d-ary:3"])
def test_conditional_sum_sampler_against_rejection(spec):
    """The direct conditional draw and rejection on the sum give the same law of xi_1."""
    d = make_offspring(spec)
    n, total = 7, 6
    rng = np.random.default_rng(11)
    direct = np.array([d.sample_given_sum(rng, n, total) for _ in range(20_000)])
    assert np.all(direct.sum(axis=1) == total)
    block = d.sample(rng, (400_000, n))
    kept = block[block.sum(axis=1) == total]
    a = np.bincount(direct[:, 0], minlength=total + 1)
    b = np.bincount(kept[:, 0], minlength=total + 1)
    live = (a + b) > 0
    table = np.vstack([a[live], b[live]])
    if table.shape[1] > 1:
        assert sps.chi2_contingency(table).pvalue > 1e-3


def test_custom_has_no_direct_conditional_sampler():
    d = make_offspring("custom:0.25,0.5,0.25")
    assert d.sample_given_sum(np.random.default_rng(0), 5, 4) is None


def test_hashable_and_immutable():
    a, b = make_offspring("geometric"), make_offspring("geometric")
    assert a == b and hash(a) == hash(b)
    with pytest.raises(Exception):
        a.d = 5
