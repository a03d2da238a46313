import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwtrees.labels import (
    DisplacementDist,
    gamma,
    make_eta,
    normalized_profile,
    psi_estimate,
    psi_exact,
    psi_sample,
    psi_sweep,
    vertex_labels,
    vertical_profile,
)
from gwtrees.offspring import make_offspring
from gwtrees.oracle import exact_conditioned_expectation
from gwtrees.trees import from_lukasiewicz, sample_conditioned

GEOM = make_offspring("geometric")
POIS = make_offspring("poisson")


@pytest.mark.parametrize("spec", ["uniform_pm1", "uniform_3", "custom:-2=1,1=2", "custom:-1=1,0=2,1=1"])
def test_accepted_displacements(spec):
    eta = make_eta(spec)
    assert abs(eta.mean) < 1e-12 and eta.variance > 0
    assert math.isclose(sum(eta.weights), 1.0)


@pytest.mark.parametrize(
    "spec",
    ["custom:0=1,1=1", "custom:0=1", "custom:-2=1,2=1", "custom:1=-1,-1=2", "custom:garbage", "uniform_9"],
)
def test_rejected_displacements(spec):
    with pytest.raises(ValueError):
        make_eta(spec)


@pytest.mark.parametrize(
    "dist,eta,expected",
    [(GEOM, "uniform_3", 1.45648), (POIS, "uniform_pm1", 1.0), (GEOM, "uniform_pm1", 1.18921)],
)
def test_gamma_values(dist, eta, expected):
    assert gamma(dist, make_eta(eta)) == pytest.approx(expected, abs=5e-6)


def test_single_vertex_profile():
    p = vertical_profile(from_lukasiewicz([0]), make_eta("uniform_3"), np.random.default_rng(0))
    assert p.as_dict() == {0: 1}


def test_cherry_with_forced_steps():
    p = vertical_profile(from_lukasiewicz([2, 0, 0]), DisplacementDist.deterministic(1), np.random.default_rng(0))
    assert p.as_dict() == {0: 1, 1: 2}


def test_forced_steps_give_depths():
    t = sample_conditioned(GEOM, 80, np.random.default_rng(4))
    labels = vertex_labels(t, DisplacementDist.deterministic(1), np.random.default_rng(0))
    assert np.array_equal(labels, t.depth)


@given(st.integers(1, 300), st.integers(0, 2**32 - 1), st.sampled_from(["uniform_pm1", "uniform_3", "custom:-2=1,1=2"]))
@settings(max_examples=60, deadline=None)
def test_labels_are_parent_label_plus_step(n, seed, spec):
    rng = np.random.default_rng(seed)
    t = sample_conditioned(POIS, n, rng)
    eta = make_eta(spec)
    lab = vertex_labels(t, eta, rng)
    assert lab[0] == 0
    steps = lab[1:] - lab[t.parent[1:]]
    assert set(steps.tolist()) <= set(eta.support)
    prof = vertical_profile(t, eta, np.random.default_rng(seed))
    assert prof.counts.sum() == n and prof[0] >= 1


def test_normalized_profile_is_a_density():
    rng = np.random.default_rng(1)
    eta = make_eta("uniform_3")
    g = gamma(GEOM, eta)
    for n in (1, 50, 700):
        prof = vertical_profile(sample_conditioned(GEOM, n, rng), eta, rng)
        scale = n**0.25 / g
        lo, hi = (prof.offset - 1) / scale, (prof.offset + len(prof.counts)) / scale
        x = np.linspace(lo - 1, hi + 1, 200_001)
        y = normalized_profile(prof, g, x)
        assert np.all(y >= 0)
        # the grid must resolve the breakpoints at spacing 1/scale
        assert x[1] - x[0] < 0.01 / scale
        assert np.trapezoid(y, x) == pytest.approx(1.0, abs=1e-9)


def test_psi_at_zero_is_one():
    m, se = psi_estimate(GEOM, make_eta("uniform_3"), 40, 0.0, reps=20, seed=0)
    assert m == 1.0 and se == 0.0


def test_psi_sample_bounds():
    rng = np.random.default_rng(2)
    prof = vertical_profile(sample_conditioned(GEOM, 60, rng), make_eta("uniform_pm1"), rng)
    vals = psi_sample(prof, np.linspace(-math.pi, math.pi, 41))
    assert np.all(vals >= 0) and np.all(vals <= 1 + 1e-12)


def test_psi_sweep_reproducible_and_validated():
    eta = make_eta("uniform_3")
    a = psi_sweep(GEOM, eta, 30, [0.3, 1.0], reps=25, seed=9)
    b = psi_sweep(GEOM, eta, 30, [0.3, 1.0], reps=25, seed=9)
    assert np.array_equal(a[0], b[0])
    with pytest.raises(ValueError):
        psi_sweep(GEOM, eta, 30, [0.3], reps=1)


@pytest.mark.parametrize("spec", ["geometric", "poisson"])
@pytest.mark.parametrize("eta", ["uniform_pm1", "uniform_3"])
def test_psi_exact_matches_enumeration(spec, eta):
    """At small n the pair-split means from enumeration give the same
    expectation: E sum_{v,w} phi^l conj(phi)^m Y_{l,m}."""
    d, e = make_offspring(spec), make_eta(eta)
    n = 7
    y = exact_conditioned_expectation(d, n, "Y", lcap=n, mcap=n)
    for t in (0.0, 0.4, 1.3, math.pi):
        phi = complex(e.charfn(t))
        pw = phi ** np.arange(n + 1)
        brute = np.real(pw @ y @ np.conj(pw)) / n**2
        assert psi_exact(d, e, n, t)[0] == pytest.approx(brute, abs=1e-12)


def test_psi_exact_agrees_with_monte_carlo():
    eta = make_eta("uniform_3")
    ts = [0.2, 0.6, 1.5]
    mc, se = psi_sweep(GEOM, eta, 60, ts, reps=4000, seed=3)
    ex = psi_exact(GEOM, eta, 60, ts)
    assert np.all(np.abs(mc - ex) < 4 * se + 1e-12)
    assert psi_exact(GEOM, eta, 60, 0.0)[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.slow
def test_psi_baseline_geometric_uniform3():
    n, t = 400, 0.5
    m, se = psi_estimate(GEOM, make_eta("uniform_3"), n, t, reps=10_000, seed=0)
    assert (1 + n * t**4) * m <= 30
