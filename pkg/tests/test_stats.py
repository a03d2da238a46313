import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwtrees.offspring import make_offspring
from gwtrees.stats import (
    all_pairs_distances,
    level_profile,
    monte_carlo_mean,
    pair_profile,
    pair_profile_bruteforce,
    root_pair_counts,
    unconditioned_root_pair_means,
)
from gwtrees.trees import TreeTruncated, cycle_rotate, fringe_subtree, from_lukasiewicz, sample_conditioned

CHERRY = from_lukasiewicz((2, 0, 0))
PATH3 = from_lukasiewicz((1, 1, 0))
STAR4 = from_lukasiewicz((4, 0, 0, 0, 0))


@st.composite
def trees(draw, max_n=60):
    n = draw(st.integers(1, max_n))
    parts = draw(st.lists(st.integers(0, n - 1), min_size=n - 1, max_size=n - 1))
    deg = np.diff(np.concatenate([[0], sorted(parts), [n - 1]])).astype(np.int64)
    return from_lukasiewicz(cycle_rotate(deg))


def test_level_profiles():
    assert level_profile(PATH3).tolist() == [1, 1, 1]
    assert level_profile(CHERRY).tolist() == [1, 2]
    assert level_profile(from_lukasiewicz([0])).tolist() == [1]


def test_cherry_pair_profile():
    pp = pair_profile(CHERRY)
    assert pp.p[1:].tolist() == [2, 1]
    assert pp.y[1, 1] == 2 and pp.y[0, 1] == 2 and pp.y[1, 0] == 2
    assert pp.y[0, 0] == 3


def test_path_pair_profile():
    pp = pair_profile(PATH3)
    assert pp.p[1:].tolist() == [2, 1]
    assert pp.y[1, 1] == 0
    assert pp.y[0, 2] == 1 and pp.y[2, 0] == 1


def test_star_bruteforce():
    assert pair_profile_bruteforce(STAR4).p[1:3].tolist() == [4, 6]
    assert not pair_profile_bruteforce(STAR4).p[3:].any()


def test_root_pair_examples():
    rp = root_pair_counts(PATH3)
    assert rp.q[1] == 1 and rp.q[2] == 1 and rp.qp[2] == 0
    rc = root_pair_counts(CHERRY)
    assert rc.q[1] == 2 and rc.q[2] == 1 and rc.qp[2] == 1


def test_bruteforce_size_guard():
    big = from_lukasiewicz([1] * 2000 + [0])
    with pytest.raises(ValueError):
        pair_profile_bruteforce(big)


@given(trees())
@settings(max_examples=150, deadline=None)
def test_pair_profile_invariants(t):
    n = t.n
    pp = pair_profile(t, n, n)
    if n > 1:
        assert pp.p[1] == n - 1
    assert pp.p.sum() == n * (n - 1) // 2
    assert pp.y[0, 0] == n
    assert np.array_equal(pp.y, pp.y.T)
    ell, m = np.indices(pp.y.shape)
    by_sum = np.bincount((ell + m).ravel(), weights=pp.y.ravel(), minlength=2 * n + 1)
    assert np.array_equal(2 * pp.p[1:], by_sum[1:n])
    assert pp == pair_profile_bruteforce(t, n, n)


@given(trees(max_n=30))
@settings(max_examples=60, deadline=None)
def test_pair_distances_agree_with_breadth_first_search(t):
    D = all_pairs_distances(t)
    iu = np.triu_indices(t.n, 1)
    p = np.bincount(D[iu], minlength=t.n)[: t.n]
    p[0] = 0
    assert np.array_equal(p, pair_profile(t, 0, 0).p)


@given(trees(), st.integers(0, 5), st.integers(0, 5))
@settings(max_examples=60, deadline=None)
def test_capped_y_is_a_corner_of_the_full_y(t, lcap, mcap):
    full = pair_profile(t, t.n, t.n).y
    capped = pair_profile(t, lcap, mcap).y
    a, b = min(lcap + 1, full.shape[0]), min(mcap + 1, full.shape[1])
    assert np.array_equal(capped[:a, :b], full[:a, :b])
    assert not capped[a:, :].any() and not capped[:, b:].any()


@given(trees())
@settings(max_examples=100, deadline=None)
def test_root_pair_identities(t):
    rp = root_pair_counts(t)
    z = level_profile(t)
    zk = np.zeros(len(rp.q), dtype=np.int64)
    zk[1 : min(len(z), len(rp.q))] = z[1 : len(rp.q)]
    assert np.array_equal(rp.q[1:], rp.qp[1:] + zk[1:])
    # every pair is counted once, at its last common ancestor
    total = np.zeros(t.n, dtype=np.int64)
    for v in range(t.n):
        q = root_pair_counts(fringe_subtree(t, v)).q
        total[: len(q)] += q
    assert np.array_equal(total[1:], pair_profile(t, 0, 0).p[1:])


def test_brute_force_on_sampled_trees():
    rng = np.random.default_rng(0)
    for spec in ("geometric", "poisson", "binary", "d-ary:3"):
        d = make_offspring(spec)
        for n in (10, 52, 202):
            n += -(n - 1) % d.span
            t = sample_conditioned(d, n, rng)
            assert pair_profile(t) == pair_profile_bruteforce(t)


def test_monte_carlo_root_level_is_exact():
    tab = monte_carlo_mean("Z", make_offspring("poisson"), 30, reps=50, seed=1)
    assert tab.mean[0] == 1.0 and tab.stderr[0] == 0.0
    assert tab.reps == 50
    assert tab.rows()[0] == (0, 1.0, 0.0, 50)


def test_monte_carlo_p2_of_size_three():
    tab = monte_carlo_mean("P", make_offspring("geometric"), 3, reps=200, seed=0)
    # both size-three trees have exactly one pair at distance 2
    assert tab.at(2) == (1.0, 0.0)
    assert tab.at(1) == (2.0, 0.0)
    assert tab.at(10) == (0.0, 0.0)


def test_monte_carlo_is_seed_reproducible():
    d = make_offspring("geometric")
    a = monte_carlo_mean("Q", d, 25, reps=40, seed=3)
    b = monte_carlo_mean("Q", d, 25, reps=40, seed=3)
    assert np.array_equal(a.mean, b.mean)


def test_monte_carlo_errors():
    d = make_offspring("geometric")
    with pytest.raises(ValueError):
        monte_carlo_mean("Z", d, 5, reps=1)
    with pytest.raises(ValueError):
        monte_carlo_mean("nope", d, 5, reps=5)


def test_generation_sampler_agrees_with_full_trees():
    """The vectorized generation-size estimator and whole sampled trees estimate
    the same unconditioned means."""
    d = make_offspring("geometric")
    kmax = 4
    zt, qt = unconditioned_root_pair_means(d, kmax, 200_000, seed=5)
    full = monte_carlo_mean(
        lambda t: root_pair_counts(t).q[: kmax + 1], d, None, reps=40_000, seed=6, size_cap=10**5, on_truncated="skip"
    )
    for k in range(1, kmax + 1):
        a, sa = qt.at(k)
        b, sb = full.at(k)
        assert abs(a - b) < 4 * math.hypot(sa, sb)
    assert zt.at(0) == (1.0, 0.0)
    assert 39_000 < full.reps < 40_000


def test_truncation_raises_by_default():
    with pytest.raises(TreeTruncated):
        monte_carlo_mean("Z", make_offspring("geometric"), None, reps=2000, seed=0, size_cap=5)


@pytest.mark.parametrize("spec", ["geometric", "poisson", "binary"])
def test_unconditioned_level_means_are_one(spec):
    """A critical process has E Z_k = 1 in every generation."""
    zt, _ = unconditioned_root_pair_means(make_offspring(spec), 6, 100_000, seed=2)
    for k in range(7):
        m, se = zt.at(k)
        assert abs(m - 1) <= max(4 * se, 1e-12)
