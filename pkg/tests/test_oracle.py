from math import comb

import numpy as np
import pytest

from gwtrees.offspring import BUILTIN_SPECS, make_offspring
from gwtrees.oracle import (
    MAX_ENUM_N,
    enumerate_trees,
    exact_conditioned_expectation,
    lukasiewicz_words,
    weighted_trees,
)
from gwtrees.series import engine, exact_mean_P, exact_mean_Q, exact_mean_Y, exact_mean_Z
from gwtrees.stats import level_profile

GEOM = make_offspring("geometric")


def catalan(m):
    return comb(2 * m, m) // (m + 1)


@pytest.mark.parametrize("n", range(1, MAX_ENUM_N + 1))
def test_tree_counts_are_catalan(n):
    keys = [t.key() for t in enumerate_trees(n)] if n <= 9 else list(lukasiewicz_words(n))
    assert len(keys) == catalan(n - 1)
    assert len(set(keys)) == len(keys)


def test_size_guard():
    with pytest.raises(ValueError):
        next(enumerate_trees(MAX_ENUM_N + 1))
    with pytest.raises(ValueError):
        next(enumerate_trees(0))


@pytest.mark.parametrize("spec", list(BUILTIN_SPECS) + ["custom:0.3,0.45,0.2,0.05"])
def test_total_weight_is_size_probability(spec):
    d = make_offspring(spec)
    F = engine(d, 9).F
    for n in range(1, 10):
        assert weighted_trees(d, n).total_weight == pytest.approx(F[n], abs=1e-12)


def test_geometric_size_three():
    assert exact_conditioned_expectation(GEOM, 3, "P")[2] == pytest.approx(1.0)
    assert exact_conditioned_expectation(GEOM, 3, "Z")[1] == pytest.approx(1.5)
    assert exact_conditioned_expectation(GEOM, 3, "Y", 2, 2)[1, 1] == pytest.approx(1.0)


def test_zero_weight_rejected():
    with pytest.raises(ValueError):
        exact_conditioned_expectation(make_offspring("binary"), 4, "Z")


def test_unknown_statistic():
    with pytest.raises(ValueError):
        exact_conditioned_expectation(GEOM, 4, "W")


def test_callable_statistic():
    height = exact_conditioned_expectation(GEOM, 4, lambda t: np.array([t.height]))
    # heights 1, 2, 2, 2, 3 over the five equally weighted trees
    assert height[0] == pytest.approx(2.0)
    z = exact_conditioned_expectation(GEOM, 6, level_profile)
    assert z.sum() == pytest.approx(6.0)


@pytest.mark.parametrize("spec", list(BUILTIN_SPECS) + ["custom:0.3,0.45,0.2,0.05"])
def test_series_matches_enumeration(spec):
    d = make_offspring(spec)
    for n in range(1, 10):
        if (n - 1) % d.span:
            continue
        z = exact_conditioned_expectation(d, n, "Z")
        p = exact_conditioned_expectation(d, n, "P")
        q = exact_conditioned_expectation(d, n, "Q")
        y = exact_conditioned_expectation(d, n, "Y", 8, 8)
        for k in range(n):
            zk = z[k] if k < len(z) else 0.0
            assert exact_mean_Z(d, n, k) == pytest.approx(zk, abs=1e-9)
            if k >= 1:
                pk = p[k] if k < len(p) else 0.0
                qk = q[k] if k < len(q) else 0.0
                assert exact_mean_P(d, n, k) == pytest.approx(pk, abs=1e-9)
                assert exact_mean_Q(d, n, k) == pytest.approx(qk, abs=1e-9)
        for ell in range(9):
            for m in range(9):
                assert exact_mean_Y(d, n, ell, m) == pytest.approx(y[ell, m], abs=1e-9)
