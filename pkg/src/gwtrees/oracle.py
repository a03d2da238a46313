"""Exhaustive enumeration of small ordered trees: exact conditioned expectations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Union

import numpy as np

from .offspring import OffspringDist
from .stats import level_profile, pair_profile_bruteforce, root_pair_counts
from .trees import Tree, from_lukasiewicz

MAX_ENUM_N = 12


def lukasiewicz_words(n: int) -> Iterator[tuple[int, ...]]:
    """All valid depth-first outdegree sequences of length ``n``, lexicographically."""
    word = [0] * n

    def extend(i: int, open_slots: int) -> Iterator[tuple[int, ...]]:
        # open_slots: vertices promised but not yet placed, including position i
        remaining = n - i
        if remaining == 0:
            if open_slots == 0:
                yield tuple(word)
            return
        for d in range(0, remaining):
            after = open_slots - 1 + d
            if after > remaining - 1:
                break
            if after == 0 and remaining > 1:
                continue
            word[i] = d
            yield from extend(i + 1, after)

    yield from extend(0, 1)


def enumerate_trees(n: int) -> Iterator[Tree]:
    """Every ordered rooted tree on ``n`` vertices exactly once (``n <= 12``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_ENUM_N:
        raise ValueError(f"enumeration limited to n <= {MAX_ENUM_N}, got {n}")
    for w in lukasiewicz_words(n):
        yield from_lukasiewicz(w)


@dataclass(frozen=True)
class WeightedTreeSet:
    n: int
    items: list[tuple[Tree, float]]
    total_weight: float


def weighted_trees(dist: OffspringDist, n: int) -> WeightedTreeSet:
    """All trees of size ``n`` with their GW probabilities ``prod_v p_deg(v)``."""
    p = dist.probs(n)
    items = [(t, float(np.prod(p[t.degrees]))) for t in enumerate_trees(n)]
    return WeightedTreeSet(n, items, float(sum(w for _, w in items)))


Selector = Union[str, Callable[[Tree], np.ndarray]]


def _selector(stat: Selector, lcap: int, mcap: int) -> Callable[[Tree], np.ndarray]:
    if callable(stat):
        return stat
    table = {
        "Z": level_profile,
        "P": lambda t: pair_profile_bruteforce(t, 0, 0).p,
        "Y": lambda t: pair_profile_bruteforce(t, lcap, mcap).y,
        "Q": lambda t: root_pair_counts(t).q,
        "Qp": lambda t: root_pair_counts(t).qp,
    }
    try:
        return table[stat]
    except KeyError:
        raise ValueError(f"unknown statistic {stat!r}; choose from {sorted(table)}") from None


def exact_conditioned_expectation(
    dist: OffspringDist, n: int, stat: Selector, lcap: int = 8, mcap: int = 8
) -> np.ndarray:
    """``E[stat(T_n)]`` as a weighted average over all trees of size ``n``.

    Vector statistics of different lengths are zero-padded; ``"Y"`` returns
    an ``(lcap + 1, mcap + 1)`` matrix.
    """
    ws = weighted_trees(dist, n)
    if not ws.total_weight > 0:
        raise ValueError(f"P(|T| = {n}) = 0: n incompatible with span {dist.span}")
    fn = _selector(stat, lcap, mcap)
    acc = None
    for tree, w in ws.items:
        if w == 0:
            continue
        x = np.asarray(fn(tree), dtype=float)
        if acc is None:
            acc = np.zeros_like(x)
        if x.ndim == 1 and len(x) > len(acc):
            acc = np.pad(acc, (0, len(x) - len(acc)))
        if x.ndim == 1:
            acc[: len(x)] += w * x
        else:
            acc += w * x
    return acc / ws.total_weight
