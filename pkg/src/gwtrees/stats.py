"""Per-tree distance statistics and Monte Carlo estimation of their means."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .offspring import OffspringDist
from .trees import Tree, TreeTruncated, replicate_rng, sample_conditioned, sample_unconditioned

DEFAULT_CAP = 64
BRUTEFORCE_MAX_N = 2000


@dataclass(frozen=True)
class PairProfile:
    """``p[k]`` = pairs at distance ``k`` (``p[0] = 0``); ``y[l, m]`` = ordered pairs
    whose paths climb ``l`` and descend ``m`` edges, for ``l <= lcap, m <= mcap``."""

    p: np.ndarray
    y: np.ndarray

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PairProfile)
            and np.array_equal(self.p, other.p)
            and np.array_equal(self.y, other.y)
        )


@dataclass(frozen=True)
class RootPairCounts:
    """``q[k]`` = pairs at distance ``k`` whose path visits the root; ``qp[k]`` the
    same excluding pairs that contain the root. Index 0 is unused."""

    q: np.ndarray
    qp: np.ndarray


def level_profile(tree: Tree) -> np.ndarray:
    """Number of vertices at each depth ``0..height``."""
    return np.bincount(tree.depth)


def pair_profile(tree: Tree, lcap: int = DEFAULT_CAP, mcap: int = DEFAULT_CAP) -> PairProfile:
    """Exact pair counts by post-order merging of depth profiles.

    Each vertex keeps the depth profile of the part of its subtree merged so
    far (itself plus earlier children). Pairs with last common ancestor ``u``
    are the cross products of that profile with each newly merged child
    profile, so one convolution per edge counts every pair once.
    """
    n = tree.n
    p = np.zeros(n, dtype=np.int64)
    y = np.zeros((lcap + 1, mcap + 1), dtype=np.int64)
    y[0, 0] = n
    one = np.ones(1, dtype=np.int64)
    acc: list[np.ndarray | None] = [None] * n
    parent = tree.parent.tolist()
    for v in range(n - 1, 0, -1):
        c = acc[v]
        acc[v] = None
        c = one if c is None else c
        child = np.concatenate(([0], c))
        u = parent[v]
        m = acc[u]
        if m is None:
            m = one
        cross = np.convolve(m, child)
        p[: len(cross)] += cross
        a, b = min(len(m), lcap + 1), min(len(child), mcap + 1)
        y[:a, :b] += np.outer(m[:a], child[:b])
        a, b = min(len(child), lcap + 1), min(len(m), mcap + 1)
        y[:a, :b] += np.outer(child[:a], m[:b])
        if len(m) >= len(child):
            m = m.copy()
            m[: len(child)] += child
        else:
            child[: len(m)] += m
            m = child
        acc[u] = m
    p[0] = 0
    return PairProfile(p, y)


def pair_profile_bruteforce(tree: Tree, lcap: int = DEFAULT_CAP, mcap: int = DEFAULT_CAP) -> PairProfile:
    """Reference pair counts from explicit last-common-ancestor depths of all pairs.

    In depth-first order the descendants of ``a`` are ``a .. a + size[a] - 1``,
    so the ancestor relation is a 0/1 matrix and the number of common
    ancestors of ``v`` and ``w`` (one more than the depth of ``v ^ w``) is an
    entry of its Gram matrix. Cubic time; refuses trees above 2000 vertices.
    """
    n = tree.n
    if n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTEFORCE_MAX_N}, got {n}")
    idx = np.arange(n)
    start = idx[:, None]
    anc = ((idx[None, :] >= start) & (idx[None, :] < start + tree.subtree_size[:, None])).astype(np.float64)
    common = np.rint(anc.T @ anc).astype(np.int64)
    depth = tree.depth
    ell = depth[:, None] - (common - 1)
    m = ell.T
    dist = ell + m
    p = np.bincount(dist[np.triu_indices(n, 1)], minlength=n)[:n].astype(np.int64)
    p[0] = 0
    keep = (ell <= lcap) & (m <= mcap)
    y = np.zeros((lcap + 1, mcap + 1), dtype=np.int64)
    np.add.at(y, (ell[keep], m[keep]), 1)
    return PairProfile(p, y)


def all_pairs_distances(tree: Tree) -> np.ndarray:
    """Distance matrix by a breadth-first search from every vertex."""
    n = tree.n
    adj = [[] for _ in range(n)]
    for v, u in enumerate(tree.parent.tolist()):
        if u >= 0:
            adj[u].append(v)
            adj[v].append(u)
    out = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for x in frontier:
                dx = dist[x] + 1
                for y in adj[x]:
                    if dist[y] < 0:
                        dist[y] = dx
                        nxt.append(y)
            frontier = nxt
        out[s] = dist
    return out


def root_pair_counts(tree: Tree) -> RootPairCounts:
    """Pairs whose connecting path passes through the root.

    Pairs avoiding the root as an endpoint pair up vertices in two distinct
    child subtrees, so they are convolutions of the children's level
    profiles shifted by the two edges to the root.
    """
    n = tree.n
    qp = np.zeros(n, dtype=np.int64)
    size = tree.subtree_size
    depth = tree.depth
    run = np.zeros(0, dtype=np.int64)
    for c in tree.children[0] if n > 1 else []:
        z = np.bincount(depth[c : c + size[c]] - 1)
        if len(run):
            cross = np.convolve(run, z)
            qp[2 : 2 + len(cross)] += cross
        if len(z) > len(run):
            z = z.copy()
            z[: len(run)] += run
            run = z
        else:
            run = run.copy()
            run[: len(z)] += z
    z = level_profile(tree)
    q = qp.copy()
    q[1 : len(z)] += z[1:]
    return RootPairCounts(q, qp)


# ---------------------------------------------------------------------------
# Monte Carlo

Statistic = Union[str, Callable[[Tree], np.ndarray]]


def _stat_fn(statistic: Statistic) -> Callable[[Tree], np.ndarray]:
    if callable(statistic):
        return statistic
    table = {
        "Z": level_profile,
        "Z2": lambda t: level_profile(t) ** 2,
        "P": lambda t: pair_profile(t, 0, 0).p,
        "Q": lambda t: root_pair_counts(t).q,
        "Qp": lambda t: root_pair_counts(t).qp,
    }
    try:
        return table[statistic]
    except KeyError:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {sorted(table)}") from None


@dataclass(frozen=True)
class EstimateTable:
    index: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    reps: int

    def rows(self) -> list[tuple[int, float, float, int]]:
        return [(int(i), float(m), float(s), self.reps) for i, m, s in zip(self.index, self.mean, self.stderr)]

    def at(self, k: int) -> tuple[float, float]:
        if k >= len(self.mean):
            return 0.0, 0.0
        return float(self.mean[k]), float(self.stderr[k])


class _Accumulator:
    """Running sums of padded per-replicate vectors, in replicate order."""

    def __init__(self) -> None:
        self.s = np.zeros(0)
        self.ss = np.zeros(0)
        self.count = 0

    def add(self, x: np.ndarray, weight: int = 1) -> None:
        x = np.asarray(x, dtype=float)
        if len(x) > len(self.s):
            self.s = np.pad(self.s, (0, len(x) - len(self.s)))
            self.ss = np.pad(self.ss, (0, len(x) - len(self.ss)))
        self.s[: len(x)] += x
        self.ss[: len(x)] += x * x
        self.count += weight

    def add_batch(self, x: np.ndarray) -> None:
        """``x`` has one replicate per row."""
        if x.shape[1] > len(self.s):
            self.s = np.pad(self.s, (0, x.shape[1] - len(self.s)))
            self.ss = np.pad(self.ss, (0, x.shape[1] - len(self.ss)))
        self.s[: x.shape[1]] += x.sum(axis=0)
        self.ss[: x.shape[1]] += (x * x).sum(axis=0)
        self.count += x.shape[0]

    def table(self) -> EstimateTable:
        r = self.count
        mean = self.s / r
        var = np.maximum(self.ss - r * mean * mean, 0.0) / (r - 1)
        return EstimateTable(np.arange(len(mean)), mean, np.sqrt(var / r), r)


def monte_carlo_mean(
    statistic: Statistic,
    dist: OffspringDist,
    n: int | None,
    reps: int,
    seed: int = 0,
    size_cap: int = 10**7,
    on_truncated: str = "raise",
) -> EstimateTable:
    """Mean and standard error of a per-tree statistic over ``reps`` samples.

    ``n=None`` samples the unconditioned tree, otherwise the tree conditioned
    on ``n`` vertices. Replicate ``r`` uses its own stream derived from
    ``(seed, r)``. An unconditioned tree beyond ``size_cap`` raises, or with
    ``on_truncated="skip"`` is dropped as censored (``reps`` in the result
    then counts only the kept trees).
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if on_truncated not in ("raise", "skip"):
        raise ValueError("on_truncated must be 'raise' or 'skip'")
    fn = _stat_fn(statistic)
    acc = _Accumulator()
    for r in range(reps):
        rng = replicate_rng(seed, r)
        if n is not None:
            acc.add(fn(sample_conditioned(dist, n, rng)))
            continue
        try:
            tree = sample_unconditioned(dist, rng, size_cap)
        except TreeTruncated:
            if on_truncated == "raise":
                raise
            continue
        acc.add(fn(tree))
    return acc.table()


def unconditioned_root_pair_means(
    dist: OffspringDist, kmax: int, reps: int, seed: int = 0, block: int = 10_000
) -> tuple[EstimateTable, EstimateTable]:
    """Monte Carlo ``E Z_k`` and ``E Q_k`` of the unconditioned tree for ``k <= kmax``.

    Both statistics only see the first ``kmax`` generations, so each child
    subtree of the root is simulated as a generation-size process up to
    depth ``kmax - 1``, vectorized over a block of replicates. Block ``b``
    draws from the stream derived from ``(seed, b)``.
    """
    if reps < 2 or kmax < 1:
        raise ValueError("need reps >= 2 and kmax >= 1")
    zacc, qacc = _Accumulator(), _Accumulator()
    done = 0
    b = 0
    while done < reps:
        size = min(block, reps - done)
        rng = replicate_rng(seed, b)
        root = np.asarray(dist.sample(rng, size), dtype=np.int64)
        owner = np.repeat(np.arange(size), root)
        # lineage[i, j]: vertices at depth j below the root's i-th child
        lineage = np.zeros((len(owner), kmax), dtype=np.int64)
        lineage[:, 0] = 1
        for j in range(1, kmax):
            lineage[:, j] = dist.sample_sums(rng, lineage[:, j - 1])
        total = np.zeros((size, kmax), dtype=float)
        np.add.at(total, owner, lineage)
        lf = lineage.astype(float)
        z = np.zeros((size, kmax + 1))
        z[:, 0] = 1.0
        z[:, 1:] = total
        q = z.copy()
        q[:, 0] = 0.0
        for k in range(2, kmax + 1):
            s = k - 2
            # sum over r < s of (Z(T_r) * Z(T_s))[k-2] = (all pairs - same lineage) / 2
            cross_all = (total[:, : s + 1] * total[:, s::-1]).sum(axis=1)
            same = np.bincount(owner, weights=(lf[:, : s + 1] * lf[:, s::-1]).sum(axis=1), minlength=size)
            q[:, k] += 0.5 * (cross_all - same)
        zacc.add_batch(z)
        qacc.add_batch(q)
        done += size
        b += 1
    return zacc.table(), qacc.table()
