"""Rooted ordered trees in depth-first (Lukasiewicz) form, and GW tree samplers."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .offspring import OffspringDist

DEFAULT_MAX_ATTEMPTS = 10**6
DEFAULT_SIZE_CAP = 10**7
# upper bound on rows * n for one batch of rejection draws
_BATCH_CELLS = 1 << 21


class TreeTruncated(RuntimeError):
    """An unconditioned tree outgrew its size cap (a censored sample)."""


class RejectionLimit(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""


def _frozen(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Tree:
    """Ordered rooted tree; vertex ids are depth-first order and 0 is the root.

    ``degrees`` is the Lukasiewicz word, ``parent[0] == -1``.
    """

    degrees: np.ndarray
    parent: np.ndarray
    depth: np.ndarray

    @property
    def n(self) -> int:
        return len(self.degrees)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, degrees={self.degrees.tolist()[:16]}{'...' if self.n > 16 else ''})"

    def key(self) -> tuple[int, ...]:
        """Hashable shape key (the Lukasiewicz word)."""
        return tuple(self.degrees.tolist())

    @cached_property
    def subtree_size(self) -> np.ndarray:
        size = [1] * self.n
        parent = self.parent.tolist()
        for v in range(self.n - 1, 0, -1):
            size[parent[v]] += size[v]
        return _frozen(size)

    @cached_property
    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent.tolist()):
            if p >= 0:
                ch[p].append(v)
        return ch

    @property
    def height(self) -> int:
        return int(self.depth.max())


def from_lukasiewicz(degrees: Iterable[int]) -> Tree:
    """Decode a depth-first outdegree sequence into a :class:`Tree`.

    Raises ``ValueError`` unless the sequence sums to ``n - 1`` with every
    proper prefix of ``(deg - 1)`` non-negative.
    """
    deg = np.asarray(list(degrees) if not isinstance(degrees, np.ndarray) else degrees, dtype=np.int64)
    n = len(deg)
    if n == 0:
        raise ValueError("empty degree sequence")
    if np.any(deg < 0):
        raise ValueError("negative outdegree")
    walk = np.cumsum(deg - 1)
    if walk[-1] != -1:
        raise ValueError(f"degrees sum to {walk[-1] + n}, expected {n - 1}")
    if n > 1 and walk[:-1].min() < 0:
        raise ValueError("ballot condition violated: a proper prefix closes the tree")
    return _decode(deg)


def _decode(deg: np.ndarray) -> Tree:
    d = deg.tolist()
    n = len(d)
    parent = [-1] * n
    depth = [0] * n
    slots: list[int] = []
    pop, extend = slots.pop, slots.extend
    for i in range(n):
        if i:
            p = pop()
            parent[i] = p
            depth[i] = depth[p] + 1
        if d[i]:
            extend([i] * d[i])
    return Tree(_frozen(deg), _frozen(parent), _frozen(depth))


def cycle_rotate(deg: np.ndarray) -> np.ndarray:
    """Rotate a degree sequence summing to ``n - 1`` into its unique valid rotation.

    The rotation starting after index ``i`` is valid iff the partial sums of
    ``deg - 1`` are strictly above ``walk[i]`` before ``i`` and at least
    ``walk[i]`` after it; exactly one ``i`` qualifies (the first minimum).
    """
    walk = np.cumsum(deg - 1)
    if walk[-1] != -1:
        raise ValueError("degree sequence must sum to n - 1")
    before = np.concatenate(([np.iinfo(np.int64).max], np.minimum.accumulate(walk)[:-1]))
    after = np.minimum.accumulate(walk[::-1])[::-1]
    ok = np.flatnonzero((walk < before) & (walk == after))
    if len(ok) != 1:
        raise AssertionError(f"cycle lemma violated: {len(ok)} valid rotations")
    return np.roll(deg, -(int(ok[0]) + 1))


def sample_conditioned(
    dist: OffspringDist,
    n: int,
    rng: np.random.Generator,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    method: str = "auto",
) -> Tree:
    """Sample the GW tree conditioned on having exactly ``n`` vertices.

    ``method="rejection"`` draws i.i.d. degree vectors until they sum to
    ``n - 1``. ``method="auto"`` instead draws the degree vector directly from
    its law given the sum when the offspring law allows it, which is the same
    distribution. Either way the cycle lemma picks the valid rotation.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if (n - 1) % dist.span:
        raise ValueError(f"n = {n} incompatible with span {dist.span}: need n = 1 mod {dist.span}")
    if n == 1:
        return from_lukasiewicz([0])
    deg = dist.sample_given_sum(rng, n, n - 1) if method == "auto" else None
    if deg is None:
        deg = _reject_on_sum(dist, n, rng, max_attempts)
    return _decode(cycle_rotate(np.asarray(deg, dtype=np.int64)))


def _reject_on_sum(dist: OffspringDist, n: int, rng: np.random.Generator, max_attempts: int) -> np.ndarray:
    rows = 16
    used = 0
    while used < max_attempts:
        rows = min(rows, max_attempts - used, max(1, _BATCH_CELLS // n))
        block = dist.sample(rng, (rows, n))
        used += rows
        hit = np.flatnonzero(block.sum(axis=1) == n - 1)
        if len(hit):
            return block[hit[0]]
        rows *= 2
    raise RejectionLimit(f"no degree vector summing to {n - 1} in {max_attempts} attempts")


def sample_unconditioned(
    dist: OffspringDist, rng: np.random.Generator, size_cap: int = DEFAULT_SIZE_CAP
) -> Tree:
    """Sample the unconditioned critical GW tree.

    The depth-first degree sequence is drawn in growing chunks until its
    walk first reaches -1; a tree that would exceed ``size_cap`` vertices
    raises :class:`TreeTruncated`.
    """
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    chunk = min(16, size_cap)
    parts: list[np.ndarray] = []
    level = 0  # walk value before the chunk
    drawn = 0
    while True:
        block = dist.sample(rng, chunk)
        walk = level + np.cumsum(block - 1)
        hit = np.flatnonzero(walk == -1)
        if len(hit):
            parts.append(block[: hit[0] + 1])
            return _decode(np.concatenate(parts))
        parts.append(block)
        drawn += chunk
        level = int(walk[-1])
        if drawn >= size_cap:
            raise TreeTruncated(f"tree exceeds size cap {size_cap}")
        chunk = min(2 * chunk, size_cap - drawn)


def fringe_subtree(tree: Tree, v: int) -> Tree:
    """The subtree of ``v`` and all its descendants, re-indexed from 0."""
    if not 0 <= v < tree.n:
        raise IndexError(f"vertex {v} not in tree of size {tree.n}")
    lo = v
    hi = v + int(tree.subtree_size[v])
    return _decode(np.array(tree.degrees[lo:hi]))


def replicate_rng(seed: int, r: int, *key: int) -> np.random.Generator:
    """Independent stream for replicate ``r`` of a run with master ``seed``.

    Extra ``key`` entries separate sub-experiments sharing one seed.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r, *key)))


def write_lukasiewicz_csv(trees: Iterable[Tree], fh) -> None:
    """One tree per line: its depth-first outdegree sequence."""
    w = csv.writer(fh, lineterminator="\n")
    for t in trees:
        w.writerow(t.degrees.tolist())


def read_lukasiewicz_csv(fh) -> Iterator[Tree]:
    for row in csv.reader(fh):
        if row and not row[0].startswith("#"):
            yield from_lukasiewicz(int(x) for x in row)
