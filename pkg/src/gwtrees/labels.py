"""Random edge displacements, vertical profiles and their characteristic-function statistic."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .offspring import OffspringDist
from .series import eval_hn_closed
from .trees import Tree, replicate_rng, sample_conditioned

_MEAN_TOL = 1e-12


class EtaKind(enum.Enum):
    UNIFORM_PM1 = "uniform_pm1"
    UNIFORM_3 = "uniform_3"
    CUSTOM_FINITE = "custom_finite"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class DisplacementDist:
    """Integer-valued, centred edge displacement ``eta``."""

    kind: EtaKind
    support: tuple[int, ...]
    weights: tuple[float, ...]
    spec: str = ""

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.weights))

    @property
    def variance(self) -> float:
        s = np.asarray(self.support, dtype=float)
        return float(np.dot(s * s, self.weights)) - self.mean**2

    def charfn(self, t):
        """``E exp(i t eta)``, vectorized over ``t``."""
        t = np.asarray(t, dtype=float)
        return np.exp(1j * np.multiply.outer(t, np.asarray(self.support))) @ np.asarray(self.weights)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind is EtaKind.DETERMINISTIC:
            return np.full(size, self.support[0], dtype=np.int64)
        idx = rng.choice(len(self.support), size=size, p=self.weights)
        return np.asarray(self.support, dtype=np.int64)[idx]

    @classmethod
    def deterministic(cls, value: int) -> "DisplacementDist":
        """Constant displacement, for exact-label tests only (not centred)."""
        return cls(EtaKind.DETERMINISTIC, (int(value),), (1.0,), spec=f"const:{value}")


def _validated(kind: EtaKind, pairs: dict[int, float], spec: str) -> DisplacementDist:
    if any(w < 0 for w in pairs.values()):
        raise ValueError("displacement weights must be non-negative")
    total = sum(pairs.values())
    if not total > 0:
        raise ValueError("displacement weights must not all be zero")
    items = sorted((j, w / total) for j, w in pairs.items() if w > 0)
    eta = DisplacementDist(kind, tuple(j for j, _ in items), tuple(w for _, w in items), spec)
    if abs(eta.mean) > _MEAN_TOL:
        raise ValueError(f"displacement law must be centred, mean is {eta.mean!r}")
    if not eta.variance > 0:
        raise ValueError("displacement law must have positive variance")
    t = np.linspace(0, math.pi, 2001)[1:]
    if np.min(np.abs(1 - eta.charfn(t))) < 1e-12:
        raise ValueError("characteristic function equals 1 somewhere in (0, pi]")
    return eta


def make_eta(spec: str) -> DisplacementDist:
    """``uniform_pm1`` ({-1, 1}), ``uniform_3`` ({-1, 0, 1}) or
    ``custom:j=w,j=w,...`` (weights normalized; must be centred)."""
    s = spec.strip().lower()
    if s in ("uniform_pm1", "pm1"):
        return _validated(EtaKind.UNIFORM_PM1, {-1: 0.5, 1: 0.5}, "uniform_pm1")
    if s in ("uniform_3", "pm1_0"):
        return _validated(EtaKind.UNIFORM_3, {-1: 1 / 3, 0: 1 / 3, 1: 1 / 3}, "uniform_3")
    if s.startswith("custom:"):
        pairs: dict[int, float] = {}
        try:
            for item in s.split(":", 1)[1].split(","):
                j, w = item.split("=")
                pairs[int(j)] = pairs.get(int(j), 0.0) + float(w)
        except ValueError:
            raise ValueError(f"bad displacement spec {spec!r}") from None
        return _validated(EtaKind.CUSTOM_FINITE, pairs, spec.strip())
    raise ValueError(f"unknown displacement spec {spec!r}")


@dataclass(frozen=True)
class VerticalProfile:
    """``counts[i]`` vertices carry label ``offset + i``."""

    offset: int
    counts: np.ndarray
    n: int

    def __getitem__(self, j: int) -> int:
        i = j - self.offset
        return int(self.counts[i]) if 0 <= i < len(self.counts) else 0

    def as_dict(self) -> dict[int, int]:
        return {self.offset + i: int(c) for i, c in enumerate(self.counts) if c}

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.counts))


def vertex_labels(tree: Tree, eta: DisplacementDist, rng: np.random.Generator) -> np.ndarray:
    """Root-path sums of i.i.d. edge displacements (the root gets 0)."""
    n = tree.n
    step = np.zeros(n, dtype=np.int64)
    step[1:] = eta.sample(rng, n - 1)
    # in depth-first order v's descendants are v .. v + size - 1: add on entry, cancel on exit
    diff = np.zeros(n + 1, dtype=np.int64)
    diff[:n] = step
    np.subtract.at(diff, np.arange(n) + tree.subtree_size, step)
    return np.cumsum(diff)[:n]


def vertical_profile(tree: Tree, eta: DisplacementDist, rng: np.random.Generator) -> VerticalProfile:
    labels = vertex_labels(tree, eta, rng)
    lo = int(labels.min())
    return VerticalProfile(lo, np.bincount(labels - lo), tree.n)


def gamma(dist: OffspringDist, eta: DisplacementDist) -> float:
    """Scale ``sigma^(1/2) / sigma_eta`` of the vertical profile limit."""
    return math.sqrt(dist.sigma) / math.sqrt(eta.variance)


def interpolate_profile(profile: VerticalProfile, u) -> np.ndarray:
    """``X_n(u)``: the profile extended to real ``u`` by linear interpolation."""
    labels = np.concatenate([[profile.offset - 1], profile.labels, [profile.offset + len(profile.counts)]])
    counts = np.concatenate([[0], profile.counts, [0]]).astype(float)
    return np.interp(u, labels, counts, left=0.0, right=0.0)


def normalized_profile(profile: VerticalProfile, gamma: float, xgrid) -> np.ndarray:
    """``(1/n) gamma^-1 n^(1/4) X_n(gamma^-1 n^(1/4) x)`` on ``xgrid``; a probability density in ``x``."""
    n = profile.n
    scale = n**0.25 / gamma
    return scale / n * interpolate_profile(profile, scale * np.asarray(xgrid, dtype=float))


def psi_sample(profile: VerticalProfile, t) -> np.ndarray:
    """``|n^-1 sum_j X(j) e^{i j t}|^2`` for one labelled tree."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = np.exp(1j * np.multiply.outer(t, profile.labels)) @ profile.counts
    return np.abs(s / profile.n) ** 2


def psi_sweep(
    dist: OffspringDist,
    eta: DisplacementDist,
    n: int,
    ts,
    reps: int,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimates and standard errors of ``Psi(n, t)`` for each ``t``.

    Replicate ``r`` samples a fresh tree and labelling from the stream
    derived from ``(seed, r)``.
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    s = np.zeros(len(ts))
    ss = np.zeros(len(ts))
    for r in range(reps):
        rng = replicate_rng(seed, r)
        tree = sample_conditioned(dist, n, rng)
        x = psi_sample(vertical_profile(tree, eta, rng), ts)
        s += x
        ss += x * x
    mean = s / reps
    var = np.maximum(ss - reps * mean * mean, 0.0) / (reps - 1)
    return mean, np.sqrt(var / reps)


def psi_estimate(
    dist: OffspringDist, eta: DisplacementDist, n: int, t: float, reps: int, seed: int = 0
) -> tuple[float, float]:
    mean, se = psi_sweep(dist, eta, n, [t], reps, seed)
    return float(mean[0]), float(se[0])


def psi_exact(dist: OffspringDist, eta: DisplacementDist, n: int, t) -> np.ndarray:
    """``Psi(n, t) = n^-2 h_n(phi(t), conj(phi(t)))`` from the exact pair means."""
    phi = np.atleast_1d(eta.charfn(t))
    h = np.array([eval_hn_closed(dist, n, complex(c), complex(np.conj(c))) for c in phi])
    return np.real(h) / n**2
