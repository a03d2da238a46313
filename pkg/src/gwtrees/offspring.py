"""Critical offspring distributions and their probability generating functions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy import special, stats

CRITICALITY_TOL = 1e-9
_NORMALIZATION_TOL = 1e-12
# index up to which infinite-support laws are materialized when scanning tails
_SCAN_LIMIT = 400


class Kind(enum.Enum):
    GEOMETRIC_HALF = "geometric_half"
    POISSON_1 = "poisson_1"
    BINARY_02 = "binary_02"
    D_ARY = "d_ary"
    CUSTOM_FINITE = "custom_finite"


@dataclass(frozen=True)
class OffspringDist:
    """A critical offspring law ``xi`` with ``E xi = 1`` and finite positive variance.

    Finite laws keep their weights in ``weights``; the geometric and Poisson
    laws have infinite support and are materialized on demand by :meth:`probs`.
    Instances are immutable and hashable, so they can key caches.
    """

    kind: Kind
    weights: tuple[float, ...] = ()
    d: int = 1
    spec: str = ""
    mean: float = field(init=False, compare=False)
    variance: float = field(init=False, compare=False)
    span: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        p = self.probs(self.cutoff(1e-18, moment=2))
        if np.any(p < 0):
            raise ValueError("offspring weights must be non-negative")
        total = p.sum() + self.tail_mass(len(p) - 1)
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(f"offspring weights sum to {total}, not 1")
        k = np.arange(len(p), dtype=float)
        mean = float(k @ p)
        var = float((k * k) @ p) - mean * mean
        if abs(mean - 1.0) > CRITICALITY_TOL:
            raise ValueError(f"offspring law is not critical: mean {mean!r} != 1")
        if not p[0] > 0 or not p[1] < 1 or not var > 0:
            raise ValueError("offspring law must have p_0 > 0 and p_1 < 1")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", var)
        object.__setattr__(self, "span", self._span())

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    @property
    def finite(self) -> bool:
        return self.kind not in (Kind.GEOMETRIC_HALF, Kind.POISSON_1)

    def _span(self) -> int:
        if self.kind is Kind.BINARY_02:
            return 2
        if self.kind is Kind.D_ARY:
            return self.d
        if not self.finite:
            return 1
        support = [k for k, w in enumerate(self.weights) if w > 0 and k > 0]
        return reduce(math.gcd, support, 0)

    def probs(self, upto: int) -> np.ndarray:
        """Return ``p_0, ..., p_upto`` as a float array."""
        k = np.arange(upto + 1)
        if self.kind is Kind.GEOMETRIC_HALF:
            return np.ldexp(1.0, -(k + 1))
        if self.kind is Kind.POISSON_1:
            return np.exp(-1.0 - special.gammaln(k + 1.0))
        out = np.zeros(upto + 1)
        w = np.asarray(self._finite_weights())[: upto + 1]
        out[: len(w)] = w
        return out

    def _finite_weights(self) -> tuple[float, ...]:
        if self.kind is Kind.BINARY_02:
            return (0.5, 0.0, 0.5)
        if self.kind is Kind.D_ARY:
            w = [0.0] * (self.d + 1)
            w[0], w[self.d] = 1.0 - 1.0 / self.d, 1.0 / self.d
            return tuple(w)
        return self.weights

    @property
    def max_degree(self) -> int | None:
        """Largest support point, or ``None`` for infinite support."""
        if not self.finite:
            return None
        w = self._finite_weights()
        return max(k for k, x in enumerate(w) if x > 0)

    def tail_mass(self, upto: int) -> float:
        """``P(xi > upto)``."""
        if self.kind is Kind.GEOMETRIC_HALF:
            return math.ldexp(1.0, -(upto + 1))
        if self.kind is Kind.POISSON_1:
            return float(stats.poisson.sf(upto, 1.0))
        return float(sum(self._finite_weights()[upto + 1 :]))

    def cutoff(self, tol: float = 1e-16, moment: int = 0) -> int:
        """Smallest ``K`` with ``sum_{k>K} k**moment * p_k < tol``.

        Finite laws return their largest support point.
        """
        if self.finite:
            return max(len(self._finite_weights()) - 1, 1)
        p = self.probs(_SCAN_LIMIT)
        w = p * np.arange(_SCAN_LIMIT + 1, dtype=float) ** moment
        # tail[K] = sum_{k > K} w_k
        tail = np.concatenate([np.cumsum(w[::-1])[::-1][1:], [0.0]])
        return int(np.argmax(tail < tol))

    def pgf(self, w: complex, order: int = 0) -> complex:
        """``Phi(w)``, ``Phi'(w)`` or ``Phi''(w)`` on the closed unit disc."""
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        if abs(w) > 1 + 1e-12:
            raise ValueError(f"|w| = {abs(w)} > 1: outside the closed unit disc")
        if self.kind is Kind.GEOMETRIC_HALF:
            return math.factorial(order) / (2 - w) ** (order + 1)
        if self.kind is Kind.POISSON_1:
            return np.exp(w - 1)
        c = np.polynomial.polynomial.polyder(self._finite_weights(), order) if order else np.asarray(self._finite_weights())
        return np.polynomial.polynomial.polyval(w, c)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw i.i.d. offspring counts as an int64 array."""
        if self.kind is Kind.GEOMETRIC_HALF:
            return rng.geometric(0.5, size=size) - 1
        if self.kind is Kind.POISSON_1:
            return rng.poisson(1.0, size=size)
        if self.kind in (Kind.BINARY_02, Kind.D_ARY):
            d = 2 if self.kind is Kind.BINARY_02 else self.d
            return d * (rng.random(size) < 1.0 / d).astype(np.int64)
        w = np.asarray(self.weights)
        return rng.choice(len(w), size=size, p=w / w.sum())

    def sample_sums(self, rng: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        """For each entry ``c`` of ``counts`` draw the sum of ``c`` i.i.d. copies of xi."""
        counts = np.asarray(counts, dtype=np.int64)
        if self.kind is Kind.POISSON_1:
            return rng.poisson(counts.astype(float))
        if self.kind is Kind.GEOMETRIC_HALF:
            out = np.zeros_like(counts)
            pos = counts > 0
            out[pos] = rng.negative_binomial(counts[pos], 0.5)
            return out
        if self.kind in (Kind.BINARY_02, Kind.D_ARY):
            d = 2 if self.kind is Kind.BINARY_02 else self.d
            return d * rng.binomial(counts, 1.0 / d)
        w = np.asarray(self.weights)
        tally = rng.multinomial(counts, w / w.sum())
        return tally @ np.arange(len(w))

    def sample_given_sum(self, rng: np.random.Generator, n: int, total: int) -> np.ndarray | None:
        """Draw ``(xi_1..xi_n)`` conditioned on summing to ``total``.

        Only laws whose conditional law is classical are handled: geometric
        (uniform weak composition), Poisson (uniform multinomial) and the
        two-point laws (uniform placement of the non-zero degrees). Returns
        ``None`` otherwise so the caller falls back to rejection.
        """
        if self.kind is Kind.GEOMETRIC_HALF:
            if n == 1:
                return np.array([total], dtype=np.int64)
            bars = np.sort(rng.choice(total + n - 1, size=n - 1, replace=False))
            edges = np.concatenate([[-1], bars, [total + n - 1]])
            return np.diff(edges) - 1
        if self.kind is Kind.POISSON_1:
            return rng.multinomial(total, np.full(n, 1.0 / n))
        if self.kind in (Kind.BINARY_02, Kind.D_ARY):
            d = 2 if self.kind is Kind.BINARY_02 else self.d
            if total % d:
                raise ValueError(f"sum {total} not divisible by span {d}")
            out = np.zeros(n, dtype=np.int64)
            out[rng.choice(n, size=total // d, replace=False)] = d
            return out
        return None


def make_offspring(spec: str) -> OffspringDist:
    """Build an offspring law from a spec string.

    Accepted forms: ``geometric``, ``poisson``, ``binary``, ``d-ary:<d>`` and
    ``custom:p0,p1,...``. Custom weights are normalized, then rejected unless
    the mean is 1 to within 1e-9.
    """
    s = spec.strip().lower()
    if s == "geometric":
        return OffspringDist(Kind.GEOMETRIC_HALF, spec="geometric")
    if s == "poisson":
        return OffspringDist(Kind.POISSON_1, spec="poisson")
    if s == "binary":
        return OffspringDist(Kind.BINARY_02, d=2, spec="binary")
    if s.startswith("d-ary:"):
        try:
            d = int(s.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad d-ary spec {spec!r}") from None
        if d < 2:
            raise ValueError("d-ary law needs d >= 2")
        return OffspringDist(Kind.D_ARY, d=d, spec=f"d-ary:{d}")
    if s.startswith("custom:"):
        try:
            raw = [float(x) for x in s.split(":", 1)[1].split(",")]
        except ValueError:
            raise ValueError(f"bad custom spec {spec!r}") from None
        if any(x < 0 for x in raw):
            raise ValueError("custom weights must be non-negative")
        total = sum(raw)
        if not total > 0:
            raise ValueError("custom weights must not all be zero")
        w = [x / total for x in raw]
        while len(w) > 1 and w[-1] == 0:
            w.pop()
        mean = sum(k * x for k, x in enumerate(w))
        if abs(mean - 1.0) > CRITICALITY_TOL:
            raise ValueError(f"custom law is not critical: mean {mean!r} != 1")
        return OffspringDist(Kind.CUSTOM_FINITE, weights=tuple(w), spec=spec.strip())
    raise ValueError(f"unknown offspring spec {spec!r}")


BUILTIN_SPECS = ("geometric", "poisson", "binary", "d-ary:3")
