"""Truncated power series and exact conditioned expectations from generating functions.

With ``F(z) = E z^|T|`` solving ``F = z Phi(F)`` and ``A(z) = z Phi'(F(z))``,
coefficient extraction from the level and pair generating functions gives

* ``E Z_k(T_n)       = [z^n] F A^k / [z^n] F``
* ``E Y_{l,m}(T_n)  = [z^n] H_{l,m} / [z^n] F`` with ``D = 1/(1 - A)`` and
  ``H_{0,0} = D F``, ``H_{l,0} = H_{0,l} = D F A^l`` and, for ``l, m >= 1``,
  ``H_{l,m} = D z Phi''(F) F^2 A^(l+m-2)``;
* ``E P_k(T_n) = 1/2 sum_{l+m=k} E Y_{l,m}(T_n)``.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import optimize

from .offspring import OffspringDist

# neglected tail mass of Phi per factor in convolution powers
PGF_TAIL_TOL = 1e-16


class TruncatedSeries:
    """Real power series ``a_0 + a_1 z + ... + a_N z^N`` modulo ``z^(N+1)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, N: int | None = None):
        c = np.asarray(coeffs)
        c = c.astype(complex if np.iscomplexobj(c) else float)
        if N is not None:
            c = np.pad(c[: N + 1], (0, max(0, N + 1 - len(c))))
        self.coeffs = c
        self.coeffs.flags.writeable = False

    @classmethod
    def const(cls, a: float, N: int) -> "TruncatedSeries":
        return cls([a], N)

    @classmethod
    def z(cls, N: int) -> "TruncatedSeries":
        return cls([0.0, 1.0], N)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self) -> str:
        head = ", ".join(f"{x:.6g}" for x in self.coeffs[:6])
        return f"TruncatedSeries([{head}{', ...' if self.N > 5 else ''}], N={self.N})"

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.N != self.N:
                raise ValueError(f"truncation mismatch: {self.N} vs {other.N}")
            return other
        return TruncatedSeries([other], self.N)

    def __add__(self, other):
        return TruncatedSeries(self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return TruncatedSeries(self.coeffs - self._coerce(other).coeffs)

    def __rsub__(self, other):
        return TruncatedSeries(self._coerce(other).coeffs - self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._coerce(other)
            return TruncatedSeries(np.convolve(self.coeffs, other.coeffs)[: self.N + 1])
        return TruncatedSeries(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return TruncatedSeries(self.coeffs / other)

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = TruncatedSeries.const(1.0, self.N)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def reciprocal(self) -> "TruncatedSeries":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for n in range(1, len(a)):
            b[n] = -b[0] * np.dot(a[1 : n + 1], b[n - 1 :: -1])
        return TruncatedSeries(b)

    def shift(self, k: int = 1) -> "TruncatedSeries":
        """Multiply by ``z**k``."""
        return TruncatedSeries(np.concatenate([np.zeros(k), self.coeffs[: len(self.coeffs) - k]]))

    def derivative(self) -> "TruncatedSeries":
        """Termwise derivative; the top coefficient is lost and padded with zero."""
        d = self.coeffs[1:] * np.arange(1, len(self.coeffs))
        return TruncatedSeries(d, self.N)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(z))``; the inner series must have zero constant term."""
        inner = self._coerce(inner)
        if inner.coeffs[0] != 0:
            raise ValueError("composition needs an inner series with zero constant term")
        out = TruncatedSeries.const(self.coeffs[-1], self.N)
        for c in self.coeffs[-2::-1]:
            out = out * inner + c
        return out

    def __call__(self, z):
        """Evaluate the truncated polynomial at ``z`` (Horner)."""
        return np.polynomial.polynomial.polyval(z, self.coeffs)


def _pgf_probs(dist: OffspringDist, moment: int = 0) -> np.ndarray:
    return dist.probs(dist.cutoff(PGF_TAIL_TOL, moment=moment))


def pgf_series(dist: OffspringDist, inner: TruncatedSeries, order: int = 0) -> TruncatedSeries:
    """``Phi^(order)(inner(z))`` by Horner's rule over the (truncated) weights."""
    p = _pgf_probs(dist, moment=order)
    c = np.polynomial.polynomial.polyder(p, order) if order else p
    # terms beyond degree N vanish since inner(0) = 0
    return _horner(c[: inner.N + 1], inner)


def _horner(c: np.ndarray, inner: TruncatedSeries) -> TruncatedSeries:
    out = TruncatedSeries.const(c[-1], inner.N)
    for a in c[-2::-1]:
        out = out * inner + a
    return out


def phi_powers(dist: OffspringDist, N: int, nmax: int | None = None):
    """Yield ``(n, Phi(t)^n mod t^N)`` for ``n = 1..nmax`` by repeated convolution."""
    p = _pgf_probs(dist)[:N]
    power = np.ones(1)
    for n in range(1, (nmax if nmax is not None else N) + 1):
        power = np.convolve(power, p)[:N]
        yield n, power


def series_F(dist: OffspringDist, N: int) -> TruncatedSeries:
    """``F(z) = E z^|T|`` to degree ``N`` by Lagrange inversion,
    ``[z^n] F = (1/n) [t^(n-1)] Phi(t)^n``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    f = np.zeros(N + 1)
    for n, power in phi_powers(dist, N):
        if n - 1 < len(power):
            f[n] = power[n - 1] / n
    return TruncatedSeries(f)


def series_F_newton(dist: OffspringDist, N: int) -> TruncatedSeries:
    """``F`` to degree ``N`` by Newton iteration on ``F - z Phi(F) = 0``.

    Shares nothing with :func:`series_F` beyond the offspring weights; used
    as the second route of the Dwass check.
    """
    F = TruncatedSeries([0.0, dist.probs(0)[0]], 1)
    prec = 1
    while True:
        prec = min(2 * prec, N)
        F = TruncatedSeries(F.coeffs, prec)
        z = TruncatedSeries.z(prec)
        resid = F - z * pgf_series(dist, F, 0)
        jac = 1.0 - z * pgf_series(dist, F, 1)
        F = F - resid / jac
        if prec == N:
            break
    # one more pass at full precision absorbs rounding from the last doubling
    z = TruncatedSeries.z(N)
    return F - (F - z * pgf_series(dist, F, 0)) / (1.0 - z * pgf_series(dist, F, 1))


class GWSeries:
    """Generating-function engine for one offspring law, truncated at degree ``N``.

    Series are built lazily and never mutated, so one instance can be shared.
    """

    def __init__(self, dist: OffspringDist, N: int):
        self.dist = dist
        self.N = N
        self.F = series_F(dist, N)
        self._apow = [TruncatedSeries.const(1.0, N)]
        self._lock = threading.Lock()

    @cached_property
    def _phi_of_F(self) -> tuple[TruncatedSeries, TruncatedSeries]:
        """``Phi'(F)`` and ``Phi''(F)`` from a single sweep over powers of ``F``."""
        p = _pgf_probs(self.dist, moment=2)
        K = len(p) - 1
        N = self.N
        d1 = np.zeros(N + 1)
        d2 = np.zeros(N + 1)
        power = np.zeros(N + 1)
        power[0] = 1.0
        f = self.F.coeffs
        for j in range(K + 1):
            if j + 1 <= K:
                d1 += (j + 1) * p[j + 1] * power
            if j + 2 <= K:
                d2 += (j + 2) * (j + 1) * p[j + 2] * power
            if j + 2 > K:
                break
            power = np.convolve(power, f)[: N + 1]
        return TruncatedSeries(d1), TruncatedSeries(d2)

    @cached_property
    def A(self) -> TruncatedSeries:
        """``z Phi'(F(z))``."""
        return self._phi_of_F[0].shift(1)

    @cached_property
    def D(self) -> TruncatedSeries:
        """``1 / (1 - A)``."""
        return (1.0 - self.A).reciprocal()

    @cached_property
    def R(self) -> TruncatedSeries:
        """``z Phi''(F) F^2``: ordered pairs of distinct root children, each with a subtree."""
        return self._phi_of_F[1].shift(1) * self.F * self.F

    @cached_property
    def U(self) -> TruncatedSeries:
        """``D R``: pairs whose paths turn at a vertex with two used children."""
        return self.D * self.R

    @cached_property
    def V(self) -> TruncatedSeries:
        """``D F``."""
        return self.D * self.F

    def a_power(self, k: int) -> TruncatedSeries:
        with self._lock:
            while len(self._apow) <= k:
                self._apow.append(self._apow[-1] * self.A)
            return self._apow[k]

    def _check(self, n: int) -> float:
        if not 1 <= n <= self.N:
            raise ValueError(f"n = {n} outside 1..{self.N}")
        fn = self.F[n]
        if not fn > 0:
            raise ValueError(f"P(|T| = {n}) = 0: n incompatible with span {self.dist.span}")
        return fn

    @staticmethod
    def _coef(a: TruncatedSeries, b: TruncatedSeries, n: int) -> float:
        """``[z^n] (a b)`` without forming the product."""
        return float(np.dot(a.coeffs[: n + 1], b.coeffs[n::-1]))

    def mean_Z(self, n: int, k: int) -> float:
        fn = self._check(n)
        if k < 0:
            raise ValueError("k must be >= 0")
        if k >= n:
            return 0.0
        return self._coef(self.F, self.a_power(k), n) / fn

    def mean_Y(self, n: int, ell: int, m: int) -> float:
        fn = self._check(n)
        if ell < 0 or m < 0:
            raise ValueError("l, m must be >= 0")
        if ell + m >= 2 * n:
            return 0.0
        if ell == 0 and m == 0:
            return self._coef(self.D, self.F, n) / fn
        if ell == 0 or m == 0:
            return self._coef(self.V, self.a_power(ell + m), n) / fn
        return self._coef(self.U, self.a_power(ell + m - 2), n) / fn

    def mean_P(self, n: int, k: int) -> float:
        fn = self._check(n)
        if k < 1:
            raise ValueError("k must be >= 1")
        if k >= n:
            return 0.0
        turn = (k - 1) * self._coef(self.U, self.a_power(k - 2), n) if k >= 2 else 0.0
        return (0.5 * turn + self._coef(self.V, self.a_power(k), n)) / fn

    def mean_Q(self, n: int, k: int) -> float:
        """Pairs at distance ``k`` whose path visits the root."""
        fn = self._check(n)
        if k < 1:
            raise ValueError("k must be >= 1")
        if k >= n:
            return 0.0
        turn = (k - 1) * self._coef(self.R, self.a_power(k - 2), n) if k >= 2 else 0.0
        return (0.5 * turn + self._coef(self.F, self.a_power(k), n)) / fn

    def pk_table(self, nmax: int | None = None) -> np.ndarray:
        """``T[n, k] = E P_k(T_n)`` for ``1 <= k < n <= nmax`` (zero elsewhere and
        on rows with ``P(|T| = n) = 0``)."""
        nmax = self.N if nmax is None else nmax
        U, V = self._table_parts(nmax, nmax + 1)
        k = np.arange(nmax + 1)
        T = np.zeros((nmax + 1, nmax + 1))
        T[:, 1:] = V[1:, :].T
        T[:, 2:] += 0.5 * (k[2:] - 1) * U[: nmax - 1, :].T
        return self._normalize_rows(T, nmax)

    def y_table(self, nmax: int | None = None, smax: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Mean ``Y`` values by turn length ``s = l + m``.

        Returns ``(diag, edge, inner)`` with ``diag[n] = E Y_00``,
        ``edge[n, s] = E Y_{s,0}`` and ``inner[n, s] = E Y_{l, s-l}`` for
        ``1 <= l <= s - 1``, all divided by ``P(|T| = n)``.
        """
        nmax = self.N if nmax is None else nmax
        smax = nmax if smax is None else smax
        U, V = self._table_parts(nmax, smax + 1)
        edge = np.zeros((nmax + 1, smax + 1))
        edge[:, 1:] = V[1:, :].T
        inner = np.zeros((nmax + 1, smax + 1))
        inner[:, 2:] = U[: smax - 1, :].T
        diag = np.convolve(self.D.coeffs, self.F.coeffs)[: nmax + 1]
        fn = self.F.coeffs[: nmax + 1]
        scale = np.divide(1.0, fn, out=np.zeros_like(fn), where=fn > 0)
        return diag * scale, edge * scale[:, None], inner * scale[:, None]

    def _table_parts(self, nmax: int, kcount: int) -> tuple[np.ndarray, np.ndarray]:
        """Rows ``j``: ``[z^0..z^nmax] U A^j`` and ``V A^j`` for ``j < kcount``."""
        return self.power_rows((self.U, self.V), nmax, kcount)

    def power_rows(self, series, nmax: int, kcount: int) -> tuple[np.ndarray, ...]:
        """For each ``S`` in ``series``, the matrix with rows ``[z^0..z^nmax] S A^j``, ``j < kcount``."""
        if nmax > self.N:
            raise ValueError(f"nmax = {nmax} exceeds truncation {self.N}")
        cs = [s.coeffs[: nmax + 1] for s in series]
        a = self.A.coeffs[: nmax + 1]
        out = tuple(np.zeros((kcount, nmax + 1)) for _ in cs)
        power = np.zeros(nmax + 1)
        power[0] = 1.0
        # A(0) = 0, so A^j vanishes below degree j and rows j > nmax are zero
        for j in range(min(kcount, nmax + 1)):
            tail = power[j:]
            for c, M in zip(cs, out):
                M[j, j:] = np.convolve(c[: nmax + 1 - j], tail)[: nmax + 1 - j]
            nxt = np.zeros(nmax + 1)
            if j + 1 <= nmax:
                nxt[j + 1 :] = np.convolve(tail[: nmax - j], a[1 : nmax + 1 - j])[: nmax - j]
            power = nxt
        return out

    def qk_table(self, nmax: int | None = None) -> np.ndarray:
        """``T[n, k] = E Q_k(T_n)`` for ``1 <= k < n <= nmax``."""
        nmax = self.N if nmax is None else nmax
        R, Fp = self.power_rows((self.R, self.F), nmax, nmax + 1)
        k = np.arange(nmax + 1)
        T = np.zeros((nmax + 1, nmax + 1))
        T[:, 1:] = Fp[1:, :].T
        T[:, 2:] += 0.5 * (k[2:] - 1) * R[: nmax - 1, :].T
        return self._normalize_rows(T, nmax)

    def _normalize_rows(self, T: np.ndarray, nmax: int) -> np.ndarray:
        fn = self.F.coeffs[: nmax + 1]
        scale = np.divide(1.0, fn, out=np.zeros_like(fn), where=fn > 0)
        T = T * scale[:, None]
        n = np.arange(nmax + 1)
        T[np.arange(nmax + 1)[None, :] >= n[:, None]] = 0.0
        return T


_ENGINES: dict[OffspringDist, GWSeries] = {}
_ENGINES_LOCK = threading.Lock()


def engine(dist: OffspringDist, N: int) -> GWSeries:
    """Shared engine for ``dist`` truncated at degree at least ``N``."""
    e = _ENGINES.get(dist)
    if e is not None and e.N >= N:
        return e
    with _ENGINES_LOCK:
        e = _ENGINES.get(dist)
        if e is None or e.N < N:
            e = GWSeries(dist, N)
            _ENGINES[dist] = e
        return e


def series_A(dist: OffspringDist, N: int) -> TruncatedSeries:
    """``A(z) = z Phi'(F(z))`` to degree ``N``."""
    return TruncatedSeries(engine(dist, N).A.coeffs, N)


def exact_mean_Z(dist: OffspringDist, n: int, k: int) -> float:
    return engine(dist, n).mean_Z(n, k)


def exact_mean_Y(dist: OffspringDist, n: int, ell: int, m: int) -> float:
    return engine(dist, n).mean_Y(n, ell, m)


def exact_mean_P(dist: OffspringDist, n: int, k: int) -> float:
    return engine(dist, n).mean_P(n, k)


def exact_mean_Q(dist: OffspringDist, n: int, k: int) -> float:
    return engine(dist, n).mean_Q(n, k)


def dwass_check(dist: OffspringDist, ell: int, n: int) -> tuple[float, float]:
    """``([z^n] F^l, (l/n) [t^(n-l)] Phi^n)``: both sides of the Dwass identity,
    the first from the Newton-solved ``F``, the second from convolution powers."""
    if ell < 1 or n < 1:
        raise ValueError("need l >= 1 and n >= 1")
    table = dwass_table(dist, ell, n)
    return float(table[0][ell - 1, n]), float(table[1][ell - 1, n])


def dwass_table(dist: OffspringDist, lmax: int, nmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the Dwass identity for ``1 <= l <= lmax``, ``n <= nmax``
    as ``(lmax, nmax + 1)`` arrays (column 0 unused)."""
    F = series_F_newton(dist, nmax)
    lhs = np.zeros((lmax, nmax + 1))
    Fl = TruncatedSeries.const(1.0, nmax)
    for ell in range(1, lmax + 1):
        Fl = Fl * F
        lhs[ell - 1] = Fl.coeffs
    lhs[:, 0] = 0.0
    rhs = np.zeros((lmax, nmax + 1))
    ells = np.arange(1, lmax + 1)
    for n, power in phi_powers(dist, nmax + 1, nmax):
        idx = n - ells
        ok = idx >= 0
        rhs[ok, n] = ells[ok] / n * power[idx[ok]]
    return lhs, rhs


def tail_ratio(dist: OffspringDist, n: int) -> float:
    """``P(|T| = n) sigma sqrt(2 pi) n^(3/2) / d``, which tends to 1."""
    if n < 1 or (n - 1) % dist.span:
        raise ValueError(f"n = {n} incompatible with span {dist.span}")
    fn = engine(dist, n).F[n]
    return float(fn * dist.sigma * math.sqrt(2 * math.pi) * n**1.5 / dist.span)


def F_value(dist: OffspringDist, z: float, tol: float = 1e-7, max_degree: int = 16384) -> float:
    """``F(z)`` for real ``0 <= z < 1`` by summing the series.

    The degree grows until the tail bound ``f_N z^(N+1) / (1 - z)`` drops
    below ``tol`` (coefficients decrease eventually, so this bounds the rest).
    """
    if not 0 <= z < 1:
        raise ValueError("series summation needs 0 <= z < 1")
    N = 256
    while True:
        F = engine(dist, N).F.coeffs[: N + 1]
        tail = F[N - dist.span + 1 : N + 1].max() * z ** (N + 1) / (1 - z)
        if tail < tol or N >= max_degree:
            if tail >= tol:
                raise ArithmeticError(f"series for F({z}) not converged by degree {N}")
            return float(np.polynomial.polynomial.polyval(z, F))
        N *= 2


def F_fixed_point(dist: OffspringDist, z: float) -> float:
    """``F(z)`` for real ``0 <= z <= 1`` as the root of ``w = z Phi(w)`` in ``[0, 1]``."""
    if z == 0:
        return 0.0
    if z >= 1:
        return 1.0
    g = lambda w: z * float(np.real(dist.pgf(w))) - w
    return optimize.brentq(g, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)


def singularity_ratio(dist: OffspringDist, z: float, method: str = "series") -> float:
    """``(1 - F(z)) sigma / (sqrt 2 sqrt(1 - z))``, tending to 1 as ``z -> 1-``."""
    if not 0 <= z < 1:
        raise ValueError("need 0 <= z < 1")
    if dist.span != 1:
        raise ValueError("singularity ratio defined for span-1 laws")
    Fz = F_value(dist, z) if method == "series" else F_fixed_point(dist, z)
    return (1 - Fz) * dist.sigma / (math.sqrt(2) * math.sqrt(1 - z))


@dataclass(frozen=True)
class FnPolynomial:
    """``f_n(z) = sum_k E P_k(T_n) z^k``; ``coeffs[k]`` for ``k = 0..n-1``."""

    n: int
    coeffs: np.ndarray

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


def fn_polynomial(dist: OffspringDist, n: int) -> FnPolynomial:
    e = engine(dist, n)
    e._check(n)
    return FnPolynomial(n, e.pk_table(n)[n, :n].copy())


def eval_fn(dist: OffspringDist, n: int, z) -> complex:
    return fn_polynomial(dist, n)(z)


def y_matrix(dist: OffspringDist, n: int) -> np.ndarray:
    """``M[l, m] = E Y_{l,m}(T_n)`` for ``l, m < n``."""
    e = engine(dist, n)
    e._check(n)
    diag, edge, inner = e.y_table(n, 2 * n)
    ell = np.arange(n)
    s = ell[:, None] + ell[None, :]
    M = inner[n][s]
    M[0, :] = edge[n][ell]
    M[:, 0] = edge[n][ell]
    M[0, 0] = diag[n]
    return M


def eval_hn(dist: OffspringDist, n: int, x, y):
    """``h_n(x, y) = sum_{l,m} E Y_{l,m}(T_n) x^l y^m``; ``x``, ``y`` may be arrays,
    giving the matrix of values over all pairs."""
    M = y_matrix(dist, n)
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    ys = np.atleast_1d(np.asarray(y, dtype=complex))
    k = np.arange(n)
    out = (xs[:, None] ** k) @ M @ (ys[:, None] ** k).T
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return complex(out[0, 0])
    return out


def eval_hn_closed(dist: OffspringDist, n: int, x: complex, y: complex) -> complex:
    """``h_n(x, y)`` from the closed form of the pair generating function,

    ``H = (z x y Phi''(F) G(x) G(y) + A (x G(x) + y G(y)) + F) / (1 - A)``
    with ``G(x) = F / (1 - x A)``, as ``[z^n] H / [z^n] F``. Independent of
    the coefficient tables behind :func:`eval_hn`.
    """
    e = engine(dist, n)
    fn = e._check(n)
    N = n
    F = TruncatedSeries(e.F.coeffs, N)
    A = TruncatedSeries(e.A.coeffs, N)
    d2 = TruncatedSeries(e._phi_of_F[1].coeffs, N).shift(1)
    Gx = F / (1 - x * A)
    Gy = F / (1 - y * A)
    num = (x * y) * d2 * Gx * Gy + A * (x * Gx + y * Gy) + F
    H = num / (1 - A)
    return complex(H[n]) / fn


def in_domain(z: complex, beta: float, delta: float) -> bool:
    """Membership in ``{|z| < 1 + delta, z != 1, |arg(z - 1)| > pi/2 - beta}``."""
    return abs(z) < 1 + delta and z != 1 and abs(cmath.phase(z - 1)) > math.pi / 2 - beta


def domain_grid(beta: float, delta: float, count: int) -> np.ndarray:
    """``count`` deterministic points of the indented disc, spread evenly.

    A sunflower lattice on the disc of radius ``1 + delta`` is filtered
    through :func:`in_domain` and densified until enough points survive.
    """
    if not 0 < beta < math.pi / 2 or delta <= 0:
        raise ValueError("need 0 < beta < pi/2 and delta > 0")
    if count < 1:
        raise ValueError("count must be >= 1")
    golden = math.pi * (3 - math.sqrt(5))
    m = count
    while True:
        i = np.arange(m)
        r = (1 + delta) * np.sqrt((i + 0.5) / m)
        pts = r * np.exp(1j * golden * i)
        keep = [z for z in pts if in_domain(complex(z), beta, delta)]
        if len(keep) >= count:
            idx = np.linspace(0, len(keep) - 1, count).round().astype(int)
            return np.array([keep[j] for j in idx])
        m = int(m * 1.25) + 1
