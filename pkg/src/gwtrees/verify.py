"""Named verification suites: tables of observed values plus pass/fail checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import stats as sps

from .labels import gamma, make_eta, normalized_profile, psi_exact, psi_sweep, vertical_profile
from .offspring import OffspringDist, make_offspring
from .oracle import exact_conditioned_expectation
from .series import (
    domain_grid,
    dwass_table,
    engine,
    fn_polynomial,
    singularity_ratio,
    tail_ratio,
    y_matrix,
)
from .stats import (
    level_profile,
    monte_carlo_mean,
    pair_profile,
    pair_profile_bruteforce,
    root_pair_counts,
    unconditioned_root_pair_means,
)
from .trees import fringe_subtree, replicate_rng, sample_conditioned


@dataclass(frozen=True)
class Check:
    """One tolerance test; ``observed`` is compared against ``limit``."""

    suite: str
    name: str
    observed: float
    limit: float
    passed: bool
    detail: str = ""

    def record(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "check": self.name,
            "observed": self.observed,
            "limit": self.limit,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class SuiteResult:
    suite: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str, observed: float, limit: float, ok: bool | None = None, detail: str = "") -> Check:
        """Record ``observed <= limit`` (or an explicit verdict ``ok``)."""
        observed = float(observed)
        passed = bool(observed <= limit) if ok is None else bool(ok)
        if math.isnan(observed):
            passed = False
        c = Check(self.suite, name, observed, float(limit), passed, detail)
        self.checks.append(c)
        return c


def _dists(specs: Sequence[str] | str) -> list[OffspringDist]:
    if isinstance(specs, str):
        specs = [specs]
    return [make_offspring(s) for s in specs]


def _compatible(dist: OffspringDist, ns) -> list[int]:
    return [n for n in ns if n >= 1 and (n - 1) % dist.span == 0]


def _snap(dist: OffspringDist, ns) -> list[int]:
    """Each requested size moved up to the nearest size the span allows."""
    out: list[int] = []
    for n in ns:
        n += -(n - 1) % dist.span
        if n not in out:
            out.append(n)
    return out


def _growth(values: Sequence[float]) -> float:
    """Largest relative increase between successive entries."""
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return 0.0
    return float(np.max(v[1:] / v[:-1] - 1.0))


def _drift(values: Sequence[float]) -> float:
    """Largest relative change, up or down, between successive entries."""
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return 0.0
    return float(np.max(np.abs(v[1:] / v[:-1] - 1.0)))


# ---------------------------------------------------------------------------
# exact suites

DEFAULT_LAWS = ("geometric", "poisson", "binary", "d-ary:3", "custom:0.25,0.5,0.25")


def suite_dwass(offspring=DEFAULT_LAWS, lmax: int = 20, nmax: int = 200, tol: float = 1e-12) -> SuiteResult:
    """Both sides of ``P(W_l = n) = (l/n) P(S_n = n - l)``, worst case per law."""
    res = SuiteResult("dwass", ("offspring", "l", "n", "lhs", "rhs", "rel_err"))
    for d in _dists(offspring):
        lhs, rhs = dwass_table(d, lmax, nmax)
        den = np.maximum(np.abs(lhs), np.abs(rhs))
        rel = np.divide(np.abs(lhs - rhs), den, out=np.zeros_like(den), where=den > 0)
        i, n = np.unravel_index(int(rel.argmax()), rel.shape)
        res.rows.append((d.spec, i + 1, n, lhs[i, n], rhs[i, n], rel[i, n]))
        res.check(f"dwass identity, {d.spec}, max relative error", rel[i, n], tol)
    return res


def suite_tail(offspring=("geometric", "poisson", "binary"), nmax: int = 2000, tol: float = 0.01, tol_lattice: float = 0.05) -> SuiteResult:
    """``P(|T| = n) sigma sqrt(2 pi) n^(3/2) / d`` at the largest compatible ``n``."""
    res = SuiteResult("tail", ("offspring", "n", "ratio"))
    for d in _dists(offspring):
        n = max(_compatible(d, range(1, nmax + 1)))
        r = tail_ratio(d, n)
        res.rows.append((d.spec, n, r))
        res.check(f"tail asymptotic, {d.spec}, |ratio - 1|", abs(r - 1), tol if d.span == 1 else tol_lattice)
    return res


def _halves(ns: list[int], maxima: list[float], split: int) -> tuple[float, float]:
    a = max(m for n, m in zip(ns, maxima) if n <= split)
    b = max(m for n, m in zip(ns, maxima) if n > split)
    return a, b


def suite_theorem1(offspring=("geometric", "poisson", "binary"), nmin: int = 25, nmax: int = 500, tol: float = 0.05) -> SuiteResult:
    """``max_k E P_k(T_n) / (n k)`` for each ``n``; the two halves of the range must agree."""
    res = SuiteResult("theorem1", ("offspring", "n", "max_ratio", "argmax_k"))
    split = (nmin + nmax) // 2
    for d in _dists(offspring):
        T = engine(d, nmax).pk_table(nmax)
        ns = _compatible(d, range(nmin, nmax + 1))
        maxima = []
        for n in ns:
            k = np.arange(1, n)
            r = T[n, 1:n] / (n * k)
            j = int(r.argmax())
            maxima.append(float(r[j]))
            res.rows.append((d.spec, n, r[j], j + 1))
        a, b = _halves(ns, maxima, split)
        res.check(f"E P_k/(nk) bounded, {d.spec}, half-to-half change", abs(b / a - 1), tol, detail=f"max {a:.6g} then {b:.6g}")
    return res


def suite_t11(
    offspring=("geometric", "poisson", "binary"),
    nmin: int = 25,
    nmax: int = 500,
    lmax: int = 40,
    mmax: int = 40,
    tol: float = 0.05,
) -> SuiteResult:
    """``max_{l <= lmax, m <= mmax} E Y_{l,m}(T_n) / n`` for each ``n``."""
    res = SuiteResult("t11", ("offspring", "n", "max_ratio", "argmax_l", "argmax_m"))
    split = (nmin + nmax) // 2
    for d in _dists(offspring):
        diag, edge, inner = engine(d, nmax).y_table(nmax, lmax + mmax)
        ns = _compatible(d, range(nmin, nmax + 1))
        maxima = []
        for n in ns:
            # candidates: (value, l, m); inner values depend on l + m only
            cands = [(diag[n], 0, 0)]
            s = int(np.argmax(edge[n, 1 : max(lmax, mmax) + 1])) + 1
            cands.append((edge[n, s], s, 0) if s <= lmax else (edge[n, s], 0, s))
            if lmax >= 1 and mmax >= 1:
                s = int(np.argmax(inner[n, 2 : lmax + mmax + 1])) + 2
                ell = min(lmax, s - 1)
                cands.append((inner[n, s], ell, s - ell))
            v, ell, m = max(cands)
            maxima.append(float(v) / n)
            res.rows.append((d.spec, n, v / n, ell, m))
        a, b = _halves(ns, maxima, split)
        res.check(f"E Y_lm/n bounded, {d.spec}, half-to-half change", abs(b / a - 1), tol, detail=f"max {a:.6g} then {b:.6g}")
    return res


def suite_tq(offspring=("geometric", "poisson"), n_list=(100, 400, 1600), tol: float = 0.25) -> SuiteResult:
    """``max_k E Q_k(T_n) / (k sqrt n)`` from the exact series."""
    res = SuiteResult("tq", ("offspring", "n", "max_ratio", "argmax_k"))
    for d in _dists(offspring):
        ns = _snap(d, n_list)
        T = engine(d, max(ns)).qk_table(max(ns))
        maxima = []
        for n in ns:
            k = np.arange(1, n)
            r = T[n, 1:n] / (k * math.sqrt(n))
            j = int(r.argmax())
            maxima.append(float(r[j]))
            res.rows.append((d.spec, n, r[j], j + 1))
        res.check(f"E Q_k/(k sqrt n) bounded, {d.spec}, growth", _growth(maxima), tol)
    return res


def suite_meirmoon(offspring=("geometric", "poisson"), n: int = 5000, ks=(1, 2, 5), tol: float = 0.02) -> SuiteResult:
    """``E Z_k(T_n)`` against its limit ``1 + k sigma^2``."""
    res = SuiteResult("meirmoon", ("offspring", "n", "k", "exact", "limit", "rel_err"))
    for d in _dists(offspring):
        e = engine(d, n)
        for k in ks:
            v = e.mean_Z(n, k)
            lim = 1 + k * d.variance
            res.rows.append((d.spec, n, k, v, lim, abs(v / lim - 1)))
            res.check(f"level profile limit, {d.spec}, k={k}", abs(v / lim - 1), tol)
    return res


def suite_singularity(offspring=("geometric", "poisson"), z: float = 0.999, tol: float = 0.02) -> SuiteResult:
    """``(1 - F(z)) sigma / sqrt(2 (1 - z))`` near ``z = 1``, by series and by root finding."""
    res = SuiteResult("singularity", ("offspring", "z", "ratio_series", "ratio_solve"))
    for d in _dists(offspring):
        a = singularity_ratio(d, z, "series")
        b = singularity_ratio(d, z, "solve")
        res.rows.append((d.spec, z, a, b))
        res.check(f"square-root singularity, {d.spec}, |ratio - 1|", abs(a - 1), tol)
        res.check(f"F(z) series vs fixed point, {d.spec}", abs(a - b), 1e-6)
    return res


def suite_tgen1(
    offspring=("geometric", "poisson"),
    n_list=(51, 101, 201),
    beta: float = math.pi / 8,
    delta: float = 0.05,
    grid: int = 200,
    tol: float = 0.10,
) -> SuiteResult:
    """``max_z |f_n(z)| |1 - z|^2 / n`` over the indented disc, per ``n``."""
    res = SuiteResult("tgen1", ("offspring", "n", "z_re", "z_im", "ratio"))
    zs = domain_grid(beta, delta, grid)
    for d in _dists(offspring):
        maxima = []
        for n in _snap(d, n_list):
            f = fn_polynomial(d, n)
            r = np.abs(f(zs)) * np.abs(1 - zs) ** 2 / n
            j = int(r.argmax())
            maxima.append(float(r[j]))
            res.rows.append((d.spec, n, zs[j].real, zs[j].imag, r[j]))
        res.check(f"|f_n| |1-z|^2/n bounded, {d.spec}, drift across n", _drift(maxima), tol)
    return res


def suite_tgen2(
    offspring=("geometric", "poisson"),
    n_list=(51, 101, 201),
    beta: float = math.pi / 8,
    delta: float = 0.05,
    grid: int = 30,
    tol: float = 0.10,
) -> SuiteResult:
    """``max |h_n(x, y)| |1 - x| |1 - y| / n`` over a product grid of the indented disc."""
    res = SuiteResult("tgen2", ("offspring", "n", "x_re", "x_im", "y_re", "y_im", "ratio"))
    zs = domain_grid(beta, delta, grid)
    for d in _dists(offspring):
        maxima = []
        for n in _snap(d, n_list):
            M = y_matrix(d, n)
            k = np.arange(n)
            V = zs[:, None] ** k
            h = V @ M @ V.T
            w = np.abs(1 - zs)
            r = np.abs(h) * np.outer(w, w) / n
            i, j = np.unravel_index(int(r.argmax()), r.shape)
            maxima.append(float(r[i, j]))
            res.rows.append((d.spec, n, zs[i].real, zs[i].imag, zs[j].real, zs[j].imag, r[i, j]))
        res.check(f"|h_n| |1-x||1-y|/n bounded, {d.spec}, drift across n", _drift(maxima), tol)
    return res


def suite_oracle(offspring=DEFAULT_LAWS, nmax: int = 9, lmax: int = 8, mmax: int = 8, tol: float = 1e-9) -> SuiteResult:
    """Series means against exhaustive enumeration for every small ``n``."""
    res = SuiteResult("oracle", ("offspring", "n", "max_abs_err"))
    for d in _dists(offspring):
        e = engine(d, nmax)
        worst = 0.0
        for n in _compatible(d, range(1, nmax + 1)):
            Z = exact_conditioned_expectation(d, n, "Z")
            P = exact_conditioned_expectation(d, n, "P")
            Q = exact_conditioned_expectation(d, n, "Q")
            Y = exact_conditioned_expectation(d, n, "Y", lmax, mmax)
            pad = lambda v, k: v[k] if k < len(v) else 0.0
            errs = [abs(pad(Z, k) - e.mean_Z(n, k)) for k in range(n)]
            errs += [abs(pad(P, k) - e.mean_P(n, k)) for k in range(1, n)]
            errs += [abs(pad(Q, k) - e.mean_Q(n, k)) for k in range(1, n)]
            errs += [abs(Y[i, j] - e.mean_Y(n, i, j)) for i in range(lmax + 1) for j in range(mmax + 1)]
            err = max(errs)
            worst = max(worst, err)
            res.rows.append((d.spec, n, err))
        res.check(f"series equals enumeration, {d.spec}", worst, tol)
    return res


# ---------------------------------------------------------------------------
# Monte Carlo suites


def suite_qk(offspring=("geometric", "poisson"), k: int = 10, reps: int = 10**6, seed: int = 0, nsigma: float = 3.0) -> SuiteResult:
    """Unconditioned ``E Q_k`` against ``1 + (k - 1) sigma^2 / 2`` for ``k = 1..k``."""
    res = SuiteResult("qk", ("offspring", "k", "mean", "stderr", "target", "z_score", "reps"))
    for d in _dists(offspring):
        _, qtab = unconditioned_root_pair_means(d, k, reps, seed)
        for j in range(1, k + 1):
            m, se = qtab.at(j)
            target = 1 + (j - 1) * d.variance / 2
            z = abs(m - target) / se if se > 0 else (0.0 if m == target else math.inf)
            res.rows.append((d.spec, j, m, se, target, z, reps))
            res.check(f"E Q_k of the GW tree, {d.spec}, k={j}, |z-score|", z, nsigma)
    return res


def suite_l1a(offspring=("geometric", "poisson"), n_list=(100, 400, 1600), reps: int = 10**4, seed: int = 0, tol: float = 0.25) -> SuiteResult:
    """Monte Carlo ``E Z_k(T_n)^2 / n`` at ``k = floor(sqrt n)``."""
    res = SuiteResult("l1a", ("offspring", "n", "k", "mean", "stderr", "reps"))
    for d in _dists(offspring):
        vals = []
        for n in _snap(d, n_list):
            k = math.isqrt(n)
            tab = monte_carlo_mean(lambda t, k=k: np.array([level_profile(t)[k] if k <= t.height else 0]) ** 2, d, n, reps, seed)
            m, se = float(tab.mean[0]) / n, float(tab.stderr[0]) / n
            vals.append(m)
            res.rows.append((d.spec, n, k, m, se, reps))
        res.check(f"E Z_k^2/n bounded, {d.spec}, growth", _growth(vals), tol)
    return res


def suite_l0(
    offspring="geometric",
    eta="uniform_3",
    n_list=(100, 400, 1600),
    tpoints: int = 41,
    reps: int = 10**4,
    seed: int = 0,
    tol: float = 0.25,
    nsigma: float = 5.0,
) -> SuiteResult:
    """``(1 + n t^4) Psi(n, t)`` on a symmetric ``t`` grid, Monte Carlo and exact."""
    res = SuiteResult("l0", ("offspring", "eta", "n", "t", "psi", "stderr", "psi_exact", "scaled", "scaled_stderr"))
    ts = np.linspace(-math.pi, math.pi, tpoints)
    for d in _dists(offspring):
        e = make_eta(eta) if isinstance(eta, str) else eta
        maxima = []
        worst_z = 0.0
        for n in _snap(d, n_list):
            mean, se = psi_sweep(d, e, n, ts, reps, seed)
            exact = psi_exact(d, e, n, ts)
            w = 1 + n * ts**4
            scaled = w * mean
            j = int(scaled.argmax())
            maxima.append(float(scaled[j]))
            dev = np.abs(mean - exact) / np.maximum(se, 1e-300)
            dev[np.abs(mean - exact) <= 1e-12] = 0.0
            worst_z = max(worst_z, float(dev.max()))
            for row in zip(ts, mean, se, exact, scaled, w * se):
                res.rows.append((d.spec, e.spec, n, *row))
        res.check(f"(1+nt^4) Psi bounded, {d.spec}/{e.spec}, growth", _growth(maxima), tol, detail=f"maxima {maxima}")
        res.check(f"Psi Monte Carlo vs exact, {d.spec}/{e.spec}, max |z-score|", worst_z, nsigma)
    return res


UNIVERSALITY_PAIRS = (("geometric", "uniform_3"), ("poisson", "uniform_pm1"))


def profile_at_zero(dist: OffspringDist, eta, n: int, reps: int, seed: int, key: int = 0) -> tuple[np.ndarray, bool]:
    """Normalized vertical profile at ``x = 0`` over ``reps`` trees, and whether
    every profile conserved mass."""
    g = gamma(dist, eta)
    out = np.empty(reps)
    mass_ok = True
    for r in range(reps):
        rng = replicate_rng(seed, r, key)
        prof = vertical_profile(sample_conditioned(dist, n, rng), eta, rng)
        mass_ok &= int(prof.counts.sum()) == n
        out[r] = normalized_profile(prof, g, [0.0])[0]
    return out, mass_ok


def suite_universality(pairs=UNIVERSALITY_PAIRS, n: int = 5000, reps: int = 2000, seed: int = 0, tol: float = 0.1) -> SuiteResult:
    """Two-sample KS distance between normalized profiles at 0 for different laws."""
    res = SuiteResult("universality", ("offspring", "eta", "n", "reps", "mean", "stderr"))
    samples = []
    for key, (ds, es) in enumerate(pairs):
        d, e = make_offspring(ds), make_eta(es)
        x, mass_ok = profile_at_zero(d, e, n, reps, seed, key)
        samples.append(x)
        res.rows.append((d.spec, e.spec, n, reps, float(x.mean()), float(x.std(ddof=1) / math.sqrt(reps))))
        res.check(f"mass conservation, {d.spec}/{e.spec}", 0 if mass_ok else 1, 0, ok=mass_ok)
    for i in range(1, len(samples)):
        ks = sps.ks_2samp(samples[0], samples[i]).statistic
        res.check(f"profile at 0, KS distance, {pairs[0]} vs {pairs[i]}", ks, tol)
    return res


def suite_identities(offspring=("geometric", "poisson", "binary", "d-ary:3"), n_list=(10, 50, 200), reps: int = 1000, seed: int = 0) -> SuiteResult:
    """Exact per-tree identities between the distance statistics on random trees."""
    res = SuiteResult("identities", ("offspring", "n", "trees", "violations"))
    for d in _dists(offspring):
        for n in _snap(d, n_list):
            bad: dict[str, int] = {}
            for r in range(reps):
                tree = sample_conditioned(d, n, replicate_rng(seed, r))
                for name, ok in tree_identities(tree).items():
                    bad[name] = bad.get(name, 0) + (not ok)
            res.rows.append((d.spec, n, reps, sum(bad.values())))
            for name, count in bad.items():
                res.check(f"{name}, {d.spec}, n={n}, violating trees", count, 0)
    return res


def tree_identities(tree) -> dict[str, bool]:
    """Each identity evaluated on one tree."""
    n = tree.n
    fast = pair_profile(tree, n, n)
    brute = pair_profile_bruteforce(tree, n, n)
    rp = root_pair_counts(tree)
    z = level_profile(tree)
    zpad = np.zeros(len(rp.q), dtype=np.int64)
    zpad[1 : len(z)] = z[1 : len(rp.q)]
    fringe = np.zeros(n, dtype=np.int64)
    for v in np.flatnonzero(tree.degrees):
        q = root_pair_counts(fringe_subtree(tree, int(v))).q
        fringe[: len(q)] += q
    diag = np.zeros(2 * n + 1, dtype=np.int64)
    ell, m = np.indices(fast.y.shape)
    np.add.at(diag, ell + m, fast.y)
    p = fast.p
    return {
        "pair profile equals brute force": fast == brute,
        "Q_k = Q'_k + Z_k": bool(np.array_equal(rp.q[1:], rp.qp[1:] + zpad[1:])),
        "sum over fringe subtrees of Q_k = P_k": bool(np.array_equal(fringe[1:], p[1:])),
        "2 P_k = sum of Y_lm over l + m = k": bool(np.array_equal(2 * p[1:], diag[1:n])),
    }


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "dwass": suite_dwass,
    "tail": suite_tail,
    "theorem1": suite_theorem1,
    "t11": suite_t11,
    "tgen1": suite_tgen1,
    "tgen2": suite_tgen2,
    "qk": suite_qk,
    "tq": suite_tq,
    "l0": suite_l0,
    "meirmoon": suite_meirmoon,
    "singularity": suite_singularity,
    "oracle": suite_oracle,
    "l1a": suite_l1a,
    "universality": suite_universality,
    "identities": suite_identities,
}


def run_suite(name: str, **params) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(**params)
