"""Command-line front end: ``gwtrees {sample,exact,oracle,verify,profile}``.

Reports go to ``--out`` (default stdout) as CSV or JSON. CSV reports open
with ``#`` comment lines carrying the command, the full configuration and a
generation timestamp, then a header row and data rows. Exit status is 0 on
success, 1 when a verification check fails and 2 on invalid usage.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import inspect
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Sequence

import numpy as np

from . import __version__
from .labels import gamma, make_eta, normalized_profile, psi_exact, psi_sweep, vertical_profile
from .offspring import make_offspring
from .oracle import MAX_ENUM_N, exact_conditioned_expectation, weighted_trees
from .series import engine
from .trees import RejectionLimit, TreeTruncated, replicate_rng, sample_conditioned, sample_unconditioned
from .verify import SUITES, SuiteResult, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
# config fields only some commands read
_ONLY_FOR = {"eta": ("verify", "profile"), "size_cap": ("sample",), "xmax": ("profile",)}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a run depends on; together with ``seed`` it fixes the output."""

    command: str
    offspring: list[str] = field(default_factory=lambda: ["geometric"])
    eta: str = "uniform_3"
    n: int | None = None
    n_list: list[int] | None = None
    nmin: int | None = None
    nmax: int | None = None
    k: int | None = None
    k_list: list[int] | None = None
    lmax: int | None = None
    mmax: int | None = None
    reps: int | None = None
    seed: int = 0
    beta: float | None = None
    delta: float | None = None
    grid: int | None = None
    z: float | None = None
    tol: float | None = None
    table: str | None = None
    suite: str | None = None
    kind: str | None = None
    pairs: list[str] | None = None
    size_cap: int = 10**7
    xmax: float = 3.0
    out: str | None = None
    format: str = "csv"

    def record(self) -> dict[str, Any]:
        return {
            k: v
            for k, v in dataclasses.asdict(self).items()
            if v is not None and k not in ("out", "format") and self.command in _ONLY_FOR.get(k, (self.command,))
        }


@dataclass
class Report:
    columns: Sequence[str]
    rows: list[tuple]
    checks: list[dict[str, Any]] = field(default_factory=list)
    # CSV body is bare outdegree sequences, one tree per line
    trees: bool = False


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def render(cfg: RunConfig, report: Report, stamp: str) -> str:
    if cfg.format == "json":
        doc = {
            "command": cfg.command,
            "config": cfg.record(),
            "generated": stamp,
            "columns": list(report.columns),
            "rows": [dict(zip(report.columns, map(_jsonable, r))) for r in report.rows],
        }
        if report.checks:
            doc["checks"] = report.checks
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# gwtrees {__version__} {cfg.command}\n")
    buf.write(f"# config: {json.dumps(cfg.record(), sort_keys=True)}\n")
    buf.write(f"# generated: {stamp}\n")
    for c in report.checks:
        verdict = "PASS" if c["passed"] else "FAIL"
        buf.write(f"# {verdict} {c['check']}: observed={_fmt(c['observed'])} limit={_fmt(c['limit'])}\n")
    w = csv.writer(buf, lineterminator="\n")
    if report.trees:
        w.writerows(r[-1] for r in report.rows)
        return buf.getvalue()
    w.writerow(report.columns)
    for r in report.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def _one_dist(cfg: RunConfig):
    if len(cfg.offspring) != 1:
        raise UsageError(f"{cfg.command} takes exactly one --offspring")
    return make_offspring(cfg.offspring[0])


def _sizes(cfg: RunConfig) -> list[int]:
    if cfg.n_list:
        return cfg.n_list
    if cfg.n is not None:
        return [cfg.n]
    if cfg.nmax is not None:
        return list(range(cfg.nmin or 1, cfg.nmax + 1))
    raise UsageError("give --n, --n-list or --nmax")


def cmd_sample(cfg: RunConfig) -> Report:
    dist = _one_dist(cfg)
    reps = 1 if cfg.reps is None else cfg.reps
    if reps < 1:
        raise UsageError("--reps must be >= 1")
    rows = []
    for r in range(reps):
        rng = replicate_rng(cfg.seed, r)
        t = sample_unconditioned(dist, rng, cfg.size_cap) if cfg.n is None else sample_conditioned(dist, cfg.n, rng)
        rows.append((r, t.n, t.degrees.tolist()))
    return Report(("replicate", "n", "degrees"), rows, trees=True)


def _exact_rows(cfg: RunConfig, dist, ns: list[int]) -> Report:
    nmax = max(ns)
    e = engine(dist, nmax)
    for n in ns:
        if n < 1 or (n - 1) % dist.span:
            raise UsageError(f"n = {n} incompatible with span {dist.span} of {dist.spec}")
    kcap = cfg.k
    t = cfg.table
    rows: list[tuple] = []
    if t == "fn":
        return Report(("n", "prob_size"), [(n, e.F[n]) for n in ns])
    if t in ("pk", "qk"):
        T = e.pk_table(nmax) if t == "pk" else e.qk_table(nmax)
        for n in ns:
            for k in range(1, n if kcap is None else min(n, kcap + 1)):
                rows.append((n, k, T[n, k]))
        return Report(("n", "k", "mean_P" if t == "pk" else "mean_Q"), rows)
    if t == "zk":
        for n in ns:
            for k in range(0, n if kcap is None else min(n, kcap + 1)):
                rows.append((n, k, e.mean_Z(n, k)))
        return Report(("n", "k", "mean_Z"), rows)
    lmax = 8 if cfg.lmax is None else cfg.lmax
    mmax = 8 if cfg.mmax is None else cfg.mmax
    for n in ns:
        for ell in range(lmax + 1):
            for m in range(mmax + 1):
                rows.append((n, ell, m, e.mean_Y(n, ell, m)))
    return Report(("n", "l", "m", "mean_Y"), rows)


def cmd_exact(cfg: RunConfig) -> Report:
    return _exact_rows(cfg, _one_dist(cfg), _sizes(cfg))


def cmd_oracle(cfg: RunConfig) -> Report:
    dist = _one_dist(cfg)
    ns = _sizes(cfg)
    if max(ns) > MAX_ENUM_N:
        raise UsageError(f"enumeration limited to n <= {MAX_ENUM_N}")
    rows: list[tuple] = []
    t = cfg.table
    if t == "fn":
        return Report(("n", "prob_size"), [(n, weighted_trees(dist, n).total_weight) for n in ns])
    if t == "weights":
        for n in ns:
            ws = weighted_trees(dist, n)
            for tree, w in ws.items:
                rows.append((n, " ".join(map(str, tree.key())), w, w / ws.total_weight if ws.total_weight else 0.0))
        return Report(("n", "degrees", "weight", "cond_prob"), rows)
    lmax = 8 if cfg.lmax is None else cfg.lmax
    mmax = 8 if cfg.mmax is None else cfg.mmax
    stat = {"pk": "P", "zk": "Z", "qk": "Q", "yk": "Y"}[t]
    for n in ns:
        v = exact_conditioned_expectation(dist, n, stat, lmax, mmax)
        if t == "yk":
            rows += [(n, i, j, v[i, j]) for i in range(lmax + 1) for j in range(mmax + 1)]
            continue
        lo = 0 if t == "zk" else 1
        hi = n if cfg.k is None else min(n, cfg.k + 1)
        rows += [(n, k, v[k] if k < len(v) else 0.0) for k in range(lo, hi)]
    col = {"pk": "mean_P", "zk": "mean_Z", "qk": "mean_Q"}.get(t)
    return Report(("n", "l", "m", "mean_Y") if t == "yk" else ("n", "k", col), rows)


# CLI flag -> suite keyword
_SUITE_PARAMS = {
    "offspring": "offspring",
    "eta": "eta",
    "n": "n",
    "n_list": "n_list",
    "nmin": "nmin",
    "nmax": "nmax",
    "k": "k",
    "k_list": "ks",
    "lmax": "lmax",
    "mmax": "mmax",
    "reps": "reps",
    "seed": "seed",
    "beta": "beta",
    "delta": "delta",
    "grid": "grid",
    "z": "z",
    "tol": "tol",
    "pairs": "pairs",
}
_DEFAULTED = {"offspring", "eta", "seed"}


def suite_kwargs(cfg: RunConfig, explicit: set[str]) -> dict[str, Any]:
    """Keyword arguments for the chosen suite; explicit flags it cannot use are errors."""
    params = inspect.signature(SUITES[cfg.suite]).parameters
    kw: dict[str, Any] = {}
    for flag, name in _SUITE_PARAMS.items():
        value = getattr(cfg, flag)
        if value is None:
            continue
        if name not in params:
            if flag in explicit and flag not in _DEFAULTED:
                raise UsageError(f"suite {cfg.suite!r} does not take --{flag.replace('_', '-')}")
            continue
        if flag in ("offspring", "eta") and flag not in explicit:
            continue  # let the suite use its own laws
        if flag == "pairs":
            value = tuple(tuple(p.split("/", 1)) for p in value)
        if flag == "offspring" and name == "offspring" and params[name].default.__class__ is str:
            if len(value) != 1:
                raise UsageError(f"suite {cfg.suite!r} takes one --offspring")
            value = value[0]
        kw[name] = tuple(value) if isinstance(value, list) else value
    return kw


def cmd_verify(cfg: RunConfig, explicit: set[str]) -> tuple[Report, SuiteResult]:
    res = run_suite(cfg.suite, **suite_kwargs(cfg, explicit))
    return Report(res.columns, res.rows, [c.record() for c in res.checks]), res


def cmd_profile(cfg: RunConfig) -> Report:
    dist = _one_dist(cfg)
    eta = make_eta(cfg.eta)
    kind = cfg.kind or "vertical"
    if kind == "psi":
        ns = _sizes(cfg)
        grid = 41 if cfg.grid is None else cfg.grid
        reps = 10**4 if cfg.reps is None else cfg.reps
        ts = np.linspace(-math.pi, math.pi, grid)
        rows = []
        for n in ns:
            mean, se = psi_sweep(dist, eta, n, ts, reps, cfg.seed)
            exact = psi_exact(dist, eta, n, ts)
            rows += [(n, *r) for r in zip(ts, mean, se, exact)]
        return Report(("n", "t", "psi", "stderr", "psi_exact"), rows)
    if cfg.n is None:
        raise UsageError("profile needs --n")
    rng = replicate_rng(cfg.seed, 0)
    prof = vertical_profile(sample_conditioned(dist, cfg.n, rng), eta, rng)
    if kind == "vertical":
        return Report(("j", "count"), list(zip(prof.labels.tolist(), prof.counts.tolist())))
    grid = 201 if cfg.grid is None else cfg.grid
    xs = np.linspace(-cfg.xmax, cfg.xmax, grid)
    return Report(("x", "value"), list(zip(xs, normalized_profile(prof, gamma(dist, eta), xs))))


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s!r}")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--offspring", action="append", metavar="SPEC",
                   help="geometric | poisson | binary | d-ary:D | custom:p0,p1,... (repeatable)")
    p.add_argument("--seed", type=_nonneg_int, default=0, help="master seed (default 0)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _sizes_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--n-list", type=_int_list, metavar="N1,N2,...")
    p.add_argument("--nmin", type=_positive_int)
    p.add_argument("--nmax", type=_positive_int)


def _table_args(p: argparse.ArgumentParser, extra: Sequence[str] = ()) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pk", dest="table", action="store_const", const="pk", help="E P_k: pairs at distance k")
    g.add_argument("--zk", dest="table", action="store_const", const="zk", help="E Z_k: level sizes")
    g.add_argument("--yk", dest="table", action="store_const", const="yk", help="E Y_lm: split pair counts")
    g.add_argument("--qk", dest="table", action="store_const", const="qk", help="E Q_k: pairs through the root")
    g.add_argument("--fn", dest="table", action="store_const", const="fn", help="P(|T| = n)")
    for name in extra:
        g.add_argument(f"--{name}", dest="table", action="store_const", const=name)
    p.add_argument("--k", type=_nonneg_int, help="largest k reported")
    p.add_argument("--lmax", type=_nonneg_int)
    p.add_argument("--mmax", type=_nonneg_int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwtrees", description="Conditioned Galton-Watson tree statistics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample trees as depth-first outdegree sequences")
    _common(p)
    p.add_argument("--n", type=_positive_int, help="condition on n vertices (omit for the unconditioned tree)")
    p.add_argument("--reps", type=_positive_int, help="number of trees (default 1)")
    p.add_argument("--size-cap", type=_positive_int, default=10**7)

    p = sub.add_parser("exact", help="exact means from the generating-function engine")
    _common(p)
    _sizes_args(p)
    _table_args(p)

    p = sub.add_parser("oracle", help="exact means by enumerating every tree (n <= 12)")
    _common(p)
    _sizes_args(p)
    _table_args(p, extra=("weights",))

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    _common(p)
    p.add_argument("--eta", help="displacement law: uniform_pm1 | uniform_3 | custom:j=w,...")
    _sizes_args(p)
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--k-list", type=_int_list, metavar="K1,K2,...")
    p.add_argument("--lmax", type=_nonneg_int)
    p.add_argument("--mmax", type=_nonneg_int)
    p.add_argument("--reps", type=_positive_int)
    p.add_argument("--beta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--grid", type=_positive_int)
    p.add_argument("--z", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--pair", dest="pairs", action="append", metavar="OFFSPRING/ETA",
                   help="law pair for the universality suite (repeatable)")

    p = sub.add_parser("profile", help="vertical profiles and the characteristic-function statistic")
    _common(p)
    p.add_argument("kind", nargs="?", choices=("vertical", "normalized", "psi"), default="vertical")
    p.add_argument("--eta", default="uniform_3")
    _sizes_args(p)
    p.add_argument("--reps", type=_positive_int)
    p.add_argument("--grid", type=_positive_int)
    p.add_argument("--xmax", type=float, default=3.0)
    return parser


def parse_config(argv: Sequence[str] | None) -> tuple[RunConfig, set[str]]:
    """Parse arguments; also returns the names of options that were given a value."""
    ns = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(ns).items() if v is not None}
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    return RunConfig(**{k: v for k, v in values.items() if k in fields}), set(values)


def run(cfg: RunConfig, explicit: set[str] | None = None, stderr=None) -> int:
    """Execute one command; returns the process exit status."""
    stderr = sys.stderr if stderr is None else stderr
    explicit = set() if explicit is None else explicit
    result: SuiteResult | None = None
    try:
        if cfg.command == "sample":
            report = cmd_sample(cfg)
        elif cfg.command == "exact":
            report = cmd_exact(cfg)
        elif cfg.command == "oracle":
            report = cmd_oracle(cfg)
        elif cfg.command == "verify":
            report, result = cmd_verify(cfg, explicit)
        elif cfg.command == "profile":
            report = cmd_profile(cfg)
        else:
            raise UsageError(f"unknown command {cfg.command!r}")
    except (TreeTruncated, RejectionLimit) as exc:
        print(json.dumps({"command": cfg.command, "check": type(exc).__name__, "observed": str(exc)}), file=stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"gwtrees: error: {exc}", file=stderr)
        return EXIT_USAGE
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = render(cfg, report, stamp)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if result is None:
        return EXIT_OK
    for c in result.failures:
        print(json.dumps(c.record()), file=stderr)
    verdict = "PASS" if result.passed else "FAIL"
    print(f"{verdict} {result.suite}: {len(result.checks) - len(result.failures)}/{len(result.checks)} checks", file=stderr)
    return EXIT_OK if result.passed else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg, explicit = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg, explicit)


if __name__ == "__main__":
    sys.exit(main())
