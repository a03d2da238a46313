import csv
import io
import json
import subprocess
import sys

import pytest

from gwtrees.cli import main
from gwtrees.trees import read_lukasiewicz_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    """CSV lines without the comment header."""
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_exact_pk_geometric_n3(capsys):
    code, out, _ = run_cli(capsys, "exact", "--offspring", "geometric", "--n", "3", "--pk")
    assert code == 0
    rows = list(csv.reader(body(out)))
    assert rows[0] == ["n", "k", "mean_P"]
    assert [tuple(map(float, r)) for r in rows[1:]] == [(3, 1, 2), (3, 2, 1)]


def test_header_embeds_config_and_seed(capsys):
    _, out, _ = run_cli(capsys, "exact", "--offspring", "poisson", "--n", "5", "--zk", "--seed", "11")
    lines = out.splitlines()
    assert lines[0].startswith("# gwtrees ")
    cfg = json.loads(lines[1].split(":", 1)[1])
    assert cfg["seed"] == 11 and cfg["offspring"] == ["poisson"]
    assert lines[2].startswith("# generated:")


def test_oracle_agrees_with_exact(capsys):
    _, a, _ = run_cli(capsys, "exact", "--offspring", "poisson", "--n-list", "4,7", "--pk")
    _, b, _ = run_cli(capsys, "oracle", "--offspring", "poisson", "--n-list", "4,7", "--pk")
    ra, rb = list(csv.reader(body(a)))[1:], list(csv.reader(body(b)))[1:]
    assert len(ra) == len(rb)
    for x, y in zip(ra, rb):
        assert x[:2] == y[:2]
        assert float(x[2]) == pytest.approx(float(y[2]), abs=1e-9)


def test_oracle_weights(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--offspring", "geometric", "--n", "3", "--weights")
    assert code == 0
    rows = list(csv.DictReader(body(out)))
    assert len(rows) == 2
    assert all(float(r["cond_prob"]) == pytest.approx(0.5) for r in rows)


def test_verify_dwass_passes(capsys):
    code, out, err = run_cli(capsys, "verify", "dwass", "--offspring", "geometric", "--lmax", "20", "--nmax", "200")
    assert code == 0
    assert "# PASS" in out and "# FAIL" not in out
    assert err.strip().endswith("checks") and err.startswith("PASS")


def test_verify_qk_small(capsys):
    code, out, _ = run_cli(capsys, "verify", "qk", "--offspring", "geometric", "--k", "3", "--reps", "20000", "--seed", "7")
    assert code == 0


def test_verify_failure_exit_and_record(capsys):
    # an impossible tolerance must fail with a machine-readable record
    code, _, err = run_cli(capsys, "verify", "meirmoon", "--offspring", "geometric", "--tol", "1e-9")
    assert code == 1
    records = [json.loads(ln) for ln in err.splitlines() if ln.startswith("{")]
    assert records and all({"suite", "check", "observed", "limit"} <= set(r) for r in records)
    assert err.splitlines()[-1].startswith("FAIL meirmoon")


@pytest.mark.parametrize(
    "argv",
    [
        ["exact", "--offspring", "binary", "--n", "4", "--pk"],
        ["exact", "--offspring", "banana", "--n", "4", "--pk"],
        ["exact", "--offspring", "geometric", "--pk"],
        ["verify", "tail", "--grid", "5"],
        ["verify", "nope"],
        ["oracle", "--offspring", "geometric", "--n", "13", "--pk"],
        ["exact", "--offspring", "geometric", "--n", "0", "--pk"],
        ["profile", "--offspring", "geometric", "--eta", "custom:0=1,1=1", "--n", "5"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    capsys.readouterr()


def test_truncation_exits_1(capsys):
    code, _, err = run_cli(capsys, "sample", "--offspring", "geometric", "--size-cap", "1", "--reps", "50")
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["check"] == "TreeTruncated"


def test_sample_round_trip(capsys):
    code, out, _ = run_cli(capsys, "sample", "--offspring", "poisson", "--n", "25", "--reps", "5", "--seed", "3")
    assert code == 0
    trees = list(read_lukasiewicz_csv(io.StringIO(out)))
    assert len(trees) == 5 and all(t.n == 25 for t in trees)


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--offspring", "geometric", "--n", "40", "--reps", "3"],
        ["profile", "psi", "--offspring", "geometric", "--n", "30", "--reps", "50", "--grid", "5"],
        ["profile", "normalized", "--offspring", "poisson", "--n", "100", "--grid", "11"],
        ["verify", "l1a", "--offspring", "geometric", "--n-list", "50,100", "--reps", "100"],
    ],
)
def test_reports_are_byte_reproducible(capsys, argv):
    _, a, _ = run_cli(capsys, *argv, "--seed", "5")
    _, b, _ = run_cli(capsys, *argv, "--seed", "5")
    strip = lambda s: [ln for ln in s.splitlines() if not ln.startswith("# generated")]
    assert strip(a) == strip(b)
    _, c, _ = run_cli(capsys, *argv, "--seed", "6")
    assert strip(a) != strip(c)


def test_json_mirrors_csv(capsys, tmp_path):
    args = ["exact", "--offspring", "geometric", "--n-list", "5,9", "--zk"]
    _, text, _ = run_cli(capsys, *args)
    out = tmp_path / "r.json"
    assert main([*args, "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    rows = list(csv.DictReader(body(text)))
    assert doc["columns"] == list(rows[0])
    assert len(doc["rows"]) == len(rows)
    for j, c in zip(doc["rows"], rows):
        assert all(float(c[k]) == pytest.approx(j[k], rel=1e-14) for k in c)
    assert doc["config"]["offspring"] == ["geometric"]


def test_profile_vertical_mass(capsys):
    _, out, _ = run_cli(capsys, "profile", "vertical", "--offspring", "geometric", "--n", "300", "--eta", "uniform_pm1")
    rows = list(csv.DictReader(body(out)))
    assert sum(int(r["count"]) for r in rows) == 300


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gwtrees", "exact", "--offspring", "geometric", "--n", "3", "--pk"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert body(proc.stdout)[1:] == ["3,1,2", "3,2,1"]
