import csv
import json
import math

import pytest

from ionpair import cli, gates
from ionpair.config import CONFIG_ENV, ConfigError, validate
from ionpair.grover import GroverTrace, verify_trace

import oracles


@pytest.fixture(autouse=True)
def _no_env_config(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- grover -------------------------------------------------------------------------

def test_grover_marked_11_writes_trace(tmp_path, capsys):
    out_path = tmp_path / "trace.json"
    code, out, _ = run(capsys, "grover", "--marked", "11", "--out", str(out_path))
    assert code == 0
    assert "success=1.000000" in out
    trace = GroverTrace.from_dict(json.loads(out_path.read_text()))
    assert verify_trace(trace).passed
    assert [s.gate for s in trace.steps] == ["prepare", "W", "P1", "D"]


def test_grover_marked_00(capsys):
    code, out, _ = run(capsys, "grover", "--marked", "00")
    assert code == 0 and "success=1.000000" in out


def test_grover_bare_quarter_period(capsys):
    code, out, _ = run(
        capsys, "grover", "--marked", "11", "--encoding", "bare", "--delay-after-prep", "0.25period"
    )
    assert code == 0
    success = float(out.split("success=")[1].split()[0])
    assert success == pytest.approx(oracles.bare_success("|11>", math.pi / 2), abs=1e-6)
    assert success < 1


def test_grover_physical_prints_leakage(capsys):
    code, out, _ = run(capsys, "grover", "--level", "physical", "--delay-after-oracle", "0.3")
    assert code == 0 and "leakage=0.000000" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["grover", "--marked", "22"],
        ["grover", "--oracle-mode", "measured"],
        ["grover", "--delay-after-prep", "soon"],
        ["grover", "--level", "quantum"],
        ["gates", "dump", "Q"],
        ["gates", "dump", "U"],
        ["bench", "dephasing", "--trials", "5"],
    ],
)
def test_bad_usage_exits_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(cli.main(argv))
    assert exc.value.code == 2
    capsys.readouterr()


def test_refuses_to_overwrite(tmp_path, capsys):
    target = tmp_path / "mine.json"
    target.write_text("keep me")
    code, _, err = run(capsys, "grover", "--out", str(target))
    assert code == 2 and "exists" in err
    assert target.read_text() == "keep me"
    code, _, _ = run(capsys, "grover", "--out", str(target), "--force")
    assert code == 0 and target.read_text() != "keep me"


# -- gates ---------------------------------------------------------------------------

def test_gates_dump_w(capsys):
    code, out, _ = run(capsys, "gates", "dump", "W")
    assert code == 0
    assert "[  1/2   i/2   i/2  -1/2 ]" in out
    matrix = json.loads(out.strip().splitlines()[-1])
    assert matrix[0][1] == [0.0, 0.5]


def test_gates_verify(capsys):
    code, out, _ = run(capsys, "gates", "verify")
    assert code == 0
    assert "12/12 identities pass" in out


def test_gates_dump_u_zero_is_identity(capsys):
    code, out, _ = run(capsys, "gates", "dump", "U", "--theta", "0")
    assert code == 0
    assert "[ 1  0 ]" in out and "[ 0  1 ]" in out


def test_gates_dump_u_symbolic_angle(capsys):
    code, out, _ = run(capsys, "gates", "dump", "U", "--theta", "7pi/4")
    assert "i/sqrt2" in out


def test_broken_catalog_exits_3(monkeypatch, capsys):
    def broken():
        raise gates.CatalogError("W is not unitary")

    monkeypatch.setattr(gates, "catalog", broken)
    code, _, err = run(capsys, "gates", "verify")
    assert code == 3 and "internal error" in err


# -- bench -----------------------------------------------------------------------------

def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bench_collective_grid(tmp_path, capsys):
    code, _, _ = run(
        capsys, "bench", "dephasing", "--kind", "collective", "--sigma-grid", "0:2:9",
        "--trials", "1000", "--seed", "7", "--out-dir", str(tmp_path),
    )
    assert code == 0
    rows = read_csv(tmp_path / "bench-collective-dephasing.csv")
    assert [float(r["param"]) for r in rows] == pytest.approx([0.25 * k for k in range(9)])
    assert all(abs(float(r["mean"]) - 1) <= 1e-12 for r in rows)
    assert list(rows[0]) == ["param", "mean", "stderr", "trials", "seed"]


@pytest.mark.slow
def test_bench_independent_sigma_one(tmp_path, capsys):
    code, _, _ = run(
        capsys, "bench", "dephasing", "--kind", "independent", "--sigma-grid", "1",
        "--trials", "100000", "--seed", "7", "--out-dir", str(tmp_path),
    )
    assert code == 0
    (row,) = read_csv(tmp_path / "bench-independent-dephasing.csv")
    target = (1 + math.exp(-1)) / 2
    assert abs(float(row["mean"]) - target) <= 3 * float(row["stderr"])


def test_bench_delay_pair_is_flat(tmp_path, capsys):
    code, _, _ = run(capsys, "bench", "delay", "--encoding", "pair", "--grid", "16", "--out-dir", str(tmp_path))
    assert code == 0
    rows = read_csv(tmp_path / "bench-delay-pair.csv")
    assert len(rows) == 16
    assert all(abs(float(r["mean"]) - 1) <= 1e-12 for r in rows)


def test_bench_replay_is_byte_identical(tmp_path, capsys):
    first, second = tmp_path / "a", tmp_path / "b"
    run(capsys, "bench", "oracle", "--trials", "200", "--seed", "5", "--out-dir", str(first))
    code, _, _ = run(capsys, "bench", "--config", str(first / "bench-oracle-modes.json"), "--out-dir", str(second))
    assert code == 0
    for name in ("bench-oracle-modes.csv", "bench-oracle-modes.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_bench_config_from_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "delay", "encoding": "bare", "delay_grid": [0.0, 0.0157079632679]}))
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    code, _, _ = run(capsys, "bench", "--out-dir", str(tmp_path / "o"))
    assert code == 0
    rows = read_csv(tmp_path / "o" / "bench-delay-bare.csv")
    assert float(rows[1]["mean"]) == pytest.approx(0.25, abs=1e-9)


def test_bench_invalid_config_lists_every_problem(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"params": {"nu": 1, "delta": 2}, "colour": "red", "trials": 3}))
    code, _, err = run(capsys, "bench", "--config", str(cfg), "--out-dir", str(tmp_path))
    assert code == 2
    assert "unknown keys: colour" in err
    assert "nu must exceed" in err
    assert "trials must be at least 100" in err
    assert not list(tmp_path.glob("bench-*"))


# -- config and validate -------------------------------------------------------------------

def test_validate_command(tmp_path, capsys):
    cfg = tmp_path / "ok.json"
    cfg.write_text(json.dumps({"params": {"eta": 0.5}, "kind": "independent"}))
    code, out, err = run(capsys, "validate", str(cfg))
    assert code == 0 and "config OK" in out
    assert "Lamb-Dicke" in err
    assert json.loads(out.rsplit("config OK", 1)[0])["kind"] == "independent-dephasing"


def test_validate_missing_file(capsys):
    code, _, _ = run(capsys, "validate", "/nonexistent/cfg.json")
    assert code == 2


def test_config_rejects_unknown_params():
    with pytest.raises(ConfigError) as exc:
        validate({"params": {"zeta": 1}})
    assert "unknown params: zeta" in exc.value.problems


def test_defaults_are_labelled_illustrative(capsys):
    with pytest.raises(SystemExit):
        cli.main(["grover", "--help"])
    assert "illustrative" in capsys.readouterr().out


@pytest.mark.parametrize("text,expected", [("0:1:3", [0.0, 0.5, 1.0]), ("1", [1.0]), ("0.1,1,3", [0.1, 1.0, 3.0])])
def test_parse_grid(text, expected):
    assert cli.parse_grid(text) == pytest.approx(expected)
