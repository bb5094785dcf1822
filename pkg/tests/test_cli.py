import json
import shutil
from pathlib import Path

import pytest

from rieszint import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("RIESZINT_OUTPUT_DIR", str(tmp_path))
    return tmp_path


def test_run_identity_certified(outdir, capsys):
    code, out = _run(["run", str(CONFIGS / "identity.ini")], capsys)
    assert code == 0 and out.out.startswith("certified")
    doc = json.loads((outdir / "identity.json").read_text())
    assert abs(float(doc["value"][0]) - 0.5) <= 1e-6
    assert "wall_time" not in doc
    rows = (outdir / "identity.csv").read_text().splitlines()
    assert rows[0] == "step,n_cells,v_0,oscillation,bound"
    assert len(rows) == 1 + doc["steps"]


def test_run_dyadic_random_tags_diverges(outdir, capsys):
    code, _ = _run(["run", str(CONFIGS / "dyadic_random_tags.ini")], capsys)
    assert code == 3


def test_run_inconclusive(outdir, capsys, tmp_path):
    cfg = tmp_path / "slow.ini"
    cfg.write_text("[function]\nexpr = x\n\n[integrator]\nname = sion\ntruncation = linear\n")
    code, out = _run(["run", str(cfg)], capsys)
    assert code == 2 and out.out.startswith("inconclusive")


def test_run_bad_config_exits_one(outdir, capsys, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[function]\nexpr = x +\n")
    code, out = _run(["run", str(cfg)], capsys)
    assert code == 1 and out.err.startswith("error:")
    assert _run(["run", str(tmp_path / "missing.ini")], capsys)[0] == 1


def test_run_overrides_and_timing(outdir, capsys):
    code, _ = _run(["run", str(CONFIGS / "identity.ini"), "--tol", "1e-3", "--timing", "--trace", str(outdir / "t.csv")], capsys)
    assert code == 0
    doc = json.loads((outdir / "identity.json").read_text())
    assert "wall_time" in doc and (outdir / "t.csv").exists()


def test_run_is_deterministic(tmp_path, monkeypatch, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        monkeypatch.setenv("RIESZINT_OUTPUT_DIR", str(d))
        _run(["run", str(CONFIGS / "s_star.ini")], capsys)
        outs.append([p.read_bytes() for p in sorted(d.iterdir())])
    assert outs[0] == outs[1] and len(outs[0]) == 2


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.ini")))
def test_shipped_configs_run(name, outdir, capsys):
    code, _ = _run(["run", str(CONFIGS / name)], capsys)
    assert code in (0, 2, 3)


def test_verify_summability(outdir, capsys):
    code, out = _run(["verify", "summability", "--seed", "3"], capsys)
    assert code == 0
    assert all(line.startswith("PASS") for line in out.out.splitlines())
    rep = json.loads((outdir / "verify-summability.json").read_text())
    assert rep["passed"] and rep["seed"] == 3


def test_verify_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _run(["verify", "laws", "--seed", "5", "--trace", str(a)], capsys)
    _run(["verify", "laws", "--seed", "5", "--trace", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_verify_unknown_suite(outdir, capsys):
    code, out = _run(["verify", "nope"], capsys)
    assert code == 1 and "unknown suite" in out.err
