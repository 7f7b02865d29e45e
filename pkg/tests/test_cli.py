import csv
import io
import json
from math import pi, sqrt

import numpy as np
import pytest

from spinbranch.cli import main
from spinbranch.config import ConfigError, parse_config, resolve_time

FIG1 = {"family": "star", "m": 2, "p": 3, "l": 1}


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return str(path)


def _run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_generate_fig1(tmp_path, capsys):
    code, out, _ = _run(["generate", "--config", _write(tmp_path, {"topology": FIG1, "alpha": 1.0})], capsys)
    assert code == 0
    doc = json.loads(out)
    edges = {(e["u"], e["v"]): e["coupling"] for e in doc["edges"]}
    assert edges[(0, 1)] == pytest.approx(sqrt(2), abs=1e-15)
    assert [edges[(1, k)] for k in (2, 3, 4)] == pytest.approx([sqrt(2 / 3)] * 3, abs=1e-15)
    assert doc["leaves"] == [2, 3, 4]
    assert doc["leaf_weights"] == pytest.approx([1 / sqrt(3)] * 3)
    assert doc["equivalent_length"] == 3


def test_generate_chain(tmp_path, capsys):
    code, out, _ = _run(["generate", "--config", _write(tmp_path, {"topology": {"family": "chain", "N": 4}, "alpha": 1})], capsys)
    assert code == 0
    assert [e["coupling"] for e in json.loads(out)["edges"]] == pytest.approx([sqrt(3), 2, sqrt(3)], abs=1e-15)


def test_generate_tree_to_file(tmp_path, capsys):
    spec = {"segment": 2, "children": [{"segment": 2}, {"segment": 1, "children": [{"segment": 1}, {"segment": 1}]}]}
    target = tmp_path / "net.json"
    code, out, _ = _run(["generate", "--config", _write(tmp_path, {"topology": {"family": "tree", "spec": spec}, "alpha": 1}), "--out", str(target)], capsys)
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["node_count"] == 7
    assert doc["leaf_weights"] == pytest.approx([1 / sqrt(2), 0.5, 0.5])


@pytest.mark.parametrize(
    "cfg,field",
    [
        ({"topology": {"family": "tree", "spec": {"segment": 2, "children": [{"segment": 1}]}}, "alpha": 1}, "topology.spec.children"),
        ({"topology": {"family": "tree", "spec": {"segment": 1, "children": [{"segment": 1}, {"segment": 2}]}}, "alpha": 1}, "topology"),
        ({"topology": FIG1, "alpha": 1, "bogus": 1}, "bogus"),
        ({"topology": {**FIG1, "q": 1}, "alpha": 1}, "topology.q"),
        ({"topology": {**FIG1, "p": 1}, "alpha": 1}, "topology.p"),
        ({"topology": FIG1, "alpha": 0}, "alpha"),
        ({"topology": FIG1}, "alpha"),
        ({"topology": {"family": "ring", "N": 3}, "alpha": 1}, "topology.family"),
        ({"topology": FIG1, "alpha": 1, "schedule": [{"time": "soon", "leaf": 0, "phase": 1}]}, "schedule[0].time"),
        ({"topology": FIG1, "alpha": 1, "schedule": [{"time": 1, "leaf": 3, "phase": 1}]}, "schedule[0].leaf"),
        ({"topology": FIG1, "alpha": 1, "schedule": [{"time": 1, "scheme": "pi-half"}]}, "schedule[0].scheme"),
        ({"topology": FIG1, "alpha": 1, "measurements": [{"time": 1, "node": 9}]}, "measurements[0].node"),
        ({"topology": FIG1, "alpha": 1, "measurements": [{"time": 1, "node": 2, "forced": 2}]}, "measurements[0].forced"),
        ({"topology": FIG1, "alpha": 1, "outputs": {"fidelity": ["GHZ"]}}, "outputs.fidelity[0]"),
        ({"topology": {"family": "chain", "N": 4}, "alpha": 1, "outputs": {"fidelity": ["W+"]}}, "outputs.fidelity[0]"),
        ({"topology": FIG1, "alpha": 1, "samples": {"t_start": 2, "t_end": 1, "steps": 3}}, "samples.t_end"),
        ({"topology": FIG1, "alpha": 1, "seed": -1}, "seed"),
    ],
)
def test_invalid_configs_exit_2(tmp_path, capsys, cfg, field):
    for cmd in ("generate", "evolve"):
        code, out, err = _run([cmd, "--config", _write(tmp_path, cfg)], capsys)
        assert code == 2
        lines = err.strip().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["field"] == field


def test_bad_json_and_missing_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    code, _, err = _run(["evolve", "--config", str(path)], capsys)
    assert code == 2 and json.loads(err)["field"] == "config"
    code, _, err = _run(["evolve", "--config", str(tmp_path / "nope.json")], capsys)
    assert code == 2 and json.loads(err)["field"] == "config"
    code, _, err = _run(["evolve"], capsys)
    assert code == 2 and json.loads(err)["field"] == "--config"


def test_bad_arguments_single_line(capsys):
    code, _, err = _run(["transmogrify"], capsys)
    assert code == 2
    assert len(err.strip().splitlines()) == 1
    assert json.loads(err)["error"] == "invalid-input"


def test_impossible_forced_branch_exits_2(tmp_path, capsys):
    cfg = {"topology": FIG1, "alpha": 1, "measurements": [{"time": 0, "node": 3, "forced": 1}], "samples": {"t_start": 0, "t_end": 1, "steps": 2}}
    code, _, err = _run(["evolve", "--config", _write(tmp_path, cfg)], capsys)
    assert code == 2 and len(err.strip().splitlines()) == 1


def test_resolve_time():
    assert resolve_time("t_star", 2.0, "x") == pi / 4
    assert resolve_time("t_star+pi/alpha", 2.0, "x") == pytest.approx(pi / 4 + pi / 2)
    assert resolve_time("t_star + 3*pi/alpha", 1.0, "x") == pytest.approx(pi / 2 + 3 * pi)
    assert resolve_time("0.5*pi", 1.0, "x") == pytest.approx(pi / 2)
    assert resolve_time(1.25, 1.0, "x") == 1.25
    assert resolve_time("2+t_star", 1.0, "x") == pytest.approx(2 + pi / 2)
    for bad in ("t_star*2", "pi-1", "exp(1)", True, None, -1):
        with pytest.raises(ConfigError):
            resolve_time(bad, 1.0, "x")


def test_schedule_expansion():
    cfg = parse_config({"topology": FIG1, "alpha": 1, "schedule": [{"time": "t_star", "scheme": "roots"}, {"time": 0.1, "node": 1, "phase": 0.3}]})
    assert [ev.time for ev in cfg.events] == [0.1, pi / 2, pi / 2, pi / 2]
    assert [ev.node for ev in cfg.events] == [1, 2, 3, 4]
    assert [ev.phase for ev in cfg.events[1:]] == pytest.approx([0, 2 * pi / 3, 4 * pi / 3])


def test_evolve_fidelity_peak(tmp_path, capsys):
    cfg = {"topology": FIG1, "alpha": 1, "samples": {"t_start": 0, "t_end": "pi", "steps": 201}, "outputs": {"populations": False, "fidelity": ["W0"]}}
    code, out, _ = _run(["evolve", "--config", _write(tmp_path, cfg)], capsys)
    assert code == 0
    rows = _rows(out)
    assert list(rows[0]) == ["time", "fid_W0"]
    f = np.array([float(r["fid_W0"]) for r in rows])
    t = np.array([float(r["time"]) for r in rows])
    assert t[np.argmax(f)] == pytest.approx(pi / 2, abs=1e-12)
    assert abs(1 - f.max()) < 1e-9


def test_evolve_freeze_schedule(tmp_path, capsys):
    cfg = {
        "topology": FIG1,
        "alpha": 1,
        "schedule": [{"time": "t_star", "scheme": "roots"}],
        "samples": {"t_start": "t_star", "t_end": "t_star+10*pi/alpha", "steps": 301},
    }
    code, out, _ = _run(["evolve", "--config", _write(tmp_path, cfg)], capsys)
    assert code == 0
    pops = np.array([[float(r[f"pop_{k}"]) for k in (2, 3, 4)] for r in _rows(out)])
    assert np.max(np.abs(pops - 1 / 3)) < 1e-9


def test_evolve_empty_grid(tmp_path, capsys):
    cfg = {"topology": FIG1, "alpha": 1, "samples": {"t_start": 0, "t_end": 1, "steps": 0}, "outputs": {"amplitudes": True}}
    code, out, _ = _run(["evolve", "--config", _write(tmp_path, cfg)], capsys)
    assert code == 0
    assert out.splitlines() == ["time,pop_0,pop_1,pop_2,pop_3,pop_4," + ",".join(f"re_{k},im_{k}" for k in range(5))]


def test_evolve_amplitude_columns(tmp_path, capsys):
    cfg = {"topology": FIG1, "alpha": 1, "samples": {"t_start": "t_star", "t_end": "t_star", "steps": 1}, "outputs": {"populations": False, "amplitudes": True}}
    code, out, _ = _run(["evolve", "--config", _write(tmp_path, cfg)], capsys)
    row = _rows(out)[0]
    for k in (2, 3, 4):
        assert float(row[f"re_{k}"]) == pytest.approx(-1 / sqrt(3), abs=1e-12)
        assert abs(float(row[f"im_{k}"])) < 1e-12
    # 17 significant digits round-trip exactly
    assert all(float(v) == float(format(float(v), ".17g")) for v in row.values())


def test_seed_override_and_determinism(tmp_path, capsys):
    cfg = {
        "topology": FIG1,
        "alpha": 1,
        "measurements": [{"time": "t_star", "leaf": 2}],
        "samples": {"t_start": 0, "t_end": "pi", "steps": 9},
        "seed": 1,
    }
    path = _write(tmp_path, cfg)
    outs = {}
    for seed in range(12):
        outs[seed] = _run(["evolve", "--config", path, "--seed", str(seed)], capsys)[1]
        assert outs[seed] == _run(["evolve", "--config", path, "--seed", str(seed)], capsys)[1]
    # different seeds reach both measurement branches
    vac = {_rows(o)[-1]["vacuum"] for o in outs.values()}
    assert vac == {"0", "1"}


def test_verify_passes(capsys):
    code, out, _ = _run(["verify"], capsys)
    lines = out.strip().splitlines()
    assert code == 0
    assert all(l.startswith("PASS") for l in lines[:-1])
    summary = json.loads(lines[-1])
    assert summary["passed"]
    assert all("residual" in c for c in summary["checks"])


def test_verify_detects_perturbed_coupling(capsys):
    code, out, _ = _run(["verify", "--perturb-coupling", "0.01"], capsys)
    assert code == 1
    assert out.splitlines()[0].startswith("FAIL mirror_transfer")


def test_determinism_across_processes(tmp_path):
    import subprocess
    import sys

    cfg = {
        "topology": {"family": "tree", "spec": {"segment": 2, "children": [{"segment": 2}, {"segment": 1, "children": [{"segment": 1}, {"segment": 1}]}]}},
        "alpha": 0.8,
        "schedule": [{"time": "t_star", "leaf": 0, "phase": 1.1}],
        "measurements": [{"time": "t_star+pi/alpha", "leaf": 2}],
        "samples": {"t_start": 0, "t_end": "t_star+2*pi/alpha", "steps": 100},
        "outputs": {"amplitudes": True, "fidelity": ["distributed"]},
        "seed": 5,
    }
    path = _write(tmp_path, cfg)
    runs = [
        subprocess.run([sys.executable, "-m", "spinbranch", "evolve", "--config", path], capture_output=True, check=True).stdout
        for _ in range(2)
    ]
    assert runs[0] == runs[1] and runs[0].count(b"\n") == 101
