import json
import subprocess
import sys

import numpy as np
import pytest

from specshield import SimulationConfig, analyze_trajectory, filter_update, run, svd
from specshield.cli import main
from specshield.formats import read_matrix, read_records, write_matrix


@pytest.fixture
def workdir(tmp_path, rng):
    w = rng.standard_normal((16, 12)) * 2.0
    delta = rng.standard_normal((16, 12)) * 0.1
    write_matrix(tmp_path / "base.sgm", w)
    write_matrix(tmp_path / "delta.sgm", delta)
    return tmp_path, w, delta


def config_file(tmp_path, **overrides):
    params = dict(
        seed=11,
        rounds=3,
        edits_per_round=4,
        tau=0.10,
        rows=18,
        cols=14,
        edit_scale=0.03,
        probe_count=6,
    )
    params.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(params))
    return path


def test_filter_matches_library(workdir):
    tmp, w, delta = workdir
    code = main([
        "filter", "--base", str(tmp / "base.sgm"), "--delta", str(tmp / "delta.sgm"),
        "--tau", "0.5", "--out", str(tmp / "safe.sgm"), "--report", str(tmp / "report.jsonl"),
    ])
    assert code == 0
    expected = filter_update(w, delta, 0.5)
    got = read_matrix(tmp / "safe.sgm")
    assert np.linalg.norm(got - expected.safe_delta) < 1e-10
    report = read_records(tmp / "report.jsonl")[0]
    assert report["kind"] == "filter"
    assert report["k_used"] == expected.k_used
    assert report["removed_energy_fraction"] == pytest.approx(expected.removed_energy_fraction, abs=1e-15)


def test_filter_tau_zero_payload_bit_exact(workdir):
    tmp, _, _ = workdir
    code = main([
        "filter", "--base", str(tmp / "base.sgm"), "--delta", str(tmp / "delta.sgm"),
        "--tau", "0", "--out", str(tmp / "safe.sgm"),
    ])
    assert code == 0
    assert (tmp / "safe.sgm").read_bytes() == (tmp / "delta.sgm").read_bytes()


def test_filter_bad_magic_exits_2(workdir, capsys):
    tmp, _, _ = workdir
    bad = tmp / "garbage.sgm"
    bad.write_bytes(b"JUNKJUNKJUNKJUNKJUNKJUNK")
    code = main([
        "filter", "--base", str(bad), "--delta", str(tmp / "delta.sgm"),
        "--tau", "0.1", "--out", str(tmp / "safe.sgm"),
    ])
    assert code == 2
    err = capsys.readouterr().err
    assert "garbage.sgm" in err
    assert err.count("\n") == 1


def test_filter_shape_mismatch_exits_2(workdir, rng):
    tmp, _, _ = workdir
    write_matrix(tmp / "wrong.sgm", rng.standard_normal((4, 4)))
    code = main([
        "filter", "--base", str(tmp / "base.sgm"), "--delta", str(tmp / "wrong.sgm"),
        "--tau", "0.1", "--out", str(tmp / "safe.sgm"),
    ])
    assert code == 2


def test_analyze_baseline_only(workdir):
    tmp, w, _ = workdir
    code = main([
        "analyze", "--baseline", str(tmp / "base.sgm"), "--snapshots", str(tmp / "base.sgm"),
        "--out", str(tmp / "metrics.jsonl"),
    ])
    assert code == 0
    records = read_records(tmp / "metrics.jsonl")
    assert len(records) == 1
    assert records[0]["ls"] == 1.0
    assert records[0]["snapshot"] == "base.sgm"


def test_analyze_matches_in_process(workdir, rng):
    tmp, w, _ = workdir
    snaps = []
    for i in range(3):
        snap = w + 0.05 * (i + 1) * rng.standard_normal(w.shape)
        write_matrix(tmp / f"snap_{i}.sgm", snap)
        snaps.append(snap)
    code = main([
        "analyze", "--baseline", str(tmp / "base.sgm"), "--snapshots", str(tmp / "snap_*.sgm"),
        "--energy-fraction", "0.2", "--tracked", "4", "--out", str(tmp / "metrics.jsonl"),
    ])
    assert code == 0
    records = read_records(tmp / "metrics.jsonl")
    reports = analyze_trajectory([w, *snaps], 0.2, tracked_count=4)
    assert [r["ls"] for r in records] == [r.ls for r in reports]
    assert [r["frobenius_distance"] for r in records] == [r.frobenius_distance for r in reports]


def test_analyze_shape_mismatch_exits_2(workdir, rng):
    tmp, _, _ = workdir
    write_matrix(tmp / "snap_bad.sgm", rng.standard_normal((3, 3)))
    code = main([
        "analyze", "--baseline", str(tmp / "base.sgm"), "--snapshots", str(tmp / "snap_bad.sgm"),
        "--out", str(tmp / "metrics.jsonl"),
    ])
    assert code == 2


def test_perturb_relative_epsilon_and_determinism(workdir, capsys):
    tmp, w, _ = workdir
    args = [
        "perturb", "--base", str(tmp / "base.sgm"), "--side", "input", "--group", "1/4",
        "--epsilon", "0.05%", "--seed", "9", "--out", str(tmp / "pert.sgm"),
    ]
    assert main(args) == 0
    report = json.loads(capsys.readouterr().out)
    want = 0.05 * np.linalg.norm(w)
    assert report["achieved_norm"] == pytest.approx(want, rel=1e-12)
    first = (tmp / "pert.sgm").read_bytes()
    assert main(args) == 0
    assert (tmp / "pert.sgm").read_bytes() == first
    got = read_matrix(tmp / "pert.sgm")
    assert np.abs(np.linalg.norm(got - w) - want) / want < 1e-12


def test_perturb_absolute_epsilon(workdir):
    tmp, w, _ = workdir
    assert main([
        "perturb", "--base", str(tmp / "base.sgm"), "--side", "output", "--group", "4/4",
        "--epsilon", "0.25", "--seed", "3", "--out", str(tmp / "pert.sgm"),
    ]) == 0
    got = read_matrix(tmp / "pert.sgm")
    assert abs(np.linalg.norm(got - w) - 0.25) < 1e-12


def test_perturb_bad_group_exits_2(workdir):
    tmp, _, _ = workdir
    assert main([
        "perturb", "--base", str(tmp / "base.sgm"), "--side", "input", "--group", "5/4",
        "--epsilon", "0.1", "--seed", "1", "--out", str(tmp / "pert.sgm"),
    ]) == 2


def test_simulate_deterministic_and_matches_run(tmp_path):
    cfg_path = config_file(tmp_path)
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()

    records = [r for r in read_records(out1) if r["kind"] == "round"]
    result = run(SimulationConfig.from_dict(json.loads(cfg_path.read_text())))
    assert [r["ls"] for r in records] == [r.ls for r in result.reports]
    assert [r["probe_fidelity"] for r in records] == result.probe_fidelity
    assert [r["edit_retention"] for r in records] == result.edit_retention


def test_simulate_snapshot_dumps(tmp_path):
    cfg_path = config_file(tmp_path, rounds=2)
    snap_dir = tmp_path / "snaps"
    assert main([
        "simulate", "--config", str(cfg_path), "--out", str(tmp_path / "r.jsonl"),
        "--snapshots", str(snap_dir),
    ]) == 0
    files = sorted(p.name for p in snap_dir.iterdir())
    assert files == ["round_0001.sgm", "round_0002.sgm"]
    result = run(SimulationConfig.from_dict(json.loads(cfg_path.read_text())))
    last = read_matrix(snap_dir / "round_0002.sgm")
    assert np.array_equal(last, result.snapshots[-1])


def test_simulate_rejects_bad_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "r.jsonl")]) == 2
    path.write_text(json.dumps({"seed": 1, "rounds": 0, "edits_per_round": 1, "tau": 0.1, "rows": 4, "cols": 4}))
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "r.jsonl")]) == 2


def test_sweep_tau_dedupes_and_summarizes(tmp_path, capsys):
    cfg_path = config_file(tmp_path, rounds=2)
    out = tmp_path / "sweep.jsonl"
    assert main(["sweep-tau", "--config", str(cfg_path), "--taus", "0.1,0.2,0.1", "--out", str(out)]) == 0
    assert "duplicate tau" in capsys.readouterr().err
    records = read_records(out)
    assert [r["tau"] for r in records] == [0.1, 0.2]
    assert all(r["kind"] == "tau_summary" for r in records)


def test_sweep_tau_zero_matches_unfiltered(tmp_path):
    cfg_path = config_file(tmp_path, rounds=2, filter_enabled=False)
    out = tmp_path / "sweep.jsonl"
    assert main(["sweep-tau", "--config", str(cfg_path), "--taus", "0", "--out", str(out)]) == 0
    summary = read_records(out)[0]
    result = run(SimulationConfig.from_dict({**json.loads(cfg_path.read_text()), "filter_enabled": False}))
    assert summary["final_ls"] == result.reports[-1].ls
    assert summary["final_probe_fidelity"] == result.probe_fidelity[-1]


def test_sweep_tau_validates_range(tmp_path):
    cfg_path = config_file(tmp_path)
    assert main(["sweep-tau", "--config", str(cfg_path), "--taus", "0.1,1.0", "--out", str(tmp_path / "s.jsonl")]) == 2


def test_dominant_band_perturbation_hurts_most_via_cli(tmp_path, capsys):
    from specshield import power_law_spectrum, synthesize_base

    w = synthesize_base((48, 36), power_law_spectrum(36, 1.0), seed=77)
    write_matrix(tmp_path / "base.sgm", w)
    ls = {}
    for g in (1, 10):
        assert main([
            "perturb", "--base", str(tmp_path / "base.sgm"), "--side", "input",
            "--group", f"{g}/10", "--epsilon", "0.1%", "--seed", "41",
            "--out", str(tmp_path / f"pert{g}.sgm"),
        ]) == 0
        assert main([
            "analyze", "--baseline", str(tmp_path / "base.sgm"),
            "--snapshots", str(tmp_path / f"pert{g}.sgm"),
            "--out", str(tmp_path / f"ls{g}.jsonl"),
        ]) == 0
        ls[g] = read_records(tmp_path / f"ls{g}.jsonl")[0]["ls"]
    capsys.readouterr()
    assert 1.0 - ls[1] > 1.0 - ls[10]


def test_simulate_failure_flushes_partial_records(tmp_path, monkeypatch, capsys):
    import specshield.cli as cli_mod
    from specshield import SimulationConfig

    cfg_path = config_file(tmp_path)
    good = run(SimulationConfig.from_dict(json.loads(cfg_path.read_text())))
    crippled = type(good)(
        config=good.config,
        reports=good.reports[:2],
        probe_fidelity=good.probe_fidelity[:2],
        edit_retention=good.edit_retention[:2],
        side_condition_ok=good.side_condition_ok[:2],
        snapshots=good.snapshots[:2],
        failed_round=3,
        error="SVD did not converge for 18x14 matrix",
    )
    monkeypatch.setattr(cli_mod, "run", lambda config: crippled)
    out = tmp_path / "partial.jsonl"
    code = main(["simulate", "--config", str(cfg_path), "--out", str(out)])
    assert code == 3
    assert "round 3" in capsys.readouterr().err
    records = read_records(out)
    assert [r["kind"] for r in records] == ["config", "round", "round", "error"]
    assert records[-1]["round"] == 3


def test_numerical_failure_maps_to_exit_3(workdir, monkeypatch, capsys):
    from specshield.exceptions import NumericalError

    tmp, _, _ = workdir

    def explode(*args, **kwargs):
        raise NumericalError("SVD did not converge for 16x12 matrix")

    monkeypatch.setattr("specshield.cli.filter_update", explode)
    code = main([
        "filter", "--base", str(tmp / "base.sgm"), "--delta", str(tmp / "delta.sgm"),
        "--tau", "0.1", "--out", str(tmp / "safe.sgm"),
    ])
    assert code == 3
    assert "did not converge" in capsys.readouterr().err


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "specshield", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "filter" in proc.stdout and "sweep-tau" in proc.stdout
