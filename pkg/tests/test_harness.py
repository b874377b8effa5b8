import csv
import json

import numpy as np
import pytest

from zzctrl.cli import main
from zzctrl.control import SynthesisConfig
from zzctrl.exceptions import EmptyInput
from zzctrl.harness import (
    CSV_HEADER, ExperimentConfig, RunRecord, check_controllability, matrix_from_pairs, replay_final_state,
    run_batch, sample_seed, summarize,
)
from zzctrl.quantum import bell_state, sample_state, spectrum_bounds


def record(err, converged=True, iterations=10, sample_id=0):
    return RunRecord(sample_id, "mixed", 0.5, 0.5, "relative", err, iterations, converged, 0)


def small_config(tmp_path, **kw):
    synth = SynthesisConfig(max_iters=2000)
    return ExperimentConfig(**{"n_samples": 6, "output_dir": str(tmp_path), "synthesis": synth, **kw})


# -- summarize ------------------------------------------------------------------------

def test_summarize_all_zero():
    s = summarize([record(0.0, sample_id=i) for i in range(5)])
    assert s.convergence_rate == 1.0
    assert set(s.quantiles.values()) == {0.0}
    assert s.histogram_counts[0] == 5 and s.overflow == 0


def test_summarize_single_record():
    s = summarize([record(0.0312)])
    assert all(v == pytest.approx(0.0312) for v in s.quantiles.values())


def test_summarize_fixture_by_hand():
    errors = [0.0, 0.0125, 0.0225, 0.0325, 0.2]
    recs = [record(e, converged=e <= 0.05, iterations=i * 10, sample_id=i) for i, e in enumerate(errors)]
    s = summarize(recs)
    # linear interpolation on sorted errors: q at position q*(n-1)
    assert s.quantiles["q50"] == pytest.approx(0.0225)
    assert s.quantiles["q90"] == pytest.approx(0.0325 + 0.6 * (0.2 - 0.0325))
    assert s.quantiles["q99"] == pytest.approx(0.0325 + 0.96 * (0.2 - 0.0325))
    assert s.convergence_rate == pytest.approx(0.8)
    assert s.mean_iterations == pytest.approx(20.0)
    assert s.overflow == 1
    expected = [0] * 20
    for b in (0, 2, 4, 6):
        expected[b] = 1
    assert s.histogram_counts == expected
    assert len(s.histogram_edges) == 21


def test_summarize_empty():
    with pytest.raises(EmptyInput):
        summarize([])


# -- config ------------------------------------------------------------------------------

def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n_samples=0)
    with pytest.raises(ValueError):
        ExperimentConfig(drift_magnitude=-1)
    with pytest.raises(ValueError):
        ExperimentConfig(state_kind="ghz")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_experiment_config_roundtrip():
    cfg = ExperimentConfig(n_samples=3, synthesis=SynthesisConfig(eta=0.1))
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_sample_seeds_distinct_and_stable():
    seeds = [sample_seed(7, i) for i in range(100)]
    assert len(set(seeds)) == 100
    assert seeds == [sample_seed(7, i) for i in range(100)]


# -- run_batch ---------------------------------------------------------------------------

def test_injected_maximally_mixed(tmp_path):
    recs = run_batch(small_config(tmp_path, n_samples=1), states=[np.eye(4) / 4])
    (r,) = recs
    assert r.state_kind == "injected"
    assert r.concurrence == 0.0 and abs(r.measurement) < 1e-9 and r.converged


def test_batch_outputs(tmp_path):
    cfg = small_config(tmp_path, state_kind="all")
    recs = run_batch(cfg)
    assert [r.sample_id for r in recs] == list(range(6))
    assert [r.state_kind for r in recs] == ["pure", "mixed", "rank2"] * 2
    with open(tmp_path / "runs.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 7
    assert all(row[-1] == "" for row in rows[1:])
    assert (tmp_path / "scatter.csv").read_text().splitlines()[0] == "concurrence,measurement"
    hist = (tmp_path / "histogram.csv").read_text().splitlines()
    assert hist[0] == "bin_left,count" and len(hist) == 22
    assert sum(int(line.split(",")[1]) for line in hist[1:]) == 6
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["n_samples"] == 6
    dump = json.loads((tmp_path / "paths" / "sample_00003.json").read_text())
    assert len(dump["slices"]) == 4 and dump["dt"] == 1.0
    for r in recs:
        b = spectrum_bounds(r.rho0)
        assert b.contains(r.measurement, 1e-9)
        assert r.error >= 0 and 0 <= r.concurrence <= 1 and -1 <= r.measurement <= 1
        if r.converged:
            assert abs(r.measurement - r.concurrence) <= 0.05 * max(r.concurrence, 0.05)


def test_batch_deterministic_across_worker_counts(tmp_path):
    a = run_batch(small_config(tmp_path / "a", workers=1))
    b = run_batch(small_config(tmp_path / "b", workers=2))
    assert (tmp_path / "a" / "runs.csv").read_bytes() == (tmp_path / "b" / "runs.csv").read_bytes()
    assert [r.measurement for r in a] == [r.measurement for r in b]


def test_batch_with_drift_replays(tmp_path):
    cfg = small_config(tmp_path, n_samples=3, drift_magnitude=0.2)
    recs = run_batch(cfg)
    summary = json.loads((tmp_path / "summary.json").read_text())
    drift = matrix_from_pairs(summary["drift"])
    assert np.allclose(drift, drift.conj().T)
    for r in recs:
        dump = json.loads((tmp_path / "paths" / f"sample_{r.sample_id:05d}.json").read_text())
        final = replay_final_state(dump, drift)
        assert np.linalg.norm(final - matrix_from_pairs(dump["rho_final"])) < 1e-9


def test_wall_time_opt_in(tmp_path):
    run_batch(small_config(tmp_path, n_samples=1, record_wall_time=True))
    rows = list(csv.DictReader(open(tmp_path / "runs.csv")))
    assert float(rows[0]["wall_time_ms"]) > 0


def test_sample_failure_is_recorded(tmp_path, monkeypatch):
    import zzctrl.harness as harness

    def boom(*a, **k):
        raise FloatingPointError("forced")

    monkeypatch.setattr(harness, "synthesize", boom)
    (r,) = run_batch(small_config(tmp_path, n_samples=1))
    assert r.converged is False and r.iterations == 0


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        run_batch(small_config(blocker / "sub", n_samples=1))


# -- controllability report ---------------------------------------------------------------

def test_check_controllability_default():
    rep = check_controllability(n_drifts=10, magnitudes=(1.0,))
    assert rep.dimension == 15 and rep.dmc
    assert rep.all_drifts_dmc
    assert "round growth" in rep.text


def test_check_controllability_zero_drift_is_default():
    base = check_controllability(n_drifts=0)
    zero = check_controllability(n_drifts=3, magnitudes=(0.0,))
    assert zero.rounds == base.rounds and zero.dimension == base.dimension
    assert zero.all_drifts_dmc


# -- CLI ------------------------------------------------------------------------------------

def write_state(path, rho):
    path.write_text(json.dumps([[[z.real, z.imag] for z in row] for row in rho]))
    return str(path)


def test_cli_concurrence(tmp_path, capsys):
    assert main(["concurrence", write_state(tmp_path / "s.json", bell_state())]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.0, abs=1e-10)


def test_cli_bounds(tmp_path, capsys):
    rho = sample_state("rank2", 1)
    assert main(["bounds", write_state(tmp_path / "s.json", rho)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert (out["m"], out["M"]) == (-1.0, 1.0)


def test_cli_bad_state(tmp_path):
    (tmp_path / "bad.json").write_text("[[1, 2]]")
    assert main(["concurrence", str(tmp_path / "bad.json")]) == 2
    assert main(["concurrence", str(tmp_path / "missing.json")]) == 1


def test_cli_dla(capsys):
    assert main(["dla", "--drifts", "3"]) == 0
    out = capsys.readouterr().out
    assert "dimension: 15" in out and "DMC: True" in out


def test_cli_run_with_config_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_samples": 5, "synthesis": {"max_iters": 1500}}))
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--samples", "2", "--out", str(out)]) == 0
    assert len((out / "runs.csv").read_text().splitlines()) == 3
    assert "samples: 2" in capsys.readouterr().out


def test_cli_run_exit_codes(tmp_path):
    assert main(["run", "--samples", "0", "--out", str(tmp_path)]) == 2
    assert main(["run", "--eta", "-1", "--out", str(tmp_path)]) == 2
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(["run", "--samples", "1", "--out", str(blocker / "x")]) == 1
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 1
