import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from impalloc.cli import main

FIG1 = {
    "system": "ideal",
    "radix": 2,
    "original_length": 10,
    "budget": 4.0,
    "distribution": [0.03, 0.07, 0.1395, 0.2205, 0.25, 0.29],
    "weights": {"kind": "mim", "varpi": 10.0},
    "seed": 7,
}


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    assert lines[0].startswith("# impalloc ")
    rows = list(csv.DictReader(lines[1:]))
    return lines[0], rows


class TestAllocate:
    def test_benchmark_config_to_json(self, tmp_path):
        out = tmp_path / "plan.json"
        code = main(["allocate", "--config", write_config(tmp_path, FIG1), "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["continuous_lengths"]) == 6
        spent = float(np.dot(FIG1["distribution"], doc["continuous_lengths"]))
        assert spent == pytest.approx(4.0, abs=1e-9)
        assert doc["rwre_rounded"] >= doc["rwre"]

    def test_zero_budget(self, tmp_path):
        cfg = dict(FIG1, budget=0.0)
        out = tmp_path / "plan.json"
        assert main(["allocate", "--config", write_config(tmp_path, cfg), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["continuous_lengths"] == [0.0] * 6
        assert doc["rwre"] == pytest.approx(1.0)

    def test_csv_format(self, tmp_path):
        out = tmp_path / "plan.csv"
        code = main(
            ["allocate", "--config", write_config(tmp_path, FIG1), "--out", str(out), "--format", "csv"]
        )
        assert code == 0
        header, rows = read_csv(out)
        assert len(rows) == 1
        assert float(rows[0]["rwre"]) <= float(rows[0]["rwre_rounded"])

    def test_malformed_distribution_exits_2_naming_field(self, tmp_path, capsys):
        cfg = dict(FIG1, distribution=[0.5, 0.6])
        code = main(["allocate", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "x.json")])
        assert code == 2
        assert "distribution" in capsys.readouterr().err

    def test_budget_beyond_capacity_exits_3(self, tmp_path, capsys):
        cfg = dict(FIG1, budget=11.0)
        code = main(["allocate", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "x.json")])
        assert code == 3
        assert "BudgetExceedsCapacity" in capsys.readouterr().err


class TestSweep:
    def test_budget_sweep_monotone(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--config", write_config(tmp_path, FIG1), "--param", "budget",
             "--from", "0", "--to", "8", "--steps", "81", "--out", str(out)]
        )
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 81
        errs = [float(r["rwre_continuous"]) for r in rows]
        assert all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
        values = [float(r["value"]) for r in rows]
        assert values == sorted(values)

    def test_coefficient_sweep_peaks_at_zero(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--config", write_config(tmp_path, FIG1), "--param", "varpi",
             "--from", "-30", "--to", "30", "--steps", "61", "--out", str(out)]
        )
        assert code == 0
        _, rows = read_csv(out)
        errs = {float(r["value"]): float(r["rwre_continuous"]) for r in rows}
        peak = max(errs, key=errs.get)
        assert peak == pytest.approx(0.0, abs=1e-9)

    def test_single_step_rejected(self, tmp_path):
        code = main(
            ["sweep", "--config", write_config(tmp_path, FIG1), "--param", "budget",
             "--from", "0", "--to", "8", "--steps", "1", "--out", str(tmp_path / "s.csv")]
        )
        assert code == 2

    def test_reversed_range_rejected(self, tmp_path):
        code = main(
            ["sweep", "--config", write_config(tmp_path, FIG1), "--param", "budget",
             "--from", "8", "--to", "0", "--steps", "5", "--out", str(tmp_path / "s.csv")]
        )
        assert code == 2

    def test_coefficient_sweep_needs_parametric_weights(self, tmp_path, capsys):
        cfg = dict(FIG1, weights={"kind": "nmim"})
        code = main(
            ["sweep", "--config", write_config(tmp_path, cfg), "--param", "varpi",
             "--from", "-1", "--to", "1", "--steps", "3", "--out", str(tmp_path / "s.csv")]
        )
        assert code == 2
        assert "weights.kind" in capsys.readouterr().err

    def test_infeasible_rows_noted_not_fatal(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--config", write_config(tmp_path, FIG1), "--param", "budget",
             "--from", "0", "--to", "12", "--steps", "7", "--out", str(out)]
        )
        assert code == 0
        _, rows = read_csv(out)
        notes = [r["note"] for r in rows if float(r["value"]) > 10.0]
        assert all(n == "BudgetExceedsCapacity" for n in notes)
        assert all(r["rwre_continuous"] == "nan" for r in rows if r["note"])


class TestVerify:
    def test_perturb_passes(self, tmp_path, capsys):
        code = main(["verify", "--config", write_config(tmp_path, FIG1), "--oracle", "perturb", "--trials", "500"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["passed"] is True
        assert doc["seed"] == 7  # config seed used by default

    def test_kkt_passes(self, tmp_path, capsys):
        code = main(["verify", "--config", write_config(tmp_path, FIG1), "--oracle", "kkt"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["passed"] is True

    def test_kkt_fallback_when_everything_clips(self, tmp_path, capsys):
        cfg = dict(FIG1, budget=10.0)  # full capacity: every class saturates
        code = main(["verify", "--config", write_config(tmp_path, cfg), "--oracle", "kkt"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["fallback"] == "perturb"

    def test_brute_small_general_instance(self, tmp_path, capsys):
        cfg = {
            "system": "general",
            "radix": 2,
            "original_length": [4, 4],
            "budget": 2.0,
            "distribution": [0.5, 0.5],
            "weights": {"kind": "explicit", "values": [0.9, 0.1]},
        }
        code = main(["verify", "--config", write_config(tmp_path, cfg), "--oracle", "brute"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["gap_vs_candidate"] >= -1e-9

    def test_brute_guard_exits_2(self, tmp_path, capsys):
        cfg = {
            "system": "ideal",
            "radix": 2,
            "original_length": 16,
            "budget": 4.0,
            "distribution": [1 / 6] * 6,
            "weights": {"kind": "mim", "varpi": 5.0},
        }
        code = main(["verify", "--config", write_config(tmp_path, cfg), "--oracle", "brute"])
        assert code == 2
        assert "SearchSpaceTooLarge" in capsys.readouterr().err

    def test_seed_env_override(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("IMPALLOC_SEED", "99")
        code = main(["verify", "--config", write_config(tmp_path, FIG1), "--oracle", "perturb", "--trials", "200"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["seed"] == 99

    def test_seed_flag_beats_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("IMPALLOC_SEED", "99")
        code = main(
            ["verify", "--config", write_config(tmp_path, FIG1), "--oracle", "perturb",
             "--trials", "200", "--seed", "123"]
        )
        assert code == 0
        assert json.loads(capsys.readouterr().out)["seed"] == 123


class TestReproduce:
    @pytest.mark.parametrize("name", ["table1", "table2", "fig1", "fig3", "fig5"])
    def test_experiments_pass(self, tmp_path, name):
        code = main(["reproduce", "--experiment", name, "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / f"{name}.csv").exists()
        summary = json.loads((tmp_path / f"{name}_summary.json").read_text())
        assert summary["passed"] is True

    def test_fig2_rounded_never_below_continuous(self, tmp_path):
        assert main(["reproduce", "--experiment", "fig2", "--out", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "fig2_summary.json").read_text())
        assert summary["passed"] is True

    def test_fig4_reference_values(self, tmp_path):
        code = main(["reproduce", "--experiment", "fig4", "--out", str(tmp_path)])
        assert code == 0
        summary = json.loads((tmp_path / "fig4_summary.json").read_text())
        assert summary["passed"] is True
        # P2's published vector sums to 1.002; its max-compression reference
        # only reproduces from the renormalized distribution
        assert summary["delta_star"]["P2"] == pytest.approx(10.97, abs=0.01)
        assert summary["delta_star"]["P1"] == pytest.approx(11.85, abs=0.01)

    def test_unknown_experiment_exits_2(self, tmp_path):
        assert main(["reproduce", "--experiment", "nope", "--out", str(tmp_path)]) == 2

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["reproduce", "--experiment", "fig3", "--out", str(out)]) == 0
        assert (a / "fig3.csv").read_bytes() == (b / "fig3.csv").read_bytes()
        assert (a / "fig3_summary.json").read_bytes() == (b / "fig3_summary.json").read_bytes()

    def test_header_records_version_and_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("IMPALLOC_SEED", "42")
        assert main(["reproduce", "--experiment", "table1", "--out", str(tmp_path)]) == 0
        first = (tmp_path / "table1.csv").read_text().splitlines()[0]
        assert first.startswith("# impalloc 0.1.0 config=")
        assert first.endswith("seed=42")


def test_module_entrypoint_smoke(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(FIG1))
    out = tmp_path / "p.json"
    proc = subprocess.run(
        [sys.executable, "-m", "impalloc", "allocate", "--config", str(cfg), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_usage_error_exits_2():
    assert main(["allocate"]) == 2  # missing required flags
