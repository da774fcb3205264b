import json

import numpy as np
import pytest

from intervalcast.cli import main
from intervalcast.fen import load_model
from intervalcast.series import load_csv


def run_cli(*argv):
    return main(list(argv))


def write_config(path, **overrides):
    doc = {
        "data": {"dgp": "c1", "length": 240, "seed": 3},
        "orders": {"center": 4, "range": 3},
        "segment_lengths": [12],
        "depths": [1],
        "stage_widths": [4, 8],
        "feature_dim": 8,
        "train": {"epochs": 2, "batch_size": 16},
        "imaging_methods": ["rp"],
        "mtf_bins": 4,
        "regressors": [{"kind": "ridge"}, {"kind": "knn", "k": 3}],
        "seed": 5,
    }
    doc.update(overrides)
    path.write_text(json.dumps(doc))
    return path


class TestGen:
    def test_writes_rows_and_header(self, tmp_path, capsys):
        out = tmp_path / "c1.csv"
        assert run_cli("gen", "--dgp", "c1", "--length", "50", "--seed", "7",
                       "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        data = [l for l in lines if not l.startswith("#")]
        assert data[0] == "t,lower,upper"
        assert len(data) == 51
        assert any(l.startswith("# seed=7") for l in lines)
        assert any(l.startswith("# version=") for l in lines)

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli("gen", "--dgp", "c2", "--length", "40", "--seed", "9", "--out", str(a))
        run_cli("gen", "--dgp", "c2", "--length", "40", "--seed", "9", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_loads_back(self, tmp_path):
        out = tmp_path / "c3.csv"
        run_cli("gen", "--dgp", "c3", "--length", "30", "--seed", "1", "--out", str(out))
        s = load_csv(out)
        assert len(s) == 30
        assert np.all(s.lower <= s.upper)

    def test_unknown_dgp_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli("gen", "--dgp", "c9", "--out", str(tmp_path / "x.csv"))
        assert exc.value.code == 2


class TestOrders:
    @pytest.fixture()
    def csv_path(self, tmp_path):
        out = tmp_path / "series.csv"
        run_cli("gen", "--dgp", "c1", "--length", "300", "--seed", "7", "--out", str(out))
        return out

    def test_prints_orders(self, csv_path, capsys):
        assert run_cli("orders", "--input", str(csv_path), "--max-lag", "8") == 0
        out = capsys.readouterr().out
        assert "center order (selected):" in out
        assert "range order (selected):" in out

    def test_pin_echoed(self, csv_path, capsys):
        assert run_cli("orders", "--input", str(csv_path), "--max-lag", "5",
                       "--pin", "35,35") == 0
        out = capsys.readouterr().out
        assert "center order (pinned): 35" in out
        assert "range order (pinned): 35" in out

    def test_auto_orders_near_published_band(self, tmp_path, capsys):
        # C1's published orders are (5, 3); automatic selection on a fresh
        # series lands near them (center ~5, range low; band-rule oracle)
        out = tmp_path / "c1.csv"
        run_cli("gen", "--dgp", "c1", "--length", "1500", "--seed", "4", "--out", str(out))
        capsys.readouterr()
        assert run_cli("orders", "--input", str(out), "--max-lag", "10", "--json") == 0
        doc = json.loads(capsys.readouterr().out)
        assert 3 <= doc["series"]["center"]["order"] <= 7
        assert 1 <= doc["series"]["range"]["order"] <= 3

    def test_json_output(self, csv_path, capsys):
        assert run_cli("orders", "--input", str(csv_path), "--max-lag", "5", "--json") == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["series"]["center"]["acf"]) == 6
        assert doc["series"]["center"]["order"] >= 1

    def test_plot_data(self, csv_path, tmp_path, capsys):
        plot = tmp_path / "plot.csv"
        assert run_cli("orders", "--input", str(csv_path), "--max-lag", "4",
                       "--emit-plot-data", str(plot)) == 0
        lines = [l for l in plot.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "series,lag,acf,pacf"
        assert len(lines) == 1 + 2 * 5

    def test_degenerate_series_exits_1(self, tmp_path, capsys):
        path = tmp_path / "flat.csv"
        path.write_text("t,lower,upper\n" + "".join(f"{t},1.0,2.0\n" for t in range(50)))
        assert run_cli("orders", "--input", str(path), "--max-lag", "5") == 1
        assert "DegenerateSeries" in capsys.readouterr().err

    def test_bad_pin_exits_2(self, csv_path, capsys):
        assert run_cli("orders", "--input", str(csv_path), "--pin", "35") == 2

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert run_cli("orders", "--input", str(tmp_path / "none.csv")) == 1


class TestRun:
    def test_full_run_writes_artifacts(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        out_dir = tmp_path / "out"
        assert run_cli("run", "--config", str(cfg), "--out", str(out_dir)) == 0
        report = json.loads((out_dir / "report.json").read_text())
        assert set(report) == {"meta", "orders", "fen_selection", "cells", "mde"}
        assert len(report["cells"]) == 2 * 2 * 2
        csv_text = (out_dir / "report.csv").read_text()
        assert "regressor,method" in csv_text
        model = load_model(out_dir / "fen_model.json")
        assert model.architecture.feature_dim == 8
        stdout = capsys.readouterr().out
        assert "selected fen" in stdout

    def test_rerun_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run_cli("run", "--config", str(cfg), "--out", str(out_a)) == 0
        assert run_cli("run", "--config", str(cfg), "--out", str(out_b)) == 0
        for name in ("report.json", "report.csv", "fen_model.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_dry_run_no_artifacts(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        out_dir = tmp_path / "out"
        assert run_cli("run", "--config", str(cfg), "--out", str(out_dir), "--dry-run") == 0
        stdout = capsys.readouterr().out
        assert "fen sweep" in stdout and "1 candidates" in stdout
        assert not out_dir.exists()

    def test_missing_config_exits_2(self, tmp_path, capsys):
        assert run_cli("run", "--config", str(tmp_path / "none.json")) == 2

    def test_unknown_key_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"depthz": [1]}))
        assert run_cli("run", "--config", str(cfg)) == 2
        assert "unknown keys" in capsys.readouterr().err

    def test_invalid_json_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        assert run_cli("run", "--config", str(cfg)) == 2

    def test_runtime_failure_exits_1(self, tmp_path, capsys):
        # segmentation length larger than the training portion
        cfg = write_config(tmp_path / "cfg.json", segment_lengths=[200])
        assert run_cli("run", "--config", str(cfg), "--out", str(tmp_path / "o")) == 1
        assert "failed" in capsys.readouterr().err
