import json
from pathlib import Path

import numpy as np
import pytest

from rddm import io as rio
from rddm.cli import main
from rddm.metrics import rmse
from rddm.schedule import linear_schedule

TINY_MODEL = [
    "--set", "model.depth=2",
    "--set", "model.base_channels=8",
    "--set", "model.channel_multipliers=1,2",
    "--set", "model.attention_stages=1",
    "--set", "model.embed_dim=16",
]
TINY_TRAIN = TINY_MODEL + [
    "--set", "train.epochs=2",
    "--set", "train.batch=8",
    "--set", "data.n_pairs=8",
]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Synth recordings, windows file, and a tiny trained checkpoint."""
    root = tmp_path_factory.mktemp("cli")
    rec_dir = root / "recs"
    assert main(["synth", "--out", str(rec_dir), "--n-pairs", "8", "--seed", "3"]) == 0
    windows = root / "windows.bin"
    assert main(["preprocess", "--input", str(rec_dir), "--out", str(windows)]) == 0
    ckpt = root / "model.ckpt"
    log = root / "train.jsonl"
    assert (
        main(
            ["train", "--data", str(windows), "--out", str(ckpt), "--log", str(log), "--seed", "5"]
            + TINY_TRAIN
        )
        == 0
    )
    return {"root": root, "recs": rec_dir, "windows": windows, "ckpt": ckpt, "log": log}


class TestSynth:
    def test_outputs_exist(self, workspace):
        rec_dir = workspace["recs"]
        files = sorted(p.name for p in rec_dir.iterdir())
        assert "dataset.json" in files
        assert "rec_0000.csv" in files and "rec_0000.truth.json" in files
        truth = json.loads((rec_dir / "rec_0000.truth.json").read_text())
        assert truth["schema"] == "rddm/recording-truth/v1"
        assert truth["hr_bpm"] > 30

    def test_seeded_synth_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["synth", "--out", str(a), "--n-pairs", "4", "--seed", "9"])
        main(["synth", "--out", str(b), "--n-pairs", "4", "--seed", "9"])
        for name in sorted(p.name for p in a.iterdir()):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_binary_format(self, tmp_path):
        out = tmp_path / "bin"
        assert main(["synth", "--out", str(out), "--n-pairs", "2", "--format", "bin"]) == 0
        assert (out / "rec_0000.f32").exists()
        assert (out / "rec_0000.f32.json").exists()
        ppg, ecg = rio.read_recording(out / "rec_0000.f32")
        assert len(ppg) == len(ecg)


class TestPreprocess:
    def test_window_counts_and_metadata(self, workspace):
        ws, manifest = rio.read_windows(workspace["windows"])
        assert len(ws) == 8  # 4 recordings x 2 windows of 4 s
        assert ws.channels == ["ppg", "ecg"]
        assert all("truth_hr" in m for m in ws.meta)
        assert {m["index"] for m in ws.meta} == {0, 1}

    def test_values_in_range(self, workspace):
        ws, _ = rio.read_windows(workspace["windows"])
        assert np.abs(ws.data).max() <= 1.0 + 1e-6


class TestMask:
    def test_golden_mask_rows(self, workspace, tmp_path):
        out = tmp_path / "masks.csv"
        assert main(["mask", "--input", str(workspace["windows"]), "--gamma", "32", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# schema: rddm/mask-csv/v1")
        rows = lines[2:]
        ws, _ = rio.read_windows(workspace["windows"])
        assert len(rows) == len(ws)
        from rddm.diffusion import window_mask
        from rddm.dsp import PairedWindow

        w0 = PairedWindow(ppg=ws.channel("ppg")[0], ecg=ws.channel("ecg")[0], subject_id="x")
        expected = "".join(str(int(b)) for b in window_mask(w0, 32))
        assert rows[0] == expected


class TestTrain:
    def test_checkpoint_and_log(self, workspace):
        ckpt = rio.load_checkpoint(workspace["ckpt"])
        assert ckpt["kind"] == "rddm"
        lines = workspace["log"].read_text().splitlines()
        header = json.loads(lines[0])
        assert header["schema"] == "rddm/train-log/v1"
        steps = [json.loads(ln) for ln in lines[1:]]
        assert len(steps) == 2  # 2 epochs x 1 step (8 windows / batch 8)
        assert all("loss_total" in s and "wall_ms" in s for s in steps)

    def test_train_determinism_modulo_wall_ms(self, workspace, tmp_path):
        args = ["--data", str(workspace["windows"]), "--seed", "5"] + TINY_TRAIN
        outs = []
        for name in ("a", "b"):
            ck, lg = tmp_path / f"{name}.ckpt", tmp_path / f"{name}.jsonl"
            assert main(["train", "--out", str(ck), "--log", str(lg)] + args) == 0
            outs.append((ck.read_bytes(), lg.read_text()))
        assert outs[0][0] == outs[1][0]  # checkpoints byte-identical

        def strip_wall(text):
            rows = [json.loads(ln) for ln in text.splitlines()]
            for r in rows:
                r.pop("wall_ms", None)
            return rows

        assert strip_wall(outs[0][1]) == strip_wall(outs[1][1])

    def test_missing_data_path_exits_2(self, tmp_path):
        rc = main(["train", "--data", str(tmp_path / "nope.bin"), "--out", str(tmp_path / "x.ckpt")])
        assert rc == 2

    def test_invalid_config_names_field(self, tmp_path, capsys):
        rc = main(
            ["train", "--out", str(tmp_path / "x.ckpt"), "--set", "train.epochs=0"] + TINY_MODEL
        )
        assert rc == 2
        assert "train.epochs" in capsys.readouterr().err

    def test_resume_runs(self, workspace, tmp_path):
        out = tmp_path / "resumed.ckpt"
        rc = main(
            ["train", "--data", str(workspace["windows"]), "--out", str(out),
             "--resume", str(workspace["ckpt"]), "--seed", "5", "--epochs", "3"]
            + TINY_MODEL + ["--set", "train.batch=8", "--set", "data.n_pairs=8"]
        )
        assert rc == 0
        assert rio.load_checkpoint(out)["train_state"]["epochs_done"] == 3

    def test_baseline_kind(self, workspace, tmp_path):
        out = tmp_path / "ddpm.ckpt"
        rc = main(
            ["train", "--data", str(workspace["windows"]), "--out", str(out), "--baseline", "--seed", "1"]
            + TINY_TRAIN
        )
        assert rc == 0
        assert rio.load_checkpoint(out)["kind"] == "ddpm"

    def test_toml_config_with_flag_overrides(self, workspace, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            "[model]\ndepth = 2\nbase_channels = 8\nchannel_multipliers = [1, 2]\n"
            "attention_stages = [1]\nembed_dim = 16\n"
            "[train]\nepochs = 5\nbatch = 8\nseed = 2\n"
            "[data]\nn_pairs = 8\n"
        )
        out = tmp_path / "cfg.ckpt"
        # --epochs flag must win over the file value.
        rc = main(
            ["train", "--config", str(cfg), "--data", str(workspace["windows"]),
             "--out", str(out), "--epochs", "1"]
        )
        assert rc == 0
        ckpt = rio.load_checkpoint(out)
        assert ckpt["train_state"]["epochs_done"] == 1
        assert ckpt["config"].depth == 2

    def test_shipped_desk_config_equals_defaults(self):
        from rddm.config import RunConfig, load_config

        shipped = Path(__file__).resolve().parent.parent / "configs" / "desk.toml"
        assert load_config(shipped) == RunConfig()

    def test_missing_config_file_exits_2(self, workspace, tmp_path):
        rc = main(
            ["train", "--config", str(tmp_path / "nope.toml"),
             "--data", str(workspace["windows"]), "--out", str(tmp_path / "x.ckpt")]
        )
        assert rc == 2


class TestSample:
    def test_one_output_per_input_window(self, workspace, tmp_path):
        out = tmp_path / "gen.bin"
        rc = main(
            ["sample", "--ckpt", str(workspace["ckpt"]), "--input", str(workspace["windows"]),
             "--out", str(out), "--seed", "2"]
        )
        assert rc == 0
        ws, manifest = rio.read_windows(out)
        assert len(ws) == 8
        assert ws.channels == ["ecg"]
        assert manifest["method"] == "rddm" and manifest["steps"] == 10

    def test_seeded_sampling_is_byte_identical(self, workspace, tmp_path):
        args = ["sample", "--ckpt", str(workspace["ckpt"]), "--input", str(workspace["windows"]), "--seed", "4"]
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_steps_override_recorded(self, workspace, tmp_path):
        out = tmp_path / "gen5.bin"
        main(["sample", "--ckpt", str(workspace["ckpt"]), "--input", str(workspace["windows"]),
              "--out", str(out), "--steps", "5"])
        _, manifest = rio.read_windows(out)
        assert manifest["steps"] == 5

    def test_csv_format(self, workspace, tmp_path):
        out = tmp_path / "gen.csv"
        main(["sample", "--ckpt", str(workspace["ckpt"]), "--input", str(workspace["windows"]),
              "--out", str(out), "--format", "csv"])
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# schema:")
        assert len(lines) == 2 + 8


class TestEval:
    def test_matches_in_memory_metrics(self, workspace, tmp_path):
        gen_path = tmp_path / "gen.bin"
        main(["sample", "--ckpt", str(workspace["ckpt"]), "--input", str(workspace["windows"]),
              "--out", str(gen_path), "--seed", "6"])
        report_path = tmp_path / "report.csv"
        rc = main(["eval", "--gen", str(gen_path), "--ref", str(workspace["windows"]),
                   "--out", str(report_path)])
        assert rc == 0
        lines = report_path.read_text().splitlines()
        assert lines[1] == "dataset,method,steps,rmse,fd,hr_mae,per_window_ms"
        row = lines[2].split(",")
        gen_ws, _ = rio.read_windows(gen_path)
        ref_ws, _ = rio.read_windows(workspace["windows"])
        expected = np.mean([rmse(g, r) for g, r in zip(gen_ws.channel("ecg"), ref_ws.channel("ecg"))])
        assert float(row[3]) == pytest.approx(expected, rel=1e-9)

    def test_window_count_mismatch_rejected(self, workspace, tmp_path):
        bad = tmp_path / "bad.bin"
        ws, _ = rio.read_windows(workspace["windows"])
        rio.write_windows(bad, rio.WindowSet(ws.data[:4, 1:, :], ["ecg"], ws.rate_hz, ws.meta[:4]))
        rc = main(["eval", "--gen", str(bad), "--ref", str(workspace["windows"]), "--out", str(tmp_path / "r.csv")])
        assert rc == 2


class TestSweepAndScheduleDump:
    def test_steps_sweep_csv(self, workspace, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--param", "steps", "--values", "2,4", "--ckpt", str(workspace["ckpt"]),
                   "--data", str(workspace["windows"]), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "param,value,rmse,fd,hr_mae"
        assert len(lines) == 4
        assert lines[2].startswith("steps,2,") and lines[3].startswith("steps,4,")

    def test_empty_values_usage_error(self, workspace, tmp_path):
        rc = main(["sweep", "--param", "steps", "--values", "", "--ckpt", str(workspace["ckpt"]),
                   "--data", str(workspace["windows"]), "--out", str(tmp_path / "s.csv")])
        assert rc == 2

    def test_unknown_param_usage_error(self, workspace, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--param", "sigma", "--values", "1", "--out", str(tmp_path / "s.csv")])
        assert exc.value.code == 2

    def test_gamma_sweep_tiny(self, workspace, tmp_path):
        out = tmp_path / "gs.csv"
        rc = main(
            ["sweep", "--param", "gamma", "--values", "16,32", "--data", str(workspace["windows"]),
             "--eval-data", str(workspace["windows"]), "--epochs", "1", "--out", str(out)]
            + TINY_MODEL + ["--set", "train.batch=8"]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 4

    def test_schedule_dump_matches_tables(self, tmp_path):
        out = tmp_path / "sched.csv"
        assert main(["schedule-dump", "--T", "10", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# schema: rddm/schedule-csv/v1")
        assert lines[1] == "t,beta,alpha,alpha_bar,sigma"
        sched = linear_schedule(10)
        for t, line in enumerate(lines[2:]):
            cols = line.split(",")
            assert int(cols[0]) == t + 1
            assert float(cols[1]) == sched.beta[t]
            assert float(cols[3]) == sched.alpha_bar[t]

    def test_schedule_dump_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["schedule-dump", "--T", "10", "--out", str(a)])
        main(["schedule-dump", "--T", "10", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestBench:
    def test_bench_csv_and_svg(self, workspace, tmp_path):
        out = tmp_path / "bench.csv"
        svg = tmp_path / "bench.svg"
        rc = main(["bench", "--ckpt", str(workspace["ckpt"]), "--data", str(workspace["windows"]),
                   "--steps", "2,4", "--out", str(out), "--svg", str(svg)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 4
        svg_text = svg.read_text()
        assert svg_text.startswith("<!-- schema: rddm/bench-svg/v1 -->")
        assert "<svg" in svg_text
        per_window = [float(ln.split(",")[6]) for ln in lines[2:]]
        assert all(v > 0 for v in per_window)
