"""Command-line surface for the PPG-to-ECG translation pipeline.

Subcommands: synth, preprocess, mask, train, sample, eval, bench, sweep,
schedule-dump. Every command is deterministic under a fixed --seed (timing
fields aside). Exit codes: 0 success, 1 runtime/numeric failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
import torch

from . import io as rio
from .config import RunConfig, config_to_dict, load_config
from .diffusion import RddmModel, ddpm_sample, rddm_sample
from .dsp import PairedWindow, preprocess_pair
from .errors import CheckpointError, ConfigError, InvalidInputError, PipelineError
from .metrics import bench_inference, evaluate_windows, hr_mae
from .schedule import linear_schedule
from .synth import SpecRanges, draw_spec, gen_raw_recording, recording_hr
from .train import train_model

REPORT_HEADER = "dataset,method,steps,rmse,fd,hr_mae,per_window_ms"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, schema: str, header: str, rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema: {schema}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ranges = SpecRanges(
        hr_bpm=(args.hr_min, args.hr_max),
        rr_jitter=(0.0, args.jitter_max),
        delay_ms=(args.delay_min, args.delay_max),
        noise_std=args.noise_std,
    )
    n_recordings = max(1, math.ceil(args.n_pairs / 2))
    root = np.random.default_rng(args.seed)
    names = []
    for i in range(n_recordings):
        spec, delay = draw_spec(root, ranges)
        ppg, ecg, peaks = gen_raw_recording(spec, delay)
        stem = f"rec_{i:04d}"
        if args.format == "csv":
            t = np.arange(len(ecg)) / ecg.rate_hz
            rio.write_recording_csv(out / f"{stem}.csv", t, ppg.samples, ecg.samples)
            names.append(f"{stem}.csv")
        else:
            rio.write_recording_bin(out / f"{stem}.f32", ecg.rate_hz, ppg.samples, ecg.samples)
            names.append(f"{stem}.f32")
        truth = {
            "schema": rio.TRUTH_SCHEMA,
            "subject": stem,
            "hr_bpm": recording_hr(peaks),
            "r_peak_indices": [int(p) for p in peaks.indices],
            "rate_hz": ecg.rate_hz,
            "delay_ms": delay,
            "spec_seed": spec.seed,
        }
        (out / f"{stem}.truth.json").write_text(json.dumps(truth, sort_keys=True, indent=1) + "\n")
    manifest = {
        "schema": "rddm/synth-manifest/v1",
        "seed": args.seed,
        "n_pairs": args.n_pairs,
        "recordings": names,
    }
    (out / "dataset.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    print(f"wrote {n_recordings} recordings to {out}")
    return 0


# ---------------------------------------------------------------------------
# preprocess
# ---------------------------------------------------------------------------

def _recording_paths(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(q for q in p.iterdir() if q.suffix in (".csv", ".f32")))
        else:
            paths.append(p)
    if not paths:
        raise InvalidInputError("no input recordings found")
    return paths


def _windows_to_set(windows: list[PairedWindow], meta: list[dict]) -> rio.WindowSet:
    data = np.stack([[w.ppg, w.ecg] for w in windows])
    return rio.WindowSet(data, ["ppg", "ecg"], windows[0].rate_hz, meta)


def cmd_preprocess(args) -> int:
    all_windows: list[PairedWindow] = []
    meta: list[dict] = []
    for path in _recording_paths(args.input):
        ppg, ecg = rio.read_recording(path)
        subject = path.stem
        truth_path = path.with_name(path.stem + ".truth.json")
        truth_hr = None
        if truth_path.exists():
            truth_hr = json.loads(truth_path.read_text()).get("hr_bpm")
        windows = preprocess_pair(ecg, ppg, subject_id=subject)
        for k, w in enumerate(windows):
            all_windows.append(w)
            entry = {"subject": subject, "index": k}
            if truth_hr is not None:
                entry["truth_hr"] = truth_hr
            meta.append(entry)
    if not all_windows:
        raise InvalidInputError("preprocessing produced no windows (recordings too short?)")
    rio.write_windows(args.out, _windows_to_set(all_windows, meta))
    print(f"wrote {len(all_windows)} windows to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# mask
# ---------------------------------------------------------------------------

def cmd_mask(args) -> int:
    from .diffusion import window_mask

    ws, _ = rio.read_windows(args.input)
    windows = _set_to_windows(ws)
    rows = []
    for w in windows:
        bits = window_mask(w, args.gamma)
        rows.append(["".join(str(int(b)) for b in bits)])
    _write_csv(args.out, rio.MASK_CSV_SCHEMA + f" gamma={args.gamma}", "mask", rows)
    print(f"wrote {len(rows)} masks to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def _set_to_windows(ws: rio.WindowSet) -> list[PairedWindow]:
    ppg = ws.channel("ppg")
    ecg = ws.channel("ecg")
    return [
        PairedWindow(ppg=p, ecg=e, subject_id=m.get("subject", ""))
        for p, e, m in zip(ppg, ecg, ws.meta)
    ]


def _load_training_windows(cfg: RunConfig, data_path: str | None) -> list[PairedWindow]:
    if data_path:
        ws, _ = rio.read_windows(data_path)
        return _set_to_windows(ws)
    if cfg.data.source == "files":
        windows = []
        for path in _recording_paths(cfg.data.paths):
            ppg, ecg = rio.read_recording(path)
            windows.extend(preprocess_pair(ecg, ppg, subject_id=path.stem))
        return windows
    from .synth import all_windows, make_dataset

    return all_windows(make_dataset(cfg.data.n_pairs, cfg.data.ranges(), seed=cfg.data.seed))


def _hyper(cfg: RunConfig, kind: str) -> dict:
    h = {
        "kind": kind,
        "gamma": cfg.rddm.gamma,
        "lambda1": cfg.rddm.lambda1,
        "lambda2": cfg.rddm.lambda2,
        "config": config_to_dict(cfg),
    }
    return h


def cmd_train(args) -> int:
    cfg = load_config(args.config, args.set or [])
    if args.seed is not None:
        cfg.train.seed = args.seed
    if args.epochs is not None:
        cfg.train.epochs = args.epochs
        cfg.validate()
    kind = "ddpm" if args.baseline else "rddm"
    windows = _load_training_windows(cfg, args.data)
    if args.data and Path(args.data).resolve() == Path(args.out).resolve():
        raise ConfigError("train.out must differ from the input data path")

    log_fh = open(args.log, "w") if args.log else None
    if log_fh:
        log_fh.write(
            json.dumps(
                {"schema": rio.TRAIN_LOG_SCHEMA, "kind": kind, "config": config_to_dict(cfg)},
                sort_keys=True,
            )
            + "\n"
        )

    def log(entry: dict) -> None:
        if log_fh:
            log_fh.write(json.dumps(entry, sort_keys=True) + "\n")

    resume = rio.load_checkpoint(args.resume) if args.resume else None
    sched = cfg.schedule.build()
    settings = cfg.train.settings(cfg.rddm)

    def save(run, path):
        rio.save_checkpoint(
            path,
            kind,
            run.nets,
            sched,
            _hyper(cfg, kind),
            train_state=run.train_state(),
            optimizer=run.optimizer,
        )

    def on_epoch(epoch: int, run) -> None:
        if cfg.train.save_every and epoch % cfg.train.save_every == 0 and epoch < cfg.train.epochs:
            save(run, args.out)

    try:
        run = train_model(
            kind, windows, cfg.model.build(), sched, settings, log=log, resume=resume,
            on_epoch=on_epoch,
        )
        save(run, args.out)
    finally:
        if log_fh:
            log_fh.close()
    first = run.reports[0].loss_total if run.reports else float("nan")
    last = run.reports[-1].loss_total if run.reports else float("nan")
    print(
        f"trained {kind} for {run.epochs_done} epochs on {len(windows)} windows; "
        f"loss {first:.4f} -> {last:.4f}; checkpoint: {args.out}"
    )
    return 0


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def _load_model(ckpt_path: str):
    ckpt = rio.load_checkpoint(ckpt_path)
    if ckpt["kind"] == "rddm":
        model = RddmModel(
            ckpt["nets"]["eps_theta"],
            ckpt["nets"]["rho_phi"],
            ckpt["sched"],
            int(ckpt["hyper"].get("gamma", 32)),
        )
    elif ckpt["kind"] == "ddpm":
        model = ckpt["nets"]["net"]
    else:
        raise CheckpointError(f"unknown checkpoint kind {ckpt['kind']!r}")
    return model, ckpt


def _sample_windows(model, ckpt: dict, cond: np.ndarray, steps: int | None, seed: int) -> np.ndarray:
    sched = ckpt["sched"]
    if steps is not None and steps != sched.T:
        sched = linear_schedule(steps, float(sched.beta[0]), float(sched.beta[-1]))
    rng = torch.Generator().manual_seed(seed)
    cond_t = torch.tensor(cond, dtype=torch.float32)
    if isinstance(model, RddmModel):
        out = rddm_sample(model, cond_t, rng, sched=sched)
    else:
        out = ddpm_sample(model, cond_t, rng, sched)
    return out.numpy().astype(np.float64)


def cmd_sample(args) -> int:
    model, ckpt = _load_model(args.ckpt)
    ws, _ = rio.read_windows(args.input)
    cond = ws.channel("ppg")
    gen = _sample_windows(model, ckpt, cond, args.steps, args.seed)
    steps = args.steps if args.steps is not None else ckpt["sched"].T
    if args.format == "csv":
        rows = [[repr(float(v)) for v in row] for row in gen]
        _write_csv(args.out, rio.WINDOWS_SCHEMA + " csv", ",".join(f"s{i}" for i in range(gen.shape[1])), rows)
    else:
        out_ws = rio.WindowSet(gen[:, None, :], ["ecg"], ws.rate_hz, ws.meta)
        rio.write_windows(
            args.out, out_ws,
            extra={"method": ckpt["kind"], "steps": steps, "seed": args.seed, "source": str(args.input)},
        )
    print(f"sampled {gen.shape[0]} windows ({ckpt['kind']}, {steps} steps) -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _stitch_8s(ecgs: np.ndarray, meta: list[dict]) -> tuple[list[np.ndarray], list[float]]:
    """Concatenate adjacent same-subject 4 s windows into 8 s HR segments."""
    by_subject: dict[str, list[tuple[int, int]]] = {}
    for row, m in enumerate(meta):
        if "truth_hr" in m:
            by_subject.setdefault(m["subject"], []).append((int(m["index"]), row))
    segments, truths = [], []
    for subject, entries in sorted(by_subject.items()):
        entries.sort()
        k = 0
        while k + 1 < len(entries):
            (i0, r0), (i1, r1) = entries[k], entries[k + 1]
            if i1 == i0 + 1:
                segments.append(np.concatenate([ecgs[r0], ecgs[r1]]))
                truths.append(float(meta[r0]["truth_hr"]))
                k += 2
            else:
                k += 1
    return segments, truths


def _eval_row(gen_ws: rio.WindowSet, ref_ws: rio.WindowSet, dataset: str, method, steps):
    if len(gen_ws) != len(ref_ws):
        raise InvalidInputError(f"generated {len(gen_ws)} windows but reference has {len(ref_ws)}")
    report = evaluate_windows(gen_ws.channel("ecg"), ref_ws.channel("ecg"))
    segments, truths = _stitch_8s(gen_ws.channel("ecg"), ref_ws.meta)
    hr = None
    if segments:
        try:
            hr = hr_mae(segments, truths, rate_hz=ref_ws.rate_hz).mae_bpm
        except PipelineError:
            hr = None
    return [dataset, method, steps, report.rmse, report.fd, hr, None], report


def cmd_eval(args) -> int:
    gen_ws, gen_manifest = rio.read_windows(args.gen)
    ref_ws, _ = rio.read_windows(args.ref)
    row, report = _eval_row(
        gen_ws,
        ref_ws,
        dataset=Path(args.ref).stem,
        method=gen_manifest.get("method", "unknown"),
        steps=gen_manifest.get("steps"),
    )
    _write_csv(args.out, rio.REPORT_CSV_SCHEMA, REPORT_HEADER, [row])
    print(f"rmse={report.rmse:.4f} fd={report.fd:.4f} hr_mae={row[5]} ({report.n_windows} windows)")
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _svg_scatter(path: str, points: list[tuple[float, float, str]]) -> None:
    """Tiny dependency-free scatter of RMSE (y) vs per-window ms (x)."""
    w, h, pad = 480, 360, 48
    xs = [p[0] for p in points] or [1.0]
    ys = [p[1] for p in points] or [1.0]
    x_max, y_max = max(xs) * 1.15 + 1e-9, max(ys) * 1.15 + 1e-9
    sx = lambda x: pad + (w - 2 * pad) * x / x_max
    sy = lambda y: h - pad - (h - 2 * pad) * y / y_max
    parts = [
        "<!-- schema: rddm/bench-svg/v1 -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h-pad}" x2="{w-pad}" y2="{h-pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h-pad}" stroke="black"/>',
        f'<text x="{w/2}" y="{h-10}" font-size="12" text-anchor="middle">per-window ms</text>',
        f'<text x="14" y="{h/2}" font-size="12" transform="rotate(-90 14 {h/2})" text-anchor="middle">RMSE</text>',
    ]
    for x, y, label in points:
        parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="4" fill="steelblue"/>')
        parts.append(
            f'<text x="{sx(x)+6:.1f}" y="{sy(y)-6:.1f}" font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def cmd_bench(args) -> int:
    model, ckpt = _load_model(args.ckpt)
    ref_ws, _ = rio.read_windows(args.data)
    cond = ref_ws.channel("ppg")
    steps_list = _parse_values(args.steps)
    timings = bench_inference(model, cond, steps_list, seed=args.seed)
    rows, points = [], []
    for rep in timings:
        gen = _sample_windows(model, ckpt, cond, rep.steps, args.seed)
        gen_ws = rio.WindowSet(gen[:, None, :], ["ecg"], ref_ws.rate_hz, ref_ws.meta)
        row, _ = _eval_row(gen_ws, ref_ws, Path(args.data).stem, rep.method, rep.steps)
        row[6] = rep.per_window_ms
        rows.append(row)
        points.append((rep.per_window_ms, row[3], f"{rep.method} T={rep.steps}"))
        print(
            f"{rep.method} T={rep.steps}: {rep.per_window_ms:.1f} ms/window, "
            f"net_calls={rep.net_calls}, rmse={row[3]:.4f}"
        )
    _write_csv(args.out, rio.REPORT_CSV_SCHEMA, REPORT_HEADER, rows)
    if args.svg:
        _svg_scatter(args.svg, points)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _parse_values(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"values must be comma-separated integers: {exc}") from exc
    if not values:
        raise ConfigError("values list is empty")
    return values


def cmd_sweep(args) -> int:
    values = _parse_values(args.values)
    header = "param,value,rmse,fd,hr_mae"
    rows = []
    if args.param == "steps":
        if not args.ckpt:
            raise ConfigError("sweep over steps needs --ckpt")
        model, ckpt = _load_model(args.ckpt)
        ref_ws, _ = rio.read_windows(args.data)
        for steps in values:
            gen = _sample_windows(model, ckpt, ref_ws.channel("ppg"), steps, args.seed)
            gen_ws = rio.WindowSet(gen[:, None, :], ["ecg"], ref_ws.rate_hz, ref_ws.meta)
            row, _ = _eval_row(gen_ws, ref_ws, "", "", steps)
            rows.append(["steps", steps, row[3], row[4], row[5]])
            print(f"steps={steps}: rmse={row[3]:.4f} fd={row[4]:.4f} hr_mae={row[5]}")
    elif args.param == "gamma":
        cfg = load_config(args.config, args.set or [])
        if args.epochs is not None:
            cfg.train.epochs = args.epochs
            cfg.validate()
        windows = _load_training_windows(cfg, args.data)
        ref_ws, _ = rio.read_windows(args.eval_data) if args.eval_data else (None, None)
        if ref_ws is None:
            raise ConfigError("sweep over gamma needs --eval-data windows for scoring")
        sched = cfg.schedule.build()
        for gamma in values:
            if gamma < 2 or gamma % 2:
                raise ConfigError(f"gamma values must be even and >= 2, got {gamma}")
            cfg.rddm.gamma = gamma
            settings = cfg.train.settings(cfg.rddm)
            run = train_model("rddm", windows, cfg.model.build(), sched, settings)
            rng = torch.Generator().manual_seed(args.seed)
            gen = rddm_sample(
                run.model, torch.tensor(ref_ws.channel("ppg"), dtype=torch.float32), rng
            ).numpy()
            gen_ws = rio.WindowSet(gen[:, None, :], ["ecg"], ref_ws.rate_hz, ref_ws.meta)
            row, _ = _eval_row(gen_ws, ref_ws, "", "", sched.T)
            rows.append(["gamma", gamma, row[3], row[4], row[5]])
            print(f"gamma={gamma}: rmse={row[3]:.4f} fd={row[4]:.4f} hr_mae={row[5]}")
    else:
        raise ConfigError(f"unknown sweep parameter {args.param!r} (use 'steps' or 'gamma')")
    _write_csv(args.out, rio.SWEEP_CSV_SCHEMA, header, rows)
    return 0


# ---------------------------------------------------------------------------
# schedule-dump
# ---------------------------------------------------------------------------

def cmd_schedule_dump(args) -> int:
    sched = linear_schedule(args.T, args.beta_min, args.beta_max)
    rows = [
        [t + 1, sched.beta[t], sched.alpha[t], sched.alpha_bar[t], sched.sigma[t]]
        for t in range(sched.T)
    ]
    _write_csv(args.out, rio.SCHEDULE_CSV_SCHEMA, "t,beta,alpha,alpha_bar,sigma", rows)
    print(f"wrote {sched.T}-step schedule to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rddm", description="Region-disentangled diffusion for PPG-to-ECG translation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic paired recordings")
    p.add_argument("--out", required=True)
    p.add_argument("--n-pairs", type=int, default=512)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--format", choices=["csv", "bin"], default="csv")
    p.add_argument("--hr-min", type=float, default=55.0)
    p.add_argument("--hr-max", type=float, default=90.0)
    p.add_argument("--jitter-max", type=float, default=0.05)
    p.add_argument("--delay-min", type=float, default=200.0)
    p.add_argument("--delay-max", type=float, default=200.0)
    p.add_argument("--noise-std", type=float, default=0.01)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", help="preprocess recordings into paired windows")
    p.add_argument("--input", nargs="+", required=True, help="recording files or directories")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("mask", help="emit ROI masks for a window file as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--gamma", type=int, default=32)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("train", help="train the translator (or the --baseline DDPM)")
    p.add_argument("--config", default=None, help="TOML run config")
    p.add_argument("--set", action="append", metavar="SEC.KEY=VAL", help="config override")
    p.add_argument("--data", default=None, help="windows file (default: synth per config)")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--log", default=None, help="JSON-lines training log path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--baseline", action="store_true", help="train the DDPM baseline instead")
    p.add_argument("--resume", default=None, help="checkpoint to continue from")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="translate PPG windows into ECG")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--input", required=True, help="windows file with a ppg channel")
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=None, help="override sampling steps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["bin", "csv"], default="bin")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", help="score generated windows against a reference")
    p.add_argument("--gen", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="inference-time benchmark across step counts")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--steps", default="10,25,50")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None, help="optional RMSE-vs-time scatter")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="metric vs hyper-parameter sweep")
    p.add_argument("--param", required=True, choices=["steps", "gamma"])
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--ckpt", default=None, help="trained checkpoint (steps sweep)")
    p.add_argument("--data", default=None, help="windows file (both sweeps)")
    p.add_argument("--eval-data", default=None, help="held-out windows (gamma sweep)")
    p.add_argument("--config", default=None)
    p.add_argument("--set", action="append", metavar="SEC.KEY=VAL")
    p.add_argument("--epochs", type=int, default=None, help="training budget per gamma value")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("schedule-dump", help="emit beta/alpha tables as CSV")
    p.add_argument("--T", type=int, default=10)
    p.add_argument("--beta-min", type=float, default=0.0001)
    p.add_argument("--beta-max", type=float, default=0.2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_schedule_dump)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CheckpointError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
