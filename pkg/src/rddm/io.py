"""File formats: recordings, window containers, and checkpoints.

Binary artifacts share one container layout: a single-line JSON manifest
(carrying a ``schema`` version tag) terminated by a newline, followed by a
raw little-endian float32 blob. CSV artifacts carry a ``# schema:`` comment
as their first line. See docs/formats.md.
"""
from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .dsp import Signal, SignalKind
from .errors import CheckpointError, InvalidInputError
from .net import Denoiser, NetConfig
from .schedule import NoiseSchedule, linear_schedule

RECORDING_CSV_SCHEMA = "rddm/recording-csv/v1"
RECORDING_BIN_SCHEMA = "rddm/recording-bin/v1"
TRUTH_SCHEMA = "rddm/recording-truth/v1"
WINDOWS_SCHEMA = "rddm/windows/v1"
CHECKPOINT_SCHEMA = "rddm/checkpoint/v1"
MASK_CSV_SCHEMA = "rddm/mask-csv/v1"
SCHEDULE_CSV_SCHEMA = "rddm/schedule-csv/v1"
REPORT_CSV_SCHEMA = "rddm/report-csv/v1"
SWEEP_CSV_SCHEMA = "rddm/sweep-csv/v1"
TRAIN_LOG_SCHEMA = "rddm/train-log/v1"


def _json_line(obj: dict) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode()


def write_container(path: str | Path, manifest: dict, blob: bytes = b"") -> None:
    manifest = dict(manifest)
    manifest["blob_bytes"] = len(blob)
    tmp = Path(path).with_suffix(Path(path).suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_json_line(manifest))
        fh.write(blob)
    tmp.replace(path)


def read_container(path: str | Path, expect_schema: str | None = None) -> tuple[dict, bytes]:
    with open(path, "rb") as fh:
        header = fh.readline()
        blob = fh.read()
    try:
        manifest = json.loads(header)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: not a container file ({exc})") from exc
    if manifest.get("blob_bytes") != len(blob):
        raise InvalidInputError(
            f"{path}: blob length {len(blob)} != declared {manifest.get('blob_bytes')}"
        )
    if expect_schema and manifest.get("schema") != expect_schema:
        raise InvalidInputError(
            f"{path}: schema {manifest.get('schema')!r}, expected {expect_schema!r}"
        )
    return manifest, blob


# ---------------------------------------------------------------------------
# Recordings (CSV with t,ppg,ecg columns, or f32 blob with JSON sidecar)
# ---------------------------------------------------------------------------

def write_recording_csv(path: str | Path, t: np.ndarray, ppg: np.ndarray, ecg: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema: {RECORDING_CSV_SCHEMA}\n")
        fh.write("t,ppg,ecg\n")
        for ti, pi, ei in zip(t, ppg, ecg):
            fh.write(f"{float(ti)!r},{float(pi)!r},{float(ei)!r}\n")


def write_recording_bin(path: str | Path, rate_hz: float, ppg: np.ndarray, ecg: np.ndarray) -> None:
    data = np.stack([ppg, ecg]).astype("<f4")
    sidecar = {
        "schema": RECORDING_BIN_SCHEMA,
        "rate_hz": rate_hz,
        "channels": ["ppg", "ecg"],
        "n_samples": int(data.shape[1]),
    }
    Path(path).write_bytes(data.tobytes())
    Path(str(path) + ".json").write_text(json.dumps(sidecar, sort_keys=True, indent=1) + "\n")


def read_recording(path: str | Path) -> tuple[Signal, Signal]:
    """Load a recording in either format, returning (ppg, ecg) signals."""
    path = Path(path)
    if path.suffix == ".csv":
        with open(path) as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
        if len(lines) < 3:
            raise InvalidInputError(f"{path}: recording needs at least 2 samples")
        header = [c.strip() for c in lines[0].split(",")]
        if header != ["t", "ppg", "ecg"]:
            raise InvalidInputError(f"{path}: expected header t,ppg,ecg, got {lines[0].strip()!r}")
        data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
        t, ppg, ecg = data[:, 0], data[:, 1], data[:, 2]
        dt = np.diff(t)
        if np.max(np.abs(dt - dt[0])) > 1e-6:
            raise InvalidInputError(f"{path}: time column is not uniformly sampled")
        rate = 1.0 / float(dt[0])
        return Signal(ppg, rate, SignalKind.PPG), Signal(ecg, rate, SignalKind.ECG)
    sidecar_path = Path(str(path) + ".json")
    if not sidecar_path.exists():
        raise InvalidInputError(f"{path}: missing JSON sidecar {sidecar_path.name}")
    sidecar = json.loads(sidecar_path.read_text())
    if sidecar.get("schema") != RECORDING_BIN_SCHEMA:
        raise InvalidInputError(f"{path}: unexpected sidecar schema {sidecar.get('schema')!r}")
    data = np.frombuffer(path.read_bytes(), dtype="<f4").reshape(len(sidecar["channels"]), -1)
    rate = float(sidecar["rate_hz"])
    chans = {name: data[i] for i, name in enumerate(sidecar["channels"])}
    return (
        Signal(chans["ppg"], rate, SignalKind.PPG),
        Signal(chans["ecg"], rate, SignalKind.ECG),
    )


# ---------------------------------------------------------------------------
# Window containers
# ---------------------------------------------------------------------------

@dataclass
class WindowSet:
    """A stack of equal-length windows with per-window metadata.

    ``data`` has shape (n_windows, n_channels, length); ``meta`` holds one
    dict per window (subject, index within subject, optional truth_hr).
    """

    data: np.ndarray
    channels: list[str]
    rate_hz: float
    meta: list[dict]

    def __len__(self) -> int:
        return self.data.shape[0]

    def channel(self, name: str) -> np.ndarray:
        return self.data[:, self.channels.index(name), :]


def write_windows(path: str | Path, ws: WindowSet, extra: dict | None = None) -> None:
    data = np.ascontiguousarray(ws.data, dtype="<f4")
    manifest = {
        "schema": WINDOWS_SCHEMA,
        "channels": ws.channels,
        "rate_hz": ws.rate_hz,
        "length": int(data.shape[2]),
        "windows": ws.meta,
    }
    if extra:
        manifest.update(extra)
    write_container(path, manifest, data.tobytes())


def read_windows(path: str | Path) -> tuple[WindowSet, dict]:
    manifest, blob = read_container(path, WINDOWS_SCHEMA)
    n = len(manifest["windows"])
    c = len(manifest["channels"])
    length = manifest["length"]
    data = np.frombuffer(blob, dtype="<f4").reshape(n, c, length).astype(np.float64)
    ws = WindowSet(data, list(manifest["channels"]), float(manifest["rate_hz"]), manifest["windows"])
    return ws, manifest


# ---------------------------------------------------------------------------
# Checkpoints: JSON manifest + little-endian float32 blob, bit-exact
# ---------------------------------------------------------------------------

def _flat_f32(net: Denoiser) -> np.ndarray:
    vec = torch.cat([p.detach().reshape(-1) for p in net.parameters()])
    if vec.dtype != torch.float32:
        raise CheckpointError("checkpoints store float32 parameters; net has " + str(vec.dtype))
    return vec.numpy().astype("<f4", copy=False)


def _segments(prefix: str, net: Denoiser, offset: int) -> tuple[list[dict], int]:
    segs = []
    for name, seg_offset, shape in net.parameter_segments():
        segs.append(
            {"name": f"{prefix}.{name}", "offset": offset + seg_offset, "shape": list(shape)}
        )
    return segs, offset + sum(p.numel() for p in net.parameters())


def _optimizer_blobs(optimizer: torch.optim.Optimizer, params: list[torch.Tensor]):
    """Serialize AdamW moments for the given parameter order."""
    avgs, sqs, step = [], [], 0
    for p in params:
        state = optimizer.state.get(p)
        if state is None:
            avgs.append(torch.zeros_like(p))
            sqs.append(torch.zeros_like(p))
        else:
            avgs.append(state["exp_avg"])
            sqs.append(state["exp_avg_sq"])
            step = int(state["step"])
    flat = lambda ts: torch.cat([t.reshape(-1) for t in ts]).numpy().astype("<f4", copy=False)
    return flat(avgs), flat(sqs), step


def save_checkpoint(
    path: str | Path,
    kind: str,
    nets: dict[str, Denoiser],
    sched: NoiseSchedule,
    hyper: dict,
    train_state: dict | None = None,
    optimizer: torch.optim.Optimizer | None = None,
) -> None:
    """Write a versioned checkpoint.

    ``nets`` maps segment prefixes (e.g. "eps_theta") to denoisers; all nets
    share one config. Optimizer moments and RNG states ride along when
    training state is supplied, making runs resumable.
    """
    names = sorted(nets)
    config = nets[names[0]].config
    segments, offset = [], 0
    blobs = []
    for name in names:
        segs, offset = _segments(name, nets[name], offset)
        segments.extend(segs)
        blobs.append(_flat_f32(nets[name]))
    manifest = {
        "schema": CHECKPOINT_SCHEMA,
        "kind": kind,
        "net_config": config.to_dict(),
        "nets": names,
        "schedule": {
            "T": sched.T,
            "beta_min": float(sched.beta[0]),
            "beta_max": float(sched.beta[-1]),
        },
        "hyper": hyper,
        "segments": segments,
        "param_values": offset,
    }
    if train_state is not None:
        manifest["train_state"] = {
            k: (base64.b64encode(v).decode() if isinstance(v, bytes) else v)
            for k, v in train_state.items()
        }
    if optimizer is not None:
        params = [p for name in names for p in nets[name].parameters()]
        avg, sq, step = _optimizer_blobs(optimizer, params)
        blobs.extend([avg, sq])
        manifest["optimizer"] = {"type": "adamw", "step": step}
    write_container(path, manifest, b"".join(b.tobytes() for b in blobs))


def load_checkpoint(path: str | Path) -> dict:
    """Read a checkpoint into nets + schedule + state.

    Returns a dict with keys: kind, config, nets (prefix -> Denoiser, float32),
    sched, hyper, train_state (may be {}), opt_moments (None or (avg, sq, step)).
    """
    manifest, blob = read_container(path, CHECKPOINT_SCHEMA)
    config = NetConfig.from_dict(manifest["net_config"])
    values = np.frombuffer(blob, dtype="<f4")
    names = manifest["nets"]
    nets: dict[str, Denoiser] = {}
    cursor = 0
    for name in names:
        net = Denoiser(config)
        n = sum(p.numel() for p in net.parameters())
        net.set_flat_parameters(torch.from_numpy(values[cursor : cursor + n].copy()))
        nets[name] = net
        cursor += n
    if cursor != manifest["param_values"]:
        raise CheckpointError(f"{path}: parameter blob does not match declared segment table")
    opt_moments = None
    if "optimizer" in manifest:
        n = cursor
        avg = values[n : 2 * n].copy()
        sq = values[2 * n : 3 * n].copy()
        opt_moments = (avg, sq, int(manifest["optimizer"]["step"]))
    s = manifest["schedule"]
    sched = linear_schedule(int(s["T"]), float(s["beta_min"]), float(s["beta_max"]))
    train_state = dict(manifest.get("train_state", {}))
    for key in ("rng_noise", "rng_shuffle"):
        if key in train_state:
            train_state[key] = base64.b64decode(train_state[key])
    return {
        "kind": manifest["kind"],
        "config": config,
        "nets": nets,
        "sched": sched,
        "hyper": dict(manifest["hyper"]),
        "train_state": train_state,
        "opt_moments": opt_moments,
        "manifest": manifest,
    }
