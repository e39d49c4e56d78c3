"""Evaluation: RMSE, discrete Fréchet distance, HR MAE, inference timing.

The Fréchet distance is the discrete variant with an amplitude-only point
metric: both windows share one time grid, so the coupling cost between points
i and j is |a_i - b_j|. The dynamic program is oracle-tested against an
exhaustive search over monotone couplings for short inputs.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch

from .diffusion import RddmModel, ddpm_sample, rddm_sample
from .dsp import Signal, SignalKind
from .errors import InvalidInputError, NoValidWindowsError, UndetectableRhythmError
from .net import Denoiser
from .qrs import estimate_hr
from .schedule import linear_schedule


@dataclass(frozen=True)
class EvalReport:
    rmse: float
    fd: float
    n_windows: int


@dataclass(frozen=True)
class HrMaeReport:
    mae_bpm: float
    n_scored: int
    n_skipped: int


@dataclass(frozen=True)
class TimingReport:
    method: str
    steps: int
    total_ms: float
    per_window_ms: float
    net_calls: int
    n_windows: int


def rmse(a: np.ndarray, b: np.ndarray) -> float:
    """Root mean squared error between two equal-length windows."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def frechet_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Discrete Fréchet distance with the amplitude-only point metric."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("frechet_distance needs non-empty inputs")
    n, m = a.size, b.size
    # Row-rolling DP over the |a_i - b_j| cost matrix.
    prev = [0.0] * m
    cur = [0.0] * m
    bl = b.tolist()
    for i, ai in enumerate(a.tolist()):
        for j, bj in enumerate(bl):
            d = abs(ai - bj)
            if i == 0 and j == 0:
                best = d
            elif i == 0:
                best = max(cur[j - 1], d)
            elif j == 0:
                best = max(prev[0], d)
            else:
                reach = min(prev[j], cur[j - 1], prev[j - 1])
                best = reach if reach > d else d
            cur[j] = best
        prev, cur = cur, prev
    return prev[m - 1]


def evaluate_windows(gen: np.ndarray, ref: np.ndarray) -> EvalReport:
    """Mean RMSE and Fréchet distance over aligned window stacks."""
    gen = np.atleast_2d(np.asarray(gen, dtype=np.float64))
    ref = np.atleast_2d(np.asarray(ref, dtype=np.float64))
    if gen.shape != ref.shape:
        raise InvalidInputError(f"shape mismatch: {gen.shape} vs {ref.shape}")
    rmses = [rmse(g, r) for g, r in zip(gen, ref)]
    fds = [frechet_distance(g, r) for g, r in zip(gen, ref)]
    return EvalReport(float(np.mean(rmses)), float(np.mean(fds)), gen.shape[0])


def hr_mae(
    gen_ecgs: Sequence[np.ndarray], truth_hrs: Sequence[float], rate_hz: float = 128.0
) -> HrMaeReport:
    """Mean absolute HR error in bpm over 8-second generated ECG segments.

    Segments where the detector finds fewer than two peaks are skipped and
    counted, not scored.
    """
    if len(gen_ecgs) != len(truth_hrs):
        raise InvalidInputError(
            f"{len(gen_ecgs)} windows vs {len(truth_hrs)} truth values"
        )
    errors = []
    skipped = 0
    for ecg, truth in zip(gen_ecgs, truth_hrs):
        try:
            est = estimate_hr(Signal(ecg, rate_hz, SignalKind.ECG))
        except UndetectableRhythmError:
            skipped += 1
            continue
        errors.append(abs(est - float(truth)))
    if not errors:
        raise NoValidWindowsError("no window had a detectable rhythm")
    return HrMaeReport(float(np.mean(errors)), len(errors), skipped)


def bench_inference(
    model: RddmModel | Denoiser,
    cond_windows: np.ndarray,
    steps_list: Sequence[int],
    seed: int = 0,
    beta_bounds: tuple[float, float] | None = None,
) -> list[TimingReport]:
    """Wall-clock translation timing per steps setting, single-threaded.

    One warmup batch runs before timing. ``net_calls`` counts per-window
    network evaluations: steps * windows * 2 for the two-network sampler,
    steps * windows for the baseline.
    """
    cond = torch.tensor(np.atleast_2d(cond_windows), dtype=torch.float32)
    n = cond.shape[0]
    is_rddm = isinstance(model, RddmModel)
    if beta_bounds is None:
        base = model.sched if is_rddm else linear_schedule()
        beta_bounds = (float(base.beta[0]), float(base.beta[-1]))

    def run(steps: int, windows: torch.Tensor, rng: torch.Generator) -> None:
        sched = linear_schedule(steps, *beta_bounds)
        if is_rddm:
            rddm_sample(model, windows, rng, sched=sched)
        else:
            ddpm_sample(model, windows, rng, sched)

    n_threads = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        reports = []
        for steps in steps_list:
            run(int(steps), cond[: min(2, n)], torch.Generator().manual_seed(seed))  # warmup
            nets = [model.eps_theta, model.rho_phi] if is_rddm else [model]
            calls_before = sum(net.eval_count for net in nets)
            t0 = time.perf_counter()
            run(int(steps), cond, torch.Generator().manual_seed(seed))
            total_ms = (time.perf_counter() - t0) * 1000.0
            net_calls = sum(net.eval_count for net in nets) - calls_before
            reports.append(
                TimingReport(
                    method="rddm" if is_rddm else "ddpm",
                    steps=int(steps),
                    total_ms=total_ms,
                    per_window_ms=total_ms / n,
                    net_calls=net_calls,
                    n_windows=n,
                )
            )
        return reports
    finally:
        torch.set_num_threads(n_threads)
