"""Synthetic paired PPG/ECG generator with exact ground truth.

ECG beats are sums of Gaussian bumps (P, Q, R, S, T) with offsets and widths
proportional to the local RR interval; the R bump centers are the ground-truth
peak set. PPG is a deterministic function of the beat train: one asymmetric
systolic pulse plus a dicrotic bump per beat, delayed by the pulse-transit
time, band-limited well below 8 Hz by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dsp
from .dsp import PairedWindow, Signal, SignalKind
from .errors import InvalidInputError
from .qrs import RPeakSet

# Gaussian ECG components: (center offset, std, amplitude), offsets and stds
# as fractions of the local RR interval, amplitudes relative to R == 1.
ECG_WAVE_COMPONENTS = {
    "P": (-0.17, 0.025, 0.15),
    "Q": (-0.026, 0.008, -0.18),
    "R": (0.0, 0.010, 1.0),
    "S": (0.026, 0.008, -0.22),
    "T": (0.24, 0.045, 0.30),
}

# Systolic pulse: gamma-like bump u^2 exp(-u/s), peak 1 at u = 2s.
PPG_SYSTOLIC_RISE_S = 0.075
# Dicrotic notch bump: (delay after systolic onset, std, amplitude).
PPG_DICROTIC = (0.42, 0.07, 0.25)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic recording."""

    hr_bpm: float
    rr_jitter: float = 0.0
    duration_s: float = 9.0
    rate_hz: float = dsp.TARGET_RATE_HZ
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 30 <= self.hr_bpm <= 220:
            raise InvalidInputError(f"hr_bpm must be within [30, 220], got {self.hr_bpm}")
        if not 0 <= self.rr_jitter <= 0.2:
            raise InvalidInputError(f"rr_jitter must be within [0, 0.2], got {self.rr_jitter}")
        if self.duration_s <= 0 or self.rate_hz <= 0 or self.noise_std < 0:
            raise InvalidInputError("duration_s/rate_hz must be > 0 and noise_std >= 0")


@dataclass(frozen=True)
class SynthPair:
    """One synthetic recording preprocessed into aligned training windows."""

    windows: list[PairedWindow]
    truth_peaks: RPeakSet
    truth_hr: float
    subject_id: str
    delay_ms: float

    def peaks_in_window(self, index: int) -> np.ndarray:
        """Ground-truth peak indices of window ``index`` in window coordinates."""
        start = dsp.window_offset(index)
        local = self.truth_peaks.indices - start
        return local[(local >= 0) & (local < dsp.WINDOW_LEN)]


def _beat_times(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    # First beat one nominal period in, so an unjittered train at HR 60 puts
    # R-peaks exactly at multiples of the sampling rate.
    base_rr = 60.0 / spec.hr_bpm
    times = [base_rr]
    while True:
        rr = base_rr * (1.0 + spec.rr_jitter * rng.uniform(-1.0, 1.0))
        nxt = times[-1] + rr
        if nxt >= spec.duration_s - 0.05:
            break
        times.append(nxt)
    return np.asarray(times)


def ecg_bump_sum(t: np.ndarray, beat_times: np.ndarray, nominal_rr: float) -> np.ndarray:
    """Analytic clean ECG: PQRST Gaussians per beat, R amplitude 1."""
    x = np.zeros_like(t)
    for k, tau in enumerate(beat_times):
        rr = beat_times[k + 1] - tau if k + 1 < len(beat_times) else nominal_rr
        for offset, width, amp in ECG_WAVE_COMPONENTS.values():
            c, s = tau + offset * rr, width * rr
            lo = np.searchsorted(t, c - 5 * s)
            hi = np.searchsorted(t, c + 5 * s)
            seg = t[lo:hi]
            x[lo:hi] += amp * np.exp(-0.5 * ((seg - c) / s) ** 2)
    r_at = np.interp(beat_times, t, x)
    scale = r_at.mean() if len(beat_times) else 1.0
    return x / scale if scale > 1e-12 else x


def gen_ecg(spec: SynthSpec) -> tuple[Signal, RPeakSet]:
    """Generate a synthetic ECG; the returned peak set is exact ground truth."""
    rng = np.random.default_rng(spec.seed)
    n = int(round(spec.duration_s * spec.rate_hz))
    t = np.arange(n) / spec.rate_hz
    beats = _beat_times(spec, rng)
    x = ecg_bump_sum(t, beats, nominal_rr=60.0 / spec.hr_bpm)
    if spec.noise_std > 0:
        x = x + spec.noise_std * rng.standard_normal(n)
    r_idx = np.round(beats * spec.rate_hz).astype(np.int64)
    return Signal(x, spec.rate_hz, SignalKind.ECG), RPeakSet(r_idx, spec.rate_hz)


def gen_ppg_from_ecg(ecg: Signal, peaks: RPeakSet, delay_ms: float = 200.0) -> Signal:
    """Derive the paired PPG: one pulse per R-peak, onset delayed by delay_ms.

    The output is a pure function of the beat train (no noise); with zero
    peaks the PPG is flat zero.
    """
    if delay_ms < 0:
        raise InvalidInputError(f"delay_ms must be >= 0, got {delay_ms}")
    n = len(ecg)
    t = np.arange(n) / ecg.rate_hz
    x = np.zeros(n)
    s = PPG_SYSTOLIC_RISE_S
    d_off, d_std, d_amp = PPG_DICROTIC
    for p in peaks.indices:
        onset = p / ecg.rate_hz + delay_ms / 1000.0
        u = t - onset
        rising = u > 0
        v = u[rising]
        x[rising] += (v / (2 * s)) ** 2 * np.exp(2.0 - v / s)
        x += d_amp * np.exp(-0.5 * ((u - d_off) / d_std) ** 2)
    return Signal(x, ecg.rate_hz, SignalKind.PPG)


@dataclass(frozen=True)
class SpecRanges:
    """Uniform sampling ranges for dataset generation.

    The pulse-transit delay defaults to a single fixed value: a per-recording
    random delay is unrecoverable from one PPG window, which blurs the
    learnable peak placement the generator exists to provide.
    """

    hr_bpm: tuple[float, float] = (55.0, 90.0)
    rr_jitter: tuple[float, float] = (0.0, 0.05)
    delay_ms: tuple[float, float] = (200.0, 200.0)
    noise_std: float = 0.01
    duration_s: float = 9.0
    rate_hz: float = dsp.TARGET_RATE_HZ


def gen_raw_recording(spec: SynthSpec, delay_ms: float) -> tuple[Signal, Signal, RPeakSet]:
    """Raw (un-preprocessed) paired signals of one recording: (ppg, ecg, peaks)."""
    ecg, peaks = gen_ecg(spec)
    ppg = gen_ppg_from_ecg(ecg, peaks, delay_ms)
    if spec.noise_std > 0:
        rng = np.random.default_rng(np.random.SeedSequence((spec.seed, 1)))
        ppg = ppg.with_samples(ppg.samples + spec.noise_std * rng.standard_normal(len(ppg)))
    return ppg, ecg, peaks


def recording_hr(peaks: RPeakSet) -> float:
    return 60.0 * peaks.rate_hz / float(np.diff(peaks.indices).mean())


def gen_recording(spec: SynthSpec, delay_ms: float) -> SynthPair:
    """Generate one recording and preprocess it into paired windows."""
    ppg, ecg, peaks = gen_raw_recording(spec, delay_ms)
    subject = f"synth-{spec.seed:08x}"
    windows = dsp.preprocess_pair(ecg, ppg, subject_id=subject)
    return SynthPair(windows, peaks, recording_hr(peaks), subject, delay_ms)


def draw_spec(root: np.random.Generator, ranges: SpecRanges) -> tuple[SynthSpec, float]:
    """Draw one recording's parameters from the given ranges."""
    spec = SynthSpec(
        hr_bpm=root.uniform(*ranges.hr_bpm),
        rr_jitter=root.uniform(*ranges.rr_jitter),
        duration_s=ranges.duration_s,
        rate_hz=ranges.rate_hz,
        noise_std=ranges.noise_std,
        seed=int(root.integers(0, 2**31 - 1)),
    )
    return spec, root.uniform(*ranges.delay_ms)


def make_dataset(n_pairs: int, spec_ranges: SpecRanges | None = None, seed: int = 0) -> list[SynthPair]:
    """Generate recordings until ``n_pairs`` paired windows exist.

    Deterministic given ``seed``; per-recording parameters are drawn uniformly
    from ``spec_ranges``. The final recording is truncated so the total window
    count is exactly ``n_pairs``.
    """
    if n_pairs < 1:
        raise InvalidInputError(f"n_pairs must be >= 1, got {n_pairs}")
    ranges = spec_ranges or SpecRanges()
    root = np.random.default_rng(seed)
    out: list[SynthPair] = []
    total = 0
    while total < n_pairs:
        spec, delay = draw_spec(root, ranges)
        rec = gen_recording(spec, delay)
        if not rec.windows:
            continue
        if total + len(rec.windows) > n_pairs:
            rec = SynthPair(
                rec.windows[: n_pairs - total],
                rec.truth_peaks,
                rec.truth_hr,
                rec.subject_id,
                rec.delay_ms,
            )
        out.append(rec)
        total += len(rec.windows)
    return out


def all_windows(dataset: list[SynthPair]) -> list[PairedWindow]:
    return [w for rec in dataset for w in rec.windows]
