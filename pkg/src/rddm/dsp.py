"""Signal preprocessing: resampling, filtering, normalization, windowing.

The paired-window pipeline runs resample -> filter -> z-score -> window ->
per-window min-max, producing aligned 4-second PPG/ECG windows at 128 Hz.
All functions are pure: same input, bit-identical output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import signal as sps

from .errors import AlignmentError, InvalidInputError

TARGET_RATE_HZ = 128.0
WINDOW_SECONDS = 4.0
WINDOW_LEN = 512
# Filter transients: leading/trailing span excluded from windowing.
EDGE_TRIM_S = 0.5
# Std/range guard: flatline segments normalize to zeros instead of blowing up.
EPS_GUARD = 1e-12

ECG_HIGHPASS_HZ = 0.5
PPG_BAND_HZ = (0.5, 8.0)
FILTER_ORDER = 4


class SignalKind(str, Enum):
    ECG = "ecg"
    PPG = "ppg"


@dataclass(frozen=True)
class Signal:
    """A uniformly sampled 1D waveform.

    Attributes:
        samples: amplitude array; finite, non-empty
        rate_hz: sampling rate in Hz, > 0
        kind: channel tag (ECG or PPG)
    """

    samples: np.ndarray
    rate_hz: float
    kind: SignalKind

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidInputError("signal must be a non-empty 1D array")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("signal contains non-finite samples")
        if not self.rate_hz > 0:
            raise InvalidInputError(f"rate_hz must be > 0, got {self.rate_hz}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return len(self) / self.rate_hz

    def with_samples(self, samples: np.ndarray, rate_hz: float | None = None) -> "Signal":
        return Signal(samples, self.rate_hz if rate_hz is None else rate_hz, self.kind)


@dataclass(frozen=True)
class PairedWindow:
    """An aligned fixed-length PPG/ECG pair, the training unit.

    Both channels are 512 samples (4 s at 128 Hz), min-max scaled to [-1, 1].
    """

    ppg: np.ndarray
    ecg: np.ndarray
    subject_id: str
    rate_hz: float = TARGET_RATE_HZ

    def __post_init__(self):
        ppg = np.asarray(self.ppg, dtype=np.float64)
        ecg = np.asarray(self.ecg, dtype=np.float64)
        object.__setattr__(self, "ppg", ppg)
        object.__setattr__(self, "ecg", ecg)
        if ppg.shape != (WINDOW_LEN,) or ecg.shape != (WINDOW_LEN,):
            raise InvalidInputError(
                f"paired window channels must have shape ({WINDOW_LEN},), "
                f"got {ppg.shape} / {ecg.shape}"
            )
        for name, ch in (("ppg", ppg), ("ecg", ecg)):
            if not np.all(np.isfinite(ch)):
                raise InvalidInputError(f"{name} channel contains non-finite samples")
            if np.abs(ch).max() > 1.0 + 1e-9:
                raise InvalidInputError(f"{name} channel outside [-1, 1]")


def resample(signal: Signal, target_hz: float) -> Signal:
    """Resample onto a uniform grid at ``target_hz`` by linear interpolation.

    When downsampling, an order-8 Butterworth low-pass at 0.45 * target_hz is
    applied first as anti-alias. Output length is round(len * target/rate);
    target_hz == rate_hz returns the input samples unchanged.
    """
    if not target_hz > 0:
        raise InvalidInputError(f"target_hz must be > 0, got {target_hz}")
    if target_hz == signal.rate_hz:
        return signal
    x = signal.samples
    if target_hz < signal.rate_hz:
        sos = sps.butter(8, 0.45 * target_hz, btype="lowpass", fs=signal.rate_hz, output="sos")
        x = sps.sosfiltfilt(sos, x)
    n_out = int(round(len(x) * target_hz / signal.rate_hz))
    if n_out < 1:
        raise InvalidInputError("resampled signal would be empty")
    t_old = np.arange(len(x)) / signal.rate_hz
    t_new = np.arange(n_out) / target_hz
    return signal.with_samples(np.interp(t_new, t_old, x), rate_hz=target_hz)


def _validate_band(rate_hz: float, *cutoffs: float) -> None:
    nyquist = rate_hz / 2.0
    for c in cutoffs:
        if not 0 < c < nyquist:
            raise InvalidInputError(
                f"cutoff {c} Hz outside (0, Nyquist={nyquist}) for rate {rate_hz} Hz"
            )


def butterworth_highpass(signal: Signal, cutoff_hz: float, order: int = FILTER_ORDER) -> Signal:
    """Zero-phase (forward-backward) Butterworth high-pass."""
    if order < 1:
        raise InvalidInputError(f"order must be >= 1, got {order}")
    _validate_band(signal.rate_hz, cutoff_hz)
    sos = sps.butter(order, cutoff_hz, btype="highpass", fs=signal.rate_hz, output="sos")
    return signal.with_samples(sps.sosfiltfilt(sos, signal.samples))


def butterworth_bandpass(
    signal: Signal, low_hz: float, high_hz: float, order: int = FILTER_ORDER
) -> Signal:
    """Zero-phase (forward-backward) Butterworth band-pass."""
    if order < 1:
        raise InvalidInputError(f"order must be >= 1, got {order}")
    if not low_hz < high_hz:
        raise InvalidInputError(f"band bounds must satisfy low < high, got ({low_hz}, {high_hz})")
    _validate_band(signal.rate_hz, low_hz, high_hz)
    sos = sps.butter(order, [low_hz, high_hz], btype="bandpass", fs=signal.rate_hz, output="sos")
    return signal.with_samples(sps.sosfiltfilt(sos, signal.samples))


def zscore(signal: Signal) -> Signal:
    """Normalize to mean 0, population std 1; flatline input maps to zeros."""
    x = signal.samples
    std = x.std()
    if std < EPS_GUARD:
        return signal.with_samples(np.zeros_like(x))
    return signal.with_samples((x - x.mean()) / std)


def minmax(signal: Signal) -> Signal:
    """Rescale to [-1, 1]; min maps to -1, max to +1; flatline maps to zeros."""
    return signal.with_samples(minmax_array(signal.samples))


def minmax_array(x: np.ndarray) -> np.ndarray:
    lo, hi = x.min(), x.max()
    if hi - lo < EPS_GUARD:
        return np.zeros_like(x)
    return 2.0 * (x - lo) / (hi - lo) - 1.0


def window(signal: Signal, seconds: float, stride_seconds: float | None = None) -> list[np.ndarray]:
    """Cut into fixed-length segments; the trailing partial segment is dropped.

    ``seconds * rate_hz`` must be an integer number of samples. With
    stride == seconds (the default) the segments are non-overlapping.
    """
    if stride_seconds is None:
        stride_seconds = seconds
    n = seconds * signal.rate_hz
    if abs(n - round(n)) > 1e-9:
        raise InvalidInputError(
            f"window of {seconds} s at {signal.rate_hz} Hz is not an integer sample count"
        )
    n = int(round(n))
    stride = int(round(stride_seconds * signal.rate_hz))
    if n < 1 or stride < 1:
        raise InvalidInputError("window and stride must be at least one sample")
    x = signal.samples
    return [x[start : start + n].copy() for start in range(0, len(x) - n + 1, stride)]


def preprocess_pair(
    ecg_raw: Signal,
    ppg_raw: Signal,
    subject_id: str = "",
    edge_trim_s: float = EDGE_TRIM_S,
) -> list[PairedWindow]:
    """Run the full pipeline on an aligned ECG/PPG recording.

    Both channels are resampled to 128 Hz, the ECG high-passed at 0.5 Hz and
    the PPG band-passed to 0.5-8 Hz (order 4, zero phase), z-scored over the
    whole recording, cut into 4-second windows (skipping ``edge_trim_s`` of
    filter transient at each end), and min-max scaled per window.

    Raises:
        AlignmentError: channel lengths differ by more than one sample after
            resampling.
    """
    ecg = resample(ecg_raw, TARGET_RATE_HZ)
    ppg = resample(ppg_raw, TARGET_RATE_HZ)
    if abs(len(ecg) - len(ppg)) > 1:
        raise AlignmentError(
            f"span mismatch after resampling: ecg {len(ecg)} vs ppg {len(ppg)} samples"
        )
    n = min(len(ecg), len(ppg))
    ecg = ecg.with_samples(ecg.samples[:n])
    ppg = ppg.with_samples(ppg.samples[:n])

    ecg = zscore(butterworth_highpass(ecg, ECG_HIGHPASS_HZ))
    ppg = zscore(butterworth_bandpass(ppg, *PPG_BAND_HZ))

    trim = int(round(edge_trim_s * TARGET_RATE_HZ))
    if 2 * trim >= n:
        return []
    span = slice(trim, n - trim if trim else n)
    ecg_segs = window(ecg.with_samples(ecg.samples[span]), WINDOW_SECONDS)
    ppg_segs = window(ppg.with_samples(ppg.samples[span]), WINDOW_SECONDS)

    return [
        PairedWindow(ppg=minmax_array(p), ecg=minmax_array(e), subject_id=subject_id)
        for p, e in zip(ppg_segs, ecg_segs)
    ]


def window_offset(index: int, edge_trim_s: float = EDGE_TRIM_S) -> int:
    """Start sample of preprocessed window ``index`` in 128 Hz recording coordinates."""
    return int(round(edge_trim_s * TARGET_RATE_HZ)) + index * WINDOW_LEN
