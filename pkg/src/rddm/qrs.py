"""R-peak detection, ROI mask construction, and heart-rate estimation.

The detector is Pan-Tompkins-style: band-pass 5-15 Hz, differentiate, square,
moving-window integrate, adaptive threshold. Thresholds are relative, so the
result is invariant to positive amplitude scaling of the input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .dsp import Signal, SignalKind
from .errors import InsufficientDataError, InvalidInputError, UndetectableRhythmError

# Minimum spacing between reported peaks.
REFRACTORY_S = 0.25
# Fiducial points are refined to the raw-ECG local maximum within this radius.
REFINE_RADIUS_S = 0.050
MIN_SIGNAL_S = 2.0
HR_WINDOW_S = 8.0

_BAND_HZ = (5.0, 15.0)
_INTEGRATION_S = 0.150


@dataclass(frozen=True)
class RPeakSet:
    """Sorted R-peak sample indices plus the rate they are expressed in."""

    indices: np.ndarray
    rate_hz: float

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        if idx.ndim != 1:
            raise InvalidInputError("peak indices must be a 1D array")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0):
            raise InvalidInputError("peak indices must be strictly increasing and non-negative")

    def __len__(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class RoiMask:
    """Binary mask over a window: 1 within gamma/2 samples of an R-peak."""

    bits: np.ndarray
    gamma: int

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        object.__setattr__(self, "bits", bits)
        if not np.all((bits == 0) | (bits == 1)):
            raise InvalidInputError("mask bits must be 0 or 1")

    def __len__(self) -> int:
        return self.bits.size

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())


def detect_rpeaks(ecg: Signal) -> RPeakSet:
    """Detect R-peaks on an ECG signal.

    Returns all peaks at least 0.25 s apart; each index is the local maximum
    of the raw ECG within +/-50 ms of the detector's fiducial point.

    Raises:
        InsufficientDataError: signal shorter than 2 s.
        InvalidInputError: wrong channel kind or rate below 100 Hz.
    """
    if ecg.kind is not SignalKind.ECG:
        raise InvalidInputError(f"detector expects an ECG signal, got {ecg.kind}")
    if ecg.rate_hz < 100:
        raise InvalidInputError(f"detector requires rate_hz >= 100, got {ecg.rate_hz}")
    if ecg.duration_s < MIN_SIGNAL_S:
        raise InsufficientDataError(
            f"need at least {MIN_SIGNAL_S} s of ECG, got {ecg.duration_s:.3f} s"
        )

    fs = ecg.rate_hz
    x = ecg.samples
    sos = sps.butter(3, _BAND_HZ, btype="bandpass", fs=fs, output="sos")
    band = sps.sosfiltfilt(sos, x)
    squared = np.gradient(band) ** 2
    win = max(1, int(round(_INTEGRATION_S * fs)))
    integrated = np.convolve(squared, np.ones(win) / win, mode="same")

    peak = integrated.max()
    if peak <= 1e-24:
        return RPeakSet(np.empty(0, dtype=np.int64), fs)

    refractory = int(round(REFRACTORY_S * fs))
    candidates, _ = sps.find_peaks(integrated, distance=refractory, height=peak * 1e-3)

    # Adaptive signal/noise running estimates (Pan-Tompkins thresholding).
    head = integrated[: int(2 * fs)]
    spki = 0.25 * head.max()
    npki = 0.5 * head.mean()
    fiducials = []
    for c in candidates:
        thr = npki + 0.25 * (spki - npki)
        if integrated[c] > thr:
            fiducials.append(c)
            spki = 0.125 * integrated[c] + 0.875 * spki
        else:
            npki = 0.125 * integrated[c] + 0.875 * npki

    radius = int(round(REFINE_RADIUS_S * fs))
    refined = []
    for f in fiducials:
        lo, hi = max(0, f - radius), min(len(x), f + radius + 1)
        refined.append(lo + int(np.argmax(x[lo:hi])))

    # Deduplicate after refinement, keeping the larger raw amplitude.
    kept: list[int] = []
    for r in sorted(set(refined)):
        if kept and r - kept[-1] < refractory:
            if x[r] > x[kept[-1]]:
                kept[-1] = r
        else:
            kept.append(r)
    return RPeakSet(np.asarray(kept, dtype=np.int64), fs)


def build_roi_mask(peaks: RPeakSet | np.ndarray, length: int, gamma: int) -> RoiMask:
    """Build the binary ROI mask for a window of ``length`` samples.

    bits[i] = 1 iff some peak index p satisfies p - gamma/2 <= i <= p + gamma/2
    (inclusive on both ends, so isolated peaks produce runs of gamma + 1 ones).
    Intervals are clipped to [0, length) and overlapping intervals merge.
    """
    if gamma < 2 or gamma % 2 != 0:
        raise InvalidInputError(f"gamma must be an even integer >= 2, got {gamma}")
    if length < 1:
        raise InvalidInputError(f"length must be >= 1, got {length}")
    idx = peaks.indices if isinstance(peaks, RPeakSet) else np.asarray(peaks, dtype=np.int64)
    bits = np.zeros(length, dtype=np.uint8)
    half = gamma // 2
    for p in idx:
        lo = max(0, int(p) - half)
        hi = min(length - 1, int(p) + half)
        if hi >= 0 and lo < length:
            bits[lo : hi + 1] = 1
    return RoiMask(bits, gamma)


def hr_from_peaks(peaks: RPeakSet) -> float:
    """Heart rate in bpm from the mean RR interval of a peak set."""
    if len(peaks) < 2:
        raise UndetectableRhythmError(f"need >= 2 peaks for a heart rate, got {len(peaks)}")
    mean_rr = float(np.diff(peaks.indices).mean())
    return 60.0 * peaks.rate_hz / mean_rr


def estimate_hr(ecg: Signal) -> float:
    """Estimate heart rate over an 8-second ECG window, in bpm.

    Raises:
        UndetectableRhythmError: fewer than two peaks detected.
    """
    expected = int(round(HR_WINDOW_S * ecg.rate_hz))
    if len(ecg) != expected:
        raise InvalidInputError(
            f"heart-rate estimation uses {HR_WINDOW_S:.0f}-second windows: "
            f"expected {expected} samples at {ecg.rate_hz} Hz, got {len(ecg)}"
        )
    return hr_from_peaks(detect_rpeaks(ecg))
