"""Signal containers, Welch PSD, RMS and spectral peak picking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import signal as sp_signal

DEFAULT_SEGMENT_LENGTH = 2048
DEFAULT_OVERLAP = 0.5


class SignalError(ValueError):
    """Raised for invalid records or spectra."""


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeriesRecord:
    """Uniformly sampled acceleration record.

    ``t_capture`` is seconds since experiment start and may be None for
    records that are not part of a time series (e.g. squeal captures).
    """

    samples: np.ndarray
    sample_rate: float
    t_capture: Optional[float] = None
    channel_label: str = ""
    unit: str = "m/s^2"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise SignalError("samples must be one-dimensional")
        if samples.size == 0:
            raise SignalError("record is empty")
        if np.iscomplexobj(samples):
            raise SignalError("samples must be real")
        samples = samples.astype(float)
        if not np.all(np.isfinite(samples)):
            raise SignalError("record contains non-finite samples")
        if not (np.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise SignalError("sample_rate must be positive")
        if self.t_capture is not None and not np.isfinite(self.t_capture):
            raise SignalError("t_capture must be finite")
        object.__setattr__(self, "samples", _frozen_array(samples))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def scaled(self, factor: float) -> "TimeSeriesRecord":
        return TimeSeriesRecord(self.samples * factor, self.sample_rate,
                                self.t_capture, self.channel_label,
                                self.unit, self.metadata)


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    frequencies: np.ndarray
    power: np.ndarray
    resolution_hz: float
    estimator_tag: str = ""

    def __post_init__(self):
        freqs = _frozen_array(self.frequencies)
        power = _frozen_array(self.power)
        if freqs.shape != power.shape or freqs.ndim != 1 or freqs.size == 0:
            raise SignalError("frequencies and power must be equal-length 1-D arrays")
        if np.any(np.diff(freqs) <= 0):
            raise SignalError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(power)) or np.any(power < 0):
            raise SignalError("power must be finite and non-negative")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "power", power)

    def integrated_power(self) -> float:
        return float(np.sum(self.power) * self.resolution_hz)

    def _range_mask(self, search_range: Sequence[float]) -> np.ndarray:
        lo, hi = search_range
        if not lo < hi:
            raise SignalError(f"empty search range {search_range!r}")
        mask = (self.frequencies >= lo) & (self.frequencies <= hi)
        if not mask.any():
            raise SignalError(f"search range {search_range!r} contains no bins")
        return mask


@dataclass(frozen=True)
class SpectralPeak:
    frequency: float
    power: float
    prominence: float


def compute_power_spectrum(record: TimeSeriesRecord,
                           segment_length: int = DEFAULT_SEGMENT_LENGTH,
                           overlap_fraction: float = DEFAULT_OVERLAP) -> PowerSpectrum:
    """One-sided Welch PSD with a Hann window.

    Uses density scaling, so ``sum(power) * resolution_hz`` is the
    window-weighted mean square of the record. DC and Nyquist bins are not
    doubled. No detrending is applied.

    Parameters
    ----------
    record : TimeSeriesRecord
    segment_length : int
        Samples per Welch segment (also the FFT length).
    overlap_fraction : float
        Fractional overlap between segments, in [0, 1).
    """
    segment_length = int(segment_length)
    if segment_length < 2:
        raise SignalError("segment_length must be at least 2")
    if not 0 <= overlap_fraction < 1:
        raise SignalError("overlap_fraction must be in [0, 1)")
    if len(record) < segment_length:
        raise SignalError(
            f"insufficient samples: {len(record)} < segment_length {segment_length}")
    noverlap = int(round(overlap_fraction * segment_length))
    noverlap = min(noverlap, segment_length - 1)
    freqs, power = sp_signal.welch(
        record.samples, fs=record.sample_rate, window="hann",
        nperseg=segment_length, noverlap=noverlap, detrend=False,
        return_onesided=True, scaling="density", average="mean")
    tag = (f"welch(hann, nperseg={segment_length}, noverlap={noverlap}, "
           f"one-sided, dc/nyquist unscaled)")
    return PowerSpectrum(freqs, power, record.sample_rate / segment_length, tag)


def rms(record) -> float:
    """Root mean square of a record or a plain sample array."""
    x = record.samples if isinstance(record, TimeSeriesRecord) else np.asarray(record, dtype=float)
    if x.size == 0:
        raise SignalError("record is empty")
    return float(np.sqrt(np.mean(np.square(x))))


def detect_peaks(spectrum: PowerSpectrum, min_prominence_ratio: float = 0.05,
                 search_range: Sequence[float] = (0.0, np.inf)) -> list[SpectralPeak]:
    """Local maxima inside ``search_range`` sorted by descending power.

    The prominence threshold is ``min_prominence_ratio`` times the largest
    power found in the range. Prominence is measured within the range only.
    """
    if not 0 < min_prominence_ratio <= 1:
        raise SignalError("min_prominence_ratio must be in (0, 1]")
    mask = spectrum._range_mask(search_range)
    freqs = spectrum.frequencies[mask]
    power = spectrum.power[mask]
    top = power.max()
    if top <= 0:
        return []
    idx, props = sp_signal.find_peaks(power, prominence=min_prominence_ratio * top)
    peaks = [SpectralPeak(float(freqs[i]), float(power[i]), float(p))
             for i, p in zip(idx, props["prominences"])]
    # stable sort keeps lower frequency first among equal powers
    peaks.sort(key=lambda p: -p.power)
    return peaks


def dominant_frequency(spectrum: PowerSpectrum,
                       search_range: Sequence[float] = (0.0, np.inf)) -> float:
    mask = spectrum._range_mask(search_range)
    power = spectrum.power[mask]
    if not np.any(power > 0):
        raise SignalError("no dominant component in search range")
    # argmax returns the first maximum, i.e. the lowest frequency on ties
    return float(spectrum.frequencies[mask][np.argmax(power)])
