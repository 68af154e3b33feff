"""Reference-frequency identification, FIV band extraction and RMS series."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .hwpt import HwptPlan, hwpt_decompose, reconstruct_band, select_band_for_frequency
from .signal_core import (
    DEFAULT_OVERLAP,
    DEFAULT_SEGMENT_LENGTH,
    SignalError,
    TimeSeriesRecord,
    compute_power_spectrum,
    dominant_frequency,
    rms,
)

log = logging.getLogger(__name__)

DEFAULT_SQUEAL_RANGE = (1000.0, 5000.0)


@dataclass(frozen=True)
class ReferenceFrequency:
    mean_hz: float
    per_record_hz: tuple
    skipped: tuple = ()

    def __post_init__(self):
        if not self.per_record_hz:
            raise SignalError("reference frequency needs at least one record")

    @property
    def spread_hz(self) -> float:
        return max(self.per_record_hz) - min(self.per_record_hz)


@dataclass(frozen=True, eq=False)
class RmsSeries:
    window_centers: np.ndarray  # seconds
    rms_values: np.ndarray
    window_seconds: float
    records_per_window: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.window_centers, dtype=float)
        values = np.asarray(self.rms_values, dtype=float)
        if centers.shape != values.shape:
            raise SignalError("window_centers and rms_values differ in length")
        if np.any(np.diff(centers) <= 0):
            raise SignalError("window centers must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise SignalError("rms values must be finite and non-negative")
        object.__setattr__(self, "window_centers", centers)
        object.__setattr__(self, "rms_values", values)
        object.__setattr__(self, "records_per_window",
                           np.asarray(self.records_per_window, dtype=int))

    def __len__(self) -> int:
        return self.rms_values.size

    @property
    def window_centers_min(self) -> np.ndarray:
        return self.window_centers / 60.0


def _per_record_dominant(records, search_range, segment_length, overlap):
    found, skipped = [], []
    for i, rec in enumerate(records):
        try:
            if search_range[1] >= rec.sample_rate / 2:
                raise SignalError("search range reaches Nyquist")
            seg = min(segment_length, len(rec))
            spec = compute_power_spectrum(rec, seg, overlap)
            found.append((i, dominant_frequency(spec, search_range)))
        except SignalError as exc:
            log.warning("record %d skipped: %s", i, exc)
            skipped.append(i)
    return found, skipped


def identify_reference_frequency(squeal_records: Sequence[TimeSeriesRecord],
                                 search_range=DEFAULT_SQUEAL_RANGE,
                                 segment_length: int = DEFAULT_SEGMENT_LENGTH,
                                 overlap_fraction: float = DEFAULT_OVERLAP) -> ReferenceFrequency:
    """Mean of the per-record dominant frequencies within ``search_range``.

    Records with no usable component in range are skipped with a warning.
    """
    if not squeal_records:
        raise SignalError("no squeal records given")
    found, skipped = _per_record_dominant(squeal_records, search_range,
                                          segment_length, overlap_fraction)
    if not found:
        raise SignalError("no record has a dominant component in the search range")
    freqs = tuple(f for _, f in found)
    return ReferenceFrequency(float(np.mean(freqs)), freqs, tuple(skipped))


def band_occupancy_histogram(records: Sequence[TimeSeriesRecord], level: int = 7,
                             search_range=DEFAULT_SQUEAL_RANGE,
                             segment_length: int = DEFAULT_SEGMENT_LENGTH,
                             overlap_fraction: float = DEFAULT_OVERLAP) -> np.ndarray:
    """Count, per HWPT band, how many records have their dominant peak there."""
    if not records:
        raise SignalError("no records given")
    rates = {r.sample_rate for r in records}
    if len(rates) != 1:
        raise SignalError(f"records have mixed sample rates: {sorted(rates)}")
    plan = HwptPlan.for_record(len(records[0]), records[0].sample_rate, level)
    found, _ = _per_record_dominant(records, search_range, segment_length, overlap_fraction)
    if not found:
        raise SignalError("no record has a dominant component in the search range")
    counts = np.zeros(plan.n_bands, dtype=int)
    for _, f in found:
        counts[select_band_for_frequency(plan, f)] += 1
    return counts


def extract_fiv(record: TimeSeriesRecord, level: int = 7, band_index: int = 23) -> TimeSeriesRecord:
    out = reconstruct_band(hwpt_decompose(record, level), band_index)
    meta = dict(record.metadata)
    meta.update(out.metadata)
    meta["kind"] = "extracted-fiv"
    return TimeSeriesRecord(out.samples, out.sample_rate, record.t_capture,
                            record.channel_label, record.unit, meta)


def rms_series(records: Iterable[TimeSeriesRecord], level: int = 7, band_index: int = 23,
               window_seconds: float = 60.0) -> RmsSeries:
    """Windowed mean of per-record extracted-FIV RMS.

    Windows are fixed on an absolute grid ``[j*w, (j+1)*w)`` of capture
    time, so disjoint, window-aligned record sets give concatenable series.
    """
    records = list(records)
    if not records:
        raise SignalError("no records given")
    if not window_seconds > 0:
        raise SignalError("window_seconds must be positive")
    if any(r.t_capture is None for r in records):
        raise SignalError("records without t_capture cannot form a time series")

    groups: dict[int, list[float]] = {}
    for rec in records:
        j = int(np.floor(rec.t_capture / window_seconds))
        groups.setdefault(j, []).append(rms(extract_fiv(rec, level, band_index)))

    keys = sorted(groups)
    return RmsSeries(
        window_centers=np.array([(j + 0.5) * window_seconds for j in keys]),
        rms_values=np.array([np.mean(groups[j]) for j in keys]),
        window_seconds=float(window_seconds),
        records_per_window=np.array([len(groups[j]) for j in keys]),
    )


def most_occupied_band(counts: np.ndarray) -> int:
    # argmax takes the lowest band on ties
    return int(np.argmax(counts))

