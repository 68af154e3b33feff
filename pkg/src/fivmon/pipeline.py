"""End-to-end workflow: identify the FIV frequency, extract it, track its RMS,
segment the wear stages and assemble a JSON report."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import PipelineConfig
from .extraction import (
    ReferenceFrequency,
    RmsSeries,
    _per_record_dominant,
    band_occupancy_histogram,
    extract_fiv,
    identify_reference_frequency,
    most_occupied_band,
    rms_series,
)
from .hwpt import HwptPlan, band_frequency_range, select_band_for_frequency
from .io import RecordFileError, list_record_files, read_friction_csv, read_record, sha256_file
from .lubrication import LubricationReport
from .signal_core import SignalError, TimeSeriesRecord, compute_power_spectrum
from .wear_stage import (
    StageSegmentation,
    TrendClassification,
    classify_rms_trend,
    fit_friction_trend,
    segment_from_rms,
    segment_stages,
)

log = logging.getLogger(__name__)


@dataclass
class LoadedRecords:
    records: list
    files: list  # Path per loaded record
    errors: dict  # file name -> message

    def digests(self) -> dict:
        return {p.name: sha256_file(p) for p in self.files}


def load_records(directory, channel=None) -> LoadedRecords:
    records, files, errors = [], [], {}
    for path in list_record_files(directory):
        try:
            records.append(read_record(path, channel))
            files.append(path)
        except RecordFileError as exc:
            errors[path.name] = str(exc)
    return LoadedRecords(records, files, errors)


def common_sample_rate(records: Sequence[TimeSeriesRecord]) -> float:
    rates = {r.sample_rate for r in records}
    if len(rates) != 1:
        raise SignalError(f"mixed sample rates: {sorted(rates)}")
    return rates.pop()


def _clean(obj):
    """Make a structure JSON-safe; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps_report(data: dict) -> str:
    return json.dumps(_clean(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


def timestamp(clock: Optional[str]) -> str:
    if clock is not None:
        return clock
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _combined_digest(digests: dict) -> str:
    h = hashlib.sha256()
    for name in sorted(digests):
        h.update(f"{name}:{digests[name]}\n".encode())
    return h.hexdigest()


def reference_report(ref: ReferenceFrequency, names: Sequence[str], plan: HwptPlan,
                     band: int) -> dict:
    lo, hi = band_frequency_range(plan, band)
    return {
        "mean_hz": ref.mean_hz,
        "spread_hz": ref.spread_hz,
        "per_record": [{"file": n, "dominant_hz": f} for n, f in zip(names, ref.per_record_hz)],
        "skipped": list(ref.skipped),
        "band_index": band,
        "band_range_hz": [lo, hi],
        "hwpt_level": plan.level,
    }


def run_identify(loaded: LoadedRecords, config: PipelineConfig) -> dict:
    if not loaded.records:
        raise SignalError("no readable squeal records")
    fs = common_sample_rate(loaded.records)
    ref = identify_reference_frequency(loaded.records, config.squeal_search_range_hz,
                                       config.psd_segment_length, config.psd_overlap)
    names = [p.name for i, p in enumerate(loaded.files) if i not in set(ref.skipped)]
    skipped_names = [loaded.files[i].name for i in ref.skipped]
    plan = HwptPlan.for_record(len(loaded.records[0]), fs, config.hwpt_level)
    band = select_band_for_frequency(plan, ref.mean_hz)
    out = reference_report(ref, names, plan, band)
    out["skipped"] = skipped_names
    out["unreadable"] = dict(sorted(loaded.errors.items()))
    return out


@dataclass
class AnalysisReport:
    reference: dict
    band_index: int
    band_range_hz: tuple
    band_occupancy: dict
    rms: RmsSeries
    segmentation: StageSegmentation
    trends: TrendClassification
    friction_fit: Optional[dict] = None
    lubrication: Optional[LubricationReport] = None
    flags: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        seg = self.segmentation
        return {
            "reference_frequency": self.reference,
            "selected_band": {"index": self.band_index, "range_hz": list(self.band_range_hz)},
            "band_occupancy": self.band_occupancy,
            "rms_series": {
                "window_seconds": self.rms.window_seconds,
                "window_centers_s": self.rms.window_centers,
                "rms": self.rms.rms_values,
                "records_per_window": self.rms.records_per_window,
            },
            "segmentation": {
                "boundary_minutes": seg.boundary_minutes,
                "method": seg.method_tag,
                "stages": [{"label": lab, "start_min": lo, "end_min": hi}
                           for lab, (lo, hi) in seg.stages],
                "flags": list(seg.flags),
            },
            "friction_fit": self.friction_fit,
            "stage_trends": {
                "method": self.trends.method_tag,
                "stage2_to_stage1_mean_ratio": self.trends.mean_ratio,
                "stages": [{
                    "label": s.label,
                    "trend": s.trend,
                    "slope_per_min": s.slope_per_min,
                    "slope_stderr": s.slope_stderr,
                    "mean_rms": s.mean_rms,
                    "n_points": s.n_points,
                } for s in self.trends.stages],
            },
            "lubrication": None if self.lubrication is None else self.lubrication.to_dict(),
            "flags": list(self.flags),
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return dumps_report(self.to_dict())


def _reference_from_records(records, config, plan) -> tuple[ReferenceFrequency, str]:
    counts = band_occupancy_histogram(records, config.hwpt_level, config.squeal_search_range_hz,
                                      config.psd_segment_length, config.psd_overlap)
    band = most_occupied_band(counts)
    lo, hi = band_frequency_range(plan, band)
    found, _ = _per_record_dominant(records, config.squeal_search_range_hz,
                                    config.psd_segment_length, config.psd_overlap)
    in_band = tuple(f for _, f in found if lo <= f < hi)
    return ReferenceFrequency(float(np.mean(in_band)), in_band), "lubricated-records"


def run_analyze(loaded: LoadedRecords, config: PipelineConfig,
                friction_path=None, squeal: Optional[LoadedRecords] = None,
                lubrication: Optional[LubricationReport] = None,
                clock: Optional[str] = None) -> AnalysisReport:
    records = loaded.records
    if not records:
        raise SignalError("no readable records")
    missing = [p.name for p, r in zip(loaded.files, records) if r.t_capture is None]
    if missing:
        raise SignalError(f"records without t_capture_s: {', '.join(missing[:5])}"
                          + (" ..." if len(missing) > 5 else ""))
    fs = common_sample_rate(records)
    lengths = {len(r) for r in records}
    plan = HwptPlan.for_record(min(lengths), fs, config.hwpt_level)
    flags = []

    # 1. reference frequency
    if squeal is not None:
        if not squeal.records:
            raise SignalError("no readable squeal records")
        ref = identify_reference_frequency(squeal.records, config.squeal_search_range_hz,
                                           config.psd_segment_length, config.psd_overlap)
        names = [p.name for i, p in enumerate(squeal.files) if i not in set(ref.skipped)]
        source = "squeal-records"
    elif config.fiv_hz is not None:
        ref = ReferenceFrequency(float(config.fiv_hz), (float(config.fiv_hz),))
        names, source = ["config"], "config"
    else:
        ref, source = _reference_from_records(records, config, plan)
        names = [f"record-{i}" for i in range(len(ref.per_record_hz))]

    band = config.band_index if config.band_index is not None else \
        select_band_for_frequency(plan, ref.mean_hz)
    band_range = band_frequency_range(plan, band)
    reference = reference_report(ref, names, plan, band)
    reference["source"] = source

    counts = band_occupancy_histogram(records, config.hwpt_level, config.squeal_search_range_hz,
                                      config.psd_segment_length, config.psd_overlap)
    occupancy = {str(k): int(c) for k, c in enumerate(counts) if c}

    # 2. RMS of the extracted band
    series = rms_series(records, config.hwpt_level, band, config.rms_window_s)

    # 3. wear stages
    friction_fit = None
    if friction_path is not None:
        trace = read_friction_csv(friction_path)
        fit = fit_friction_trend(trace)
        seg = segment_stages(fit, trace, config.slope_threshold)
        friction_fit = {"mu0": fit.mu0, "mu_inf": fit.mu_inf, "tau_min": fit.tau,
                        "rmse": fit.rmse, "no_decay": fit.no_decay}
    else:
        seg = segment_from_rms(series)
    flags.extend(seg.flags)
    trends = classify_rms_trend(series, seg, config.trend_z)
    if any(s.trend == "insufficient data" for s in trends.stages):
        flags.append("insufficient_data")

    digests = loaded.digests()
    inputs = {"records": {"count": len(digests), "sha256": _combined_digest(digests)}}
    if loaded.errors:
        inputs["records"]["unreadable"] = dict(sorted(loaded.errors.items()))
    if friction_path is not None:
        inputs["friction"] = {"file": Path(friction_path).name,
                              "sha256": sha256_file(friction_path)}
    if squeal is not None:
        sd = squeal.digests()
        inputs["squeal"] = {"count": len(sd), "sha256": _combined_digest(sd)}
    provenance = {
        "tool": "fivmon",
        "version": __version__,
        "generated_at": timestamp(clock),
        "config": config.to_dict(),
        "inputs": inputs,
    }
    return AnalysisReport(reference, band, band_range, occupancy, series, seg, trends,
                          friction_fit, lubrication, sorted(set(flags)), provenance)


def mean_spectra(records, band_index: int, config: PipelineConfig):
    """Record-averaged PSD of the raw and of the extracted signals."""
    seg = min(config.psd_segment_length, min(len(r) for r in records))
    raw = np.zeros(seg // 2 + 1)
    ext = np.zeros_like(raw)
    freqs = None
    for r in records:
        s = compute_power_spectrum(r, seg, config.psd_overlap)
        e = compute_power_spectrum(extract_fiv(r, config.hwpt_level, band_index), seg,
                                   config.psd_overlap)
        raw += s.power
        ext += e.power
        freqs = s.frequencies
    return freqs, raw / len(records), ext / len(records)
