from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from .signal_core import DEFAULT_OVERLAP, DEFAULT_SEGMENT_LENGTH, SignalError
from .wear_stage import DEFAULT_SLOPE_THRESHOLD, DEFAULT_TREND_Z


@dataclass(frozen=True)
class PipelineConfig:
    hwpt_level: int = 7
    squeal_search_range_hz: tuple = (1000.0, 5000.0)
    rms_window_s: float = 60.0
    slope_threshold: float = DEFAULT_SLOPE_THRESHOLD
    trend_z: float = DEFAULT_TREND_Z
    psd_segment_length: int = DEFAULT_SEGMENT_LENGTH
    psd_overlap: float = DEFAULT_OVERLAP
    channel: Optional[str] = None
    fiv_hz: Optional[float] = None
    band_index: Optional[int] = None

    def __post_init__(self):
        lo, hi = (float(v) for v in self.squeal_search_range_hz)
        object.__setattr__(self, "squeal_search_range_hz", (lo, hi))
        problems = []
        if int(self.hwpt_level) != self.hwpt_level or self.hwpt_level < 1:
            problems.append("hwpt_level must be an integer >= 1")
        if not 0 <= lo < hi:
            problems.append("squeal_search_range_hz must be an increasing pair >= 0")
        if not self.rms_window_s > 0:
            problems.append("rms_window_s must be positive")
        if not self.slope_threshold > 0:
            problems.append("slope_threshold must be positive")
        if not self.trend_z > 0:
            problems.append("trend_z must be positive")
        if self.psd_segment_length < 2:
            problems.append("psd_segment_length must be >= 2")
        if not 0 <= self.psd_overlap < 1:
            problems.append("psd_overlap must be in [0, 1)")
        if problems:
            raise SignalError("invalid config: " + "; ".join(problems))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["squeal_search_range_hz"] = list(self.squeal_search_range_hz)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SignalError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "squeal_search_range_hz" in data:
            data["squeal_search_range_hz"] = tuple(data["squeal_search_range_hz"])
        return cls(**data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "PipelineConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        return cls.loads(Path(path).read_text())
