"""Synthetic running-in, squeal and friction data with known ground truth."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .signal_core import SignalError, TimeSeriesRecord
from .wear_stage import FrictionTrace

SAMPLE_RATE = 1.0 / 0.039e-3  # 0.039 ms sampling interval
RECORD_SAMPLES = 10240
SQUEAL_FREQS = (2325.0, 2412.0, 2381.0, 2384.0, 2425.0)


@dataclass(frozen=True)
class RuninScenario:
    duration_minutes: float = 60.0
    record_interval_s: float = 6.0
    record_samples: int = RECORD_SAMPLES
    sample_rate: float = SAMPLE_RATE
    machine_tones: tuple = ((319.0, 0.5), (853.0, 0.3))
    fiv_hz: float = 2385.0
    fiv_envelope: tuple = (0.1, 6.0)  # (A_inf, tau in minutes)
    noise_rms: float = 0.3
    mu_trace_params: tuple = (0.129, 0.103, 12.0)  # (mu0, mu_inf, tau in minutes)
    friction_cadence_min: float = 0.1
    friction_noise_sd: float = 0.001
    squeal_freqs: tuple = SQUEAL_FREQS
    squeal_snr_db: float = 30.0
    rng_seed: int = 20221

    def __post_init__(self):
        tones = tuple((float(f), float(a)) for f, a in self.machine_tones)
        object.__setattr__(self, "machine_tones", tones)
        object.__setattr__(self, "fiv_envelope", tuple(float(v) for v in self.fiv_envelope))
        object.__setattr__(self, "mu_trace_params", tuple(float(v) for v in self.mu_trace_params))
        object.__setattr__(self, "squeal_freqs", tuple(float(v) for v in self.squeal_freqs))
        self.validate()

    def validate(self):
        nyq = self.sample_rate / 2
        problems = []
        if not self.duration_minutes > 0:
            problems.append("duration_minutes must be positive")
        if not self.record_interval_s > 0:
            problems.append("record_interval_s must be positive")
        if self.record_samples < 2:
            problems.append("record_samples must be >= 2")
        if not self.sample_rate > 0:
            problems.append("sample_rate must be positive")
        if any(a < 0 for _, a in self.machine_tones) or self.fiv_envelope[0] < 0:
            problems.append("amplitudes must be non-negative")
        if any(not 0 <= f < nyq for f, _ in self.machine_tones):
            problems.append("machine tone at or above Nyquist")
        if not 0 < self.fiv_hz < nyq:
            problems.append("fiv_hz must be below Nyquist")
        if any(not 0 < f < nyq for f in self.squeal_freqs):
            problems.append("squeal frequency at or above Nyquist")
        if self.fiv_envelope[1] <= 0 or self.mu_trace_params[2] <= 0:
            problems.append("time constants must be positive")
        if self.noise_rms < 0 or self.friction_noise_sd < 0:
            problems.append("noise levels must be non-negative")
        if not self.friction_cadence_min > 0:
            problems.append("friction_cadence_min must be positive")
        if problems:
            raise SignalError("invalid scenario: " + "; ".join(problems))

    @property
    def n_records(self) -> int:
        # records start at 0 s and must begin before the end of the run
        return int(math.ceil(self.duration_minutes * 60.0 / self.record_interval_s - 1e-9))

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = [list(x) if isinstance(x, tuple) else x for x in v]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RuninScenario":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SignalError(f"unknown scenario keys: {sorted(unknown)}")
        conv = {}
        for k, v in data.items():
            if isinstance(v, list):
                v = tuple(tuple(x) if isinstance(x, list) else x for x in v)
            conv[k] = v
        return cls(**conv)


@dataclass(frozen=True, eq=False)
class RuninData:
    records: list
    envelope: np.ndarray  # true FIV amplitude per record
    capture_times: np.ndarray  # seconds
    scenario: RuninScenario = field(repr=False, default=None)


def fiv_envelope(t_minutes, a_inf: float, tau_minutes: float):
    return a_inf * (1.0 - np.exp(-np.asarray(t_minutes, dtype=float) / tau_minutes))


def _tone(t, freq, amp, phase):
    return amp * np.sin(2 * np.pi * freq * t + phase)


def generate_runin_records(scenario: RuninScenario = RuninScenario()) -> RuninData:
    """Lubricated running-in records: machine tones + enveloped FIV tone + noise.

    Every record gets its own child seed, so output depends only on the
    scenario and is identical across runs.
    """
    n = scenario.n_records
    t_cap = np.arange(n) * scenario.record_interval_s
    a_inf, tau = scenario.fiv_envelope
    env = fiv_envelope(t_cap / 60.0, a_inf, tau)
    t = np.arange(scenario.record_samples) / scenario.sample_rate
    children = np.random.SeedSequence(scenario.rng_seed).spawn(n)
    records = []
    for i in range(n):
        rng = np.random.default_rng(children[i])
        x = np.zeros_like(t)
        for f, a in scenario.machine_tones:
            x += _tone(t, f, a, rng.uniform(0, 2 * np.pi))
        x += _tone(t, scenario.fiv_hz, env[i], rng.uniform(0, 2 * np.pi))
        if scenario.noise_rms > 0:
            x += rng.normal(0.0, scenario.noise_rms, t.size)
        records.append(TimeSeriesRecord(x, scenario.sample_rate, float(t_cap[i]),
                                        channel_label="z"))
    return RuninData(records, env, t_cap, scenario)


def generate_squeal_records(freqs_hz, sample_rate: float = SAMPLE_RATE,
                            record_samples: int = RECORD_SAMPLES,
                            snr_db: float | None = 30.0, amplitude: float = 1.0,
                            seed: int = 0) -> list[TimeSeriesRecord]:
    """One tone-dominated record per frequency; ``snr_db=None`` means no noise."""
    nyq = sample_rate / 2
    bad = [f for f in freqs_hz if not 0 < f < nyq]
    if bad:
        raise SignalError(f"squeal frequencies at or above Nyquist ({nyq:.2f} Hz): {bad}")
    t = np.arange(record_samples) / sample_rate
    children = np.random.SeedSequence(seed).spawn(len(freqs_hz))
    out = []
    for f, ss in zip(freqs_hz, children):
        rng = np.random.default_rng(ss)
        x = _tone(t, f, amplitude, rng.uniform(0, 2 * np.pi))
        if snr_db is not None:
            noise_sd = amplitude / np.sqrt(2) / 10 ** (snr_db / 20)
            x = x + rng.normal(0.0, noise_sd, t.size)
        out.append(TimeSeriesRecord(x, sample_rate, None, channel_label="z",
                                    metadata={"true_hz": float(f)}))
    return out


def generate_friction_trace(params=(0.129, 0.103, 12.0), duration_minutes: float = 60.0,
                            cadence_minutes: float = 0.1, noise_sd: float = 0.0,
                            seed: int = 0) -> FrictionTrace:
    """Exponential-decay friction coefficient sampled on a regular grid."""
    mu0, mu_inf, tau = params
    n = int(round(duration_minutes / cadence_minutes)) + 1
    t = np.arange(n) * cadence_minutes
    mu = mu_inf + (mu0 - mu_inf) * np.exp(-t / tau)
    if noise_sd > 0:
        mu = mu + np.random.default_rng(seed).normal(0.0, noise_sd, n)
    return FrictionTrace(t, np.maximum(mu, 1e-6))


def scenario_friction_trace(scenario: RuninScenario) -> FrictionTrace:
    # offset seed keeps the friction noise independent of record noise
    return generate_friction_trace(scenario.mu_trace_params, scenario.duration_minutes,
                                   scenario.friction_cadence_min, scenario.friction_noise_sd,
                                   seed=scenario.rng_seed + 1)


def scenario_squeal_records(scenario: RuninScenario) -> list[TimeSeriesRecord]:
    return generate_squeal_records(scenario.squeal_freqs, scenario.sample_rate,
                                   scenario.record_samples, scenario.squeal_snr_db,
                                   seed=scenario.rng_seed + 2)
