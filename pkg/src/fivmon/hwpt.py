"""Harmonic wavelet packet transform.

The transform works entirely in the DFT domain. A real signal of (padded)
length ``N`` has positive-frequency bins ``0 .. N/2``. At level ``L`` these
are split into ``2**L`` contiguous bands of ``M = N / 2**(L+1)`` bins each.
Band ``k`` owns bins ``[k*M, (k+1)*M)``; the DC bin therefore sits in band 0
and the Nyquist bin ``N/2`` is appended to the last band, so the bands tile
the whole spectrum.

Harmonic wavelet coefficients of band ``k`` are the length-``M`` inverse DFT
of that band's bins, i.e. the complex (analytic) band signal critically
sampled at ``fs / 2**L``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal_core import SignalError, TimeSeriesRecord


class HwptError(SignalError):
    pass


@dataclass(frozen=True)
class HwptPlan:
    level: int
    n_samples: int
    sample_rate: float
    n_padded: int

    def __post_init__(self):
        if self.level < 1:
            raise HwptError("level must be >= 1")
        if self.n_samples < 2 ** (self.level + 1):
            raise HwptError(
                f"band narrower than one bin: level {self.level} needs at least "
                f"{2 ** (self.level + 1)} samples, got {self.n_samples}")
        if self.n_padded % 2 ** (self.level + 1) or self.n_padded < self.n_samples:
            raise HwptError("n_padded must be a multiple of 2**(level+1) and >= n_samples")

    @classmethod
    def for_record(cls, n_samples: int, sample_rate: float, level: int) -> "HwptPlan":
        level = int(level)
        if level < 1:
            raise HwptError("level must be >= 1")
        step = 2 ** (level + 1)
        n_padded = -(-int(n_samples) // step) * step
        return cls(level, int(n_samples), float(sample_rate), n_padded)

    @property
    def n_bands(self) -> int:
        return 2 ** self.level

    @property
    def band_width_hz(self) -> float:
        return self.sample_rate / 2 ** (self.level + 1)

    @property
    def bins_per_band(self) -> int:
        return self.n_padded // 2 ** (self.level + 1)

    def band_bins(self, band_index: int) -> slice:
        """Slice into the one-sided (rfft) spectrum owned by ``band_index``."""
        k = _check_band(self, band_index)
        m = self.bins_per_band
        stop = (k + 1) * m
        if k == self.n_bands - 1:
            stop += 1  # Nyquist bin
        return slice(k * m, stop)


def _check_band(plan: HwptPlan, band_index) -> int:
    k = int(band_index)
    if k != band_index or not 0 <= k < plan.n_bands:
        raise HwptError(f"band index {band_index!r} out of range [0, {plan.n_bands})")
    return k


def _bin_weights(n_rfft: int) -> np.ndarray:
    # one-sided energy weights: interior bins stand for a conjugate pair
    w = np.full(n_rfft, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


@dataclass(frozen=True, eq=False)
class BandDecomposition:
    """Result of :func:`hwpt_decompose`.

    ``spectrum`` is the rfft of the zero-padded input; it is kept so any
    band can be rebuilt in the time domain. ``coefficients[k]`` are the
    harmonic wavelet coefficients of band ``k``, normalised so that
    ``sum(abs(c)**2)`` is the band's share of the input mean square. The only
    exception is the Nyquist bin, which has no slot among the ``M``
    coefficients of the last band; its energy is reported in
    ``nyquist_energy`` and included in ``band_energies()[-1]``.
    """

    plan: HwptPlan
    spectrum: np.ndarray
    coefficients: tuple
    source_energy: float
    sample_rate: float
    t_capture: float | None = None
    channel_label: str = ""

    def band_energies(self) -> np.ndarray:
        """Mean-square contribution of each band to the input signal."""
        p = _bin_weights(self.spectrum.size) * np.abs(self.spectrum) ** 2
        p /= self.plan.n_padded * self.plan.n_samples
        m = self.plan.bins_per_band
        energies = p[: self.plan.n_bands * m].reshape(self.plan.n_bands, m).sum(axis=1)
        energies[-1] += p[-1]
        return energies

    @property
    def nyquist_energy(self) -> float:
        return float(abs(self.spectrum[-1]) ** 2 / (self.plan.n_padded * self.plan.n_samples))


def hwpt_decompose(record: TimeSeriesRecord, level: int = 7) -> BandDecomposition:
    plan = HwptPlan.for_record(len(record), record.sample_rate, level)
    x = np.zeros(plan.n_padded)
    x[: plan.n_samples] = record.samples
    spectrum = np.fft.rfft(x)
    spectrum.setflags(write=False)

    m = plan.bins_per_band
    n_used = plan.n_bands * m
    weighted = np.sqrt(_bin_weights(spectrum.size))[:n_used] * spectrum[:n_used]
    # ifft carries 1/M; rescale so sum |c|^2 == (1/(N_pad*N)) sum w |X|^2
    scale = np.sqrt(m / (plan.n_padded * plan.n_samples))
    coeff = np.fft.ifft(weighted.reshape(plan.n_bands, m), axis=1) * scale
    coeff.setflags(write=False)
    coefficients = list(coeff)

    return BandDecomposition(
        plan=plan,
        spectrum=spectrum,
        coefficients=tuple(coefficients),
        source_energy=float(np.mean(np.square(record.samples))),
        sample_rate=record.sample_rate,
        t_capture=record.t_capture,
        channel_label=record.channel_label,
    )


def band_frequency_range(plan: HwptPlan, band_index: int) -> tuple[float, float]:
    """Half-open frequency interval ``[lo, hi)`` covered by a band, in Hz."""
    k = _check_band(plan, band_index)
    bw = plan.band_width_hz
    return k * bw, (k + 1) * bw


def select_band_for_frequency(plan: HwptPlan, target_hz: float) -> int:
    nyquist = plan.sample_rate / 2
    if not 0 <= target_hz < nyquist:
        raise HwptError(f"target {target_hz} Hz outside [0, {nyquist}) Hz")
    return min(int(np.floor(target_hz / plan.band_width_hz)), plan.n_bands - 1)


def reconstruct_band(decomposition: BandDecomposition, band_index: int) -> TimeSeriesRecord:
    """Real time-domain signal holding only ``band_index``; padding removed."""
    plan = decomposition.plan
    sl = plan.band_bins(band_index)
    isolated = np.zeros_like(decomposition.spectrum)
    isolated[sl] = decomposition.spectrum[sl]
    y = np.fft.irfft(isolated, n=plan.n_padded)[: plan.n_samples]
    lo, hi = band_frequency_range(plan, band_index)
    return TimeSeriesRecord(
        y, decomposition.sample_rate, decomposition.t_capture,
        decomposition.channel_label,
        metadata={"hwpt_level": plan.level, "band_index": int(band_index),
                  "band_range_hz": [lo, hi]},
    )
