import numpy as np
import pytest

from fivmon.signal_core import TimeSeriesRecord

FS = 1.0 / 0.039e-3
N = 10240

_acceptance_lines = []


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion."""
    def record(criterion, ok, detail=""):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def tone(freq, amp=1.0, n=N, fs=FS, phase=0.0):
    t = np.arange(n) / fs
    return amp * np.sin(2 * np.pi * freq * t + phase)


def bin_tone(bin_index, amp=1.0, n=N, fs=FS, phase=0.0):
    """Tone with an integer number of periods in ``n`` samples."""
    return tone(bin_index * fs / n, amp, n, fs, phase)


def make_record(x, fs=FS, t=None):
    return TimeSeriesRecord(np.asarray(x, dtype=float), fs, t)
