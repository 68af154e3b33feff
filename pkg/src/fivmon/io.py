"""Record and friction-trace CSV files.

Record files carry ``# key=value`` header lines followed by one sample per
line (one column per channel)::

    # fs_hz=25641.025641
    # t_capture_s=6
    # channel=x,y,z
    0.0123,0.0051,-0.0332
    ...
"""

from __future__ import annotations

import hashlib
import io
from pathlib import Path

import numpy as np

from .signal_core import SignalError, TimeSeriesRecord
from .wear_stage import FrictionTrace

TRACE_FMT = "%.12g"


class RecordFileError(SignalError):
    pass


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_record(path, record: TimeSeriesRecord, extra_channels: dict | None = None):
    """Write a record (plus optional extra columns of equal length)."""
    labels = [record.channel_label or "ch0"]
    columns = [record.samples]
    for label, data in (extra_channels or {}).items():
        labels.append(label)
        columns.append(np.asarray(data, dtype=float))
    lines = [f"# fs_hz={record.sample_rate!r}"]
    if record.t_capture is not None:
        lines.append(f"# t_capture_s={record.t_capture!r}")
    lines.append(f"# channel={','.join(labels)}")
    # repr is the shortest string that round-trips a float exactly
    if len(columns) == 1:
        body = map(repr, columns[0].tolist())
    else:
        body = (",".join(map(repr, row)) for row in np.column_stack(columns).tolist())
    lines.extend(body)
    Path(path).write_text("\n".join(lines) + "\n")


def read_record(path, channel: str | int | None = None) -> TimeSeriesRecord:
    """Load one channel from a record file.

    ``channel`` may be a label from the ``# channel=`` header or a column
    index; the first column is used when it is None.
    """
    path = Path(path)
    header = {}
    try:
        text = path.read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise RecordFileError(f"{path.name}: cannot read ({exc})") from exc
    body_start = 0
    lines = text.splitlines()
    for i, line in enumerate(lines):
        s = line.strip()
        if not s:
            continue
        if not s.startswith("#"):
            body_start = i
            break
        kv = s.lstrip("#").strip()
        if "=" in kv:
            k, v = kv.split("=", 1)
            header[k.strip()] = v.strip()
    else:
        raise RecordFileError(f"{path.name}: no samples")

    if "fs_hz" not in header:
        raise RecordFileError(f"{path.name}: missing '# fs_hz=' header")
    try:
        fs = float(header["fs_hz"])
        t_cap = float(header["t_capture_s"]) if "t_capture_s" in header else None
    except ValueError as exc:
        raise RecordFileError(f"{path.name}: bad header value ({exc})") from exc
    labels = [c.strip() for c in header.get("channel", "").split(",") if c.strip()]

    try:
        data = np.loadtxt(io.StringIO("\n".join(lines[body_start:])), delimiter=",", ndmin=2)
    except ValueError as exc:
        raise RecordFileError(f"{path.name}: bad sample data ({exc})") from exc

    if channel is None:
        col = 0
    elif isinstance(channel, int) or str(channel).isdigit():
        col = int(channel)
    elif channel in labels:
        col = labels.index(channel)
    else:
        raise RecordFileError(f"{path.name}: no channel {channel!r} (have {labels})")
    if col >= data.shape[1]:
        raise RecordFileError(f"{path.name}: channel index {col} out of range")
    label = labels[col] if col < len(labels) else f"ch{col}"
    try:
        return TimeSeriesRecord(data[:, col], fs, t_cap, channel_label=label,
                                metadata={"source": path.name})
    except SignalError as exc:
        raise RecordFileError(f"{path.name}: {exc}") from exc


def list_record_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise RecordFileError(f"{directory}: not a directory")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() == ".csv" and p.is_file())


def write_friction_csv(path, trace: FrictionTrace):
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack([trace.times, trace.mu_values]), fmt=TRACE_FMT,
               delimiter=",", header="time_min,mu", comments="")
    Path(path).write_text(buf.getvalue())


def read_friction_csv(path) -> FrictionTrace:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise RecordFileError(f"{Path(path).name}: cannot read friction trace ({exc})") from exc
    if data.shape[1] < 2:
        raise RecordFileError(f"{Path(path).name}: expected columns time_min,mu")
    return FrictionTrace(data[:, 0], data[:, 1])
