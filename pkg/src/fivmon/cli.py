"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 analysis finished with degenerate-case
flags raised.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .io import read_record, sha256_file, write_friction_csv, write_record
from .lubrication import (
    build_inputs,
    hertz_max_pressure,
    lubrication_report,
    parse_params_text,
    parse_quantity,
)
from .pipeline import dumps_report, load_records, mean_spectra, run_analyze, run_identify
from .signal_core import compute_power_spectrum
from .synth import (
    RuninScenario,
    generate_runin_records,
    scenario_friction_trace,
    scenario_squeal_records,
)

EXIT_OK, EXIT_INPUT, EXIT_FLAGS = 0, 2, 3

log = logging.getLogger("fivmon")


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("pipeline config (override --config)")
    g.add_argument("--config", type=Path, help="JSON pipeline config file")
    g.add_argument("--hwpt-level", type=int)
    g.add_argument("--search-range", type=float, nargs=2, metavar=("LO", "HI"),
                   dest="squeal_search_range_hz")
    g.add_argument("--rms-window", type=float, dest="rms_window_s", help="seconds")
    g.add_argument("--slope-threshold", type=float, help="per minute")
    g.add_argument("--trend-z", type=float)
    g.add_argument("--psd-segment", type=int, dest="psd_segment_length")
    g.add_argument("--psd-overlap", type=float)
    g.add_argument("--channel", help="channel label or column index")
    g.add_argument("--fiv-hz", type=float, help="skip identification, use this frequency")
    g.add_argument("--band-index", type=int, help="force the extracted HWPT band")


def _config_from_args(args) -> PipelineConfig:
    base = PipelineConfig.load(args.config).to_dict() if args.config else PipelineConfig().to_dict()
    for key in base:
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    return PipelineConfig.from_dict(base)


def _write_json(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def cmd_identify(args) -> int:
    config = _config_from_args(args)
    loaded = load_records(args.squeal_dir, config.channel)
    for msg in loaded.errors.values():
        print(f"error: {msg}", file=sys.stderr)
    if not loaded.records:
        print("error: no readable squeal records", file=sys.stderr)
        return EXIT_INPUT
    result = run_identify(loaded, config)
    for item in result["per_record"]:
        print(f"{item['file']}: {item['dominant_hz']:.1f} Hz", file=sys.stderr)
    lo, hi = result["band_range_hz"]
    print(f"mean {result['mean_hz']:.1f} Hz -> band {result['band_index']} "
          f"[{lo:.1f}, {hi:.1f}) Hz", file=sys.stderr)
    _write_json(dumps_report(result), args.out)
    return EXIT_OK


def _read_lubrication_params(path: Path) -> dict:
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return json.loads(text)
    return parse_params_text(text)


def cmd_analyze(args) -> int:
    config = _config_from_args(args)
    loaded = load_records(args.records_dir, config.channel)
    for msg in loaded.errors.values():
        print(f"error: {msg}", file=sys.stderr)
    squeal = load_records(args.squeal_dir, config.channel) if args.squeal_dir else None
    lub = None
    if args.lubrication_params:
        pair, spec, override = build_inputs(_read_lubrication_params(args.lubrication_params))
        lub = lubrication_report(pair, spec, override)
    report = run_analyze(loaded, config, args.friction, squeal, lub, args.clock)

    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.to_json())
    rows = np.column_stack([report.rms.window_centers / 60.0, report.rms.rms_values,
                            report.rms.records_per_window])
    buf = io.StringIO()
    np.savetxt(buf, rows, fmt=["%.6g", "%.12g", "%d"], delimiter=",",
               header="time_min,rms,records", comments="")
    (out_dir / "rms_series.csv").write_text(buf.getvalue())
    if not args.no_spectrum:
        freqs, raw, ext = mean_spectra(loaded.records, report.band_index, config)
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([freqs, raw, ext]), fmt="%.12g", delimiter=",",
                   header="frequency_hz,psd_original,psd_extracted", comments="")
        (out_dir / "spectrum.csv").write_text(buf.getvalue())

    seg = report.segmentation
    print(f"reference {report.reference['mean_hz']:.1f} Hz ({report.reference['source']}), "
          f"band {report.band_index}; boundary {seg.boundary_minutes:.2f} min", file=sys.stderr)
    for s in report.trends.stages:
        print(f"  {s.label:<10s} {s.trend:<18s} mean rms {s.mean_rms:.4g}", file=sys.stderr)
    if report.flags:
        print(f"flags: {', '.join(report.flags)}", file=sys.stderr)
        return EXIT_FLAGS
    return EXIT_OK


def cmd_lubrication(args) -> int:
    params = _read_lubrication_params(args.params_file)
    if args.h_min is not None:
        params["h_min"] = args.h_min
    pair, spec, override = build_inputs(params)
    report = lubrication_report(pair, spec, override)
    data = report.to_dict()
    hz = hertz_max_pressure(spec)
    data["hertz"] = {"contact_radius_m": hz.contact_radius, "p_max_Pa": hz.p_max,
                     "p_mean_Pa": hz.p_mean}
    _write_json(dumps_report(data), args.out)
    print(f"lambda = {report.lambda_ratio:.4g} ({report.regime.value})", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args) -> int:
    scenario = RuninScenario()
    if args.scenario:
        scenario = RuninScenario.from_dict(json.loads(args.scenario.read_text()))
    if args.seed is not None:
        scenario = RuninScenario.from_dict({**scenario.to_dict(), "rng_seed": args.seed})
    out = args.out_dir
    try:
        (out / "records").mkdir(parents=True, exist_ok=True)
        (out / "squeal").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_INPUT
    data = generate_runin_records(scenario)
    width = max(4, len(str(len(data.records))))
    truth = []
    for i, rec in enumerate(data.records):
        name = f"rec_{i:0{width}d}.csv"
        write_record(out / "records" / name, rec)
        truth.append({"file": name, "t_capture_s": float(data.capture_times[i]),
                      "fiv_amplitude": float(data.envelope[i])})
    for i, rec in enumerate(scenario_squeal_records(scenario)):
        write_record(out / "squeal" / f"squeal_{i:02d}.csv", rec)
    write_friction_csv(out / "friction.csv", scenario_friction_trace(scenario))
    manifest = {
        "scenario": scenario.to_dict(),
        "records": truth,
        "squeal_true_hz": list(scenario.squeal_freqs),
        "digests": {
            "friction.csv": sha256_file(out / "friction.csv"),
        },
    }
    (out / "manifest.json").write_text(dumps_report(manifest))
    print(f"wrote {len(data.records)} records, {len(scenario.squeal_freqs)} squeal records "
          f"and friction.csv to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    rec = read_record(args.record, args.channel)
    seg = min(args.psd_segment, len(rec))
    spec = compute_power_spectrum(rec, seg, args.psd_overlap)
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack([spec.frequencies, spec.power]), fmt="%.12g",
               delimiter=",", header=f"frequency_hz,psd  # {spec.estimator_tag}", comments="")
    _write_json(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fivmon", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identify", help="dominant squeal frequency and HWPT band")
    p.add_argument("squeal_dir", type=Path)
    p.add_argument("--out", type=Path, help="JSON output file (default stdout)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("analyze", help="full FIV pipeline on time-stamped records")
    p.add_argument("records_dir", type=Path)
    p.add_argument("--friction", type=Path, help="friction trace CSV (time_min,mu)")
    p.add_argument("--squeal-dir", type=Path, help="squeal records for the reference frequency")
    p.add_argument("--lubrication-params", type=Path)
    p.add_argument("--out-dir", type=Path, default=Path("fivmon_out"))
    p.add_argument("--clock", help="fixed timestamp for the provenance block")
    p.add_argument("--no-spectrum", action="store_true", help="skip spectrum.csv export")
    _add_config_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lubrication", help="film-thickness ratio and lubrication regime")
    p.add_argument("params_file", type=Path, help="key = value file (or .json)")
    p.add_argument("--h-min", type=lambda s: parse_quantity(s, "h_min"),
                   help="override the computed minimum film thickness, e.g. '5.51 nm'")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_lubrication)

    p = sub.add_parser("synth", help="write a synthetic running-in data set")
    p.add_argument("out_dir", type=Path)
    p.add_argument("--scenario", type=Path, help="JSON scenario overrides")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("spectrum", help="Welch PSD of one record as CSV")
    p.add_argument("record", type=Path)
    p.add_argument("--channel")
    p.add_argument("--psd-segment", type=int, default=PipelineConfig().psd_segment_length)
    p.add_argument("--psd-overlap", type=float, default=PipelineConfig().psd_overlap)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
