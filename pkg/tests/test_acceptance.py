"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line that is printed in the terminal summary.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import FS, N, bin_tone, make_record
from fivmon.cli import main
from fivmon.extraction import extract_fiv, identify_reference_frequency
from fivmon.hwpt import HwptPlan, band_frequency_range, hwpt_decompose, reconstruct_band, \
    select_band_for_frequency
from fivmon.lubrication import (
    ContactSpec,
    Regime,
    SurfacePair,
    classify_regime,
    composite_modulus,
    composite_roughness,
    film_thickness_ratio,
    hamrock_dowson_hmin,
    hertz_max_pressure,
    reciprocating_velocities,
)
from fivmon.signal_core import rms
from fivmon.synth import SQUEAL_FREQS, generate_squeal_records
from test_lubrication import hmin_oracle

pytestmark = pytest.mark.acceptance

PSD_BIN = FS / 2048
CLOCK = "2022-01-01T00:00:00+00:00"


def check(log, name, conditions: dict, detail=""):
    failed = [k for k, ok in conditions.items() if not ok]
    log(name, not failed, detail + (f" failed: {', '.join(failed)}" if failed else ""))
    assert not failed, failed


def test_c1_squeal_reference_frequency(acceptance_log):
    t0 = time.perf_counter()
    recs = generate_squeal_records(SQUEAL_FREQS, seed=1)
    ref = identify_reference_frequency(recs)
    elapsed = time.perf_counter() - t0
    per_err = np.abs(np.array(ref.per_record_hz) - np.array(SQUEAL_FREQS))
    check(acceptance_log, "C1 squeal reference frequency", {
        "mean within one bin of 2385.4 Hz": abs(ref.mean_hz - 2385.4) <= PSD_BIN,
        "each record within one bin": bool(np.all(per_err <= PSD_BIN)),
        "runtime < 5 s": elapsed < 5,
    }, f"mean {ref.mean_hz:.2f} Hz (bin {PSD_BIN:.2f} Hz), {elapsed:.2f} s")


def test_c2_band_selection(acceptance_log):
    plan = HwptPlan.for_record(N, 25641.03, 7)
    band = select_band_for_frequency(plan, 2385.0)
    lo, hi = band_frequency_range(plan, band)
    check(acceptance_log, "C2 band selection", {
        "band index 23": band == 23,
        # exact edges are 23 and 24 times fs/256; 2403.846 appears as 2403.9 when rounded up
        "edges equal k*fs/256": lo == pytest.approx(23 * 25641.03 / 256, abs=1e-9)
        and hi == pytest.approx(24 * 25641.03 / 256, abs=1e-9),
        "edges within 0.1 Hz of [2303.7, 2403.9)": abs(lo - 2303.7) < 0.1 and abs(hi - 2403.9) < 0.1,
    }, f"band {band} [{lo:.2f}, {hi:.2f}) Hz")


def test_c3_reconstruction_and_parseval(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2022)
    worst_sample, worst_energy = 0.0, 0.0
    for i in range(100):
        n = (10240, 10000)[i % 2]
        x = rng.normal(size=n) * rng.uniform(0.1, 10)
        dec = hwpt_decompose(make_record(x), 7)
        total = sum(reconstruct_band(dec, k).samples for k in range(dec.plan.n_bands))
        worst_sample = max(worst_sample, float(np.max(np.abs(total - x))))
        direct = math.fsum(x * x) / n
        worst_energy = max(worst_energy, abs(dec.band_energies().sum() - direct) / direct)
    elapsed = time.perf_counter() - t0
    check(acceptance_log, "C3 HWPT reconstruction and Parseval", {
        "per-sample error <= 1e-9": worst_sample <= 1e-9,
        "energy error <= 1e-9": worst_energy <= 1e-9,
        "runtime < 30 s": elapsed < 30,
    }, f"max sample err {worst_sample:.2e}, max energy err {worst_energy:.2e}, {elapsed:.1f} s")


def test_c4_tone_extraction(acceptance_log):
    amp = 0.37
    plan = HwptPlan.for_record(N, FS, 7)
    lo, hi = band_frequency_range(plan, 23)
    in_band = make_record(amp * np.sin(2 * np.pi * (lo + hi) / 2 * np.arange(N) / FS + 0.4))
    got_in = rms(extract_fiv(in_band, 7, 23))
    out_band = make_record(bin_tone(200, amp))  # 500.8 Hz, integer period
    got_out = rms(extract_fiv(out_band, 7, 23))
    rel = abs(got_in - amp / math.sqrt(2)) / (amp / math.sqrt(2))
    check(acceptance_log, "C4 tone extraction fidelity", {
        "in-band rms within 1%": rel <= 0.01,
        "out-of-band rms <= 1e-6 A": got_out <= 1e-6 * amp,
    }, f"in-band rel err {rel:.2e}, out-of-band {got_out / amp:.2e} A")


def test_c5_lubrication_arithmetic(acceptance_log):
    before, after = SurfacePair(0.124, 0.547), SurfacePair(0.554, 0.279)
    sc_b, sc_a = composite_roughness(before), composite_roughness(after)
    lam_b, lam_a = film_thickness_ratio(5.51e-9, sc_b), film_thickness_ratio(5.51e-9, sc_a)
    spec = ContactSpec()
    e_star = composite_modulus(spec)
    p_max = hertz_max_pressure(spec).p_max
    slide, entrain = reciprocating_velocities(5e-3, 400)
    check(acceptance_log, "C5 lubrication arithmetic", {
        "sigma_c before 0.561": abs(sc_b - 0.561) <= 0.001,
        "sigma_c after 0.620": abs(sc_a - 0.620) <= 0.001,
        "lambda before 0.0098": abs(lam_b - 0.0098) <= 2e-4,
        "lambda after 0.0089": abs(lam_a - 0.0089) <= 2e-4,
        "boundary regime": classify_regime(lam_b) is Regime.BOUNDARY
        and classify_regime(lam_a) is Regime.BOUNDARY,
        "E* 226.9 GPa": abs(e_star / 1e9 - 226.9) <= 0.1,
        "p_max 3.0 GPa": abs(p_max / 1e9 - 3.0) <= 0.1,
        "velocities": abs(slide - 0.0667) <= 0.001 and abs(entrain - 0.0333) <= 0.001,
    }, f"sigma_c {sc_b:.4f}/{sc_a:.4f} um, lambda {lam_b:.5f}/{lam_a:.5f}, "
       f"E* {e_star / 1e9:.2f} GPa, p_max {p_max / 1e9:.3f} GPa")


def test_c6_film_thickness_formula(acceptance_log):
    spec = ContactSpec()
    h = hamrock_dowson_hmin(spec)
    oracle_rel = abs(h - hmin_oracle(spec)) / hmin_oracle(spec)
    ratios = {}
    for field, exponent in (("eta", 0.65), ("mu_entrain", 0.65), ("P_load", -0.21)):
        doubled = hamrock_dowson_hmin(ContactSpec(**{field: 2 * getattr(spec, field)}))
        ratios[field] = abs(doubled / h / 2 ** exponent - 1)
    regimes = [classify_regime(film_thickness_ratio(hh, composite_roughness(p)))
               for hh in (h, 5.51e-9)
               for p in (SurfacePair(0.124, 0.547), SurfacePair(0.554, 0.279))]
    check(acceptance_log, "C6 film-thickness formula", {
        "oracle within 1e-12": oracle_rel <= 1e-12,
        "exponent ratios within 1e-9": max(ratios.values()) <= 1e-9,
        "boundary for formula and 5.51 nm": all(r is Regime.BOUNDARY for r in regimes),
    }, f"h_min {h * 1e9:.4f} nm, oracle rel err {oracle_rel:.1e}")


def run_end_to_end(root):
    data, out = root / "data", root / "out"
    t0 = time.perf_counter()
    assert main(["synth", str(data)]) == 0
    code = main(["analyze", str(data / "records"), "--friction", str(data / "friction.csv"),
                 "--squeal-dir", str(data / "squeal"), "--out-dir", str(out),
                 "--clock", CLOCK, "--no-spectrum"])
    return code, out / "report.json", time.perf_counter() - t0


@pytest.fixture(scope="module")
def end_to_end(tmp_path_factory):
    return run_end_to_end(tmp_path_factory.mktemp("run1"))


def test_c7_end_to_end_running_in(acceptance_log, end_to_end):
    code, report_path, elapsed = end_to_end
    rep = json.loads(report_path.read_text())
    boundary = rep["segmentation"]["boundary_minutes"]
    stages = rep["stage_trends"]["stages"]
    trends = [s["trend"] for s in stages]
    means = [s["mean_rms"] for s in stages]
    check(acceptance_log, "C7 end-to-end running-in", {
        "exit code 0": code == 0,
        "boundary 40 +- 2 min": abs(boundary - 40) <= 2,
        "stage 1 rising": trends[0] == "rising",
        "stage 2 stable": len(trends) == 2 and trends[1] == "stable",
        "stage-2 mean > stage-1 mean": len(means) == 2 and means[1] > means[0],
        "runtime < 2 min": elapsed < 120,
    }, f"boundary {boundary:.2f} min, trends {trends}, mean ratio "
       f"{rep['stage_trends']['stage2_to_stage1_mean_ratio']:.3f}, {elapsed:.1f} s")


def test_c8_determinism(acceptance_log, end_to_end, tmp_path):
    _, first, _ = end_to_end
    code, second, _ = run_end_to_end(tmp_path)
    same = first.read_bytes() == second.read_bytes()
    check(acceptance_log, "C8 determinism", {"byte-identical report.json": same},
          f"sha-equal={same}")
