"""Reference-frequency error against SNR for the five squeal tones."""

import argparse

import numpy as np

from fivmon.extraction import identify_reference_frequency
from fivmon.synth import SAMPLE_RATE, SQUEAL_FREQS, generate_squeal_records


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--snr", type=float, nargs="+", default=[30, 20, 10, 5, 0, -5])
    args = ap.parse_args(argv)
    psd_bin = SAMPLE_RATE / 2048
    truth = np.array(SQUEAL_FREQS)
    print(f"PSD bin {psd_bin:.2f} Hz; true mean {truth.mean():.1f} Hz")
    print(f"{'SNR dB':>7s} {'within 1 bin':>13s} {'max |err| Hz':>13s}")
    for snr in args.snr:
        errs = []
        for seed in range(args.trials):
            ref = identify_reference_frequency(generate_squeal_records(truth, snr_db=snr,
                                                                       seed=seed))
            errs.append(np.abs(np.array(ref.per_record_hz) - truth))
        errs = np.concatenate(errs)
        print(f"{snr:7.1f} {np.mean(errs <= psd_bin):13.1%} {errs.max():13.2f}")


if __name__ == "__main__":
    main()
