"""Command-line entry points: BER sweeps and capacity estimation.

`sweep` runs the coded Monte-Carlo pipeline over an SNR grid and emits
CSV; `capacity` estimates ergodic capacity at given SNRs (CSV rows of
gamma_db, mean, stderr) or bisects for the SNR of a target spectral
efficiency.  Flag values override --config file values, which override
the built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .capacity import ergodic_capacity, snr_for_rate
from .harness import SimConfig, run_sweep

import numpy as np

RATE_TO_DC = {"1/3": 3, "1/2": 4}

SWEEP_DEFAULTS = {
    "nt": 16,
    "nr": 16,
    "mod": "qpsk",
    "dc": None,
    "rate": None,
    "n_bits": 3456,
    "snr_start": 0.0,
    "snr_stop": 0.0,
    "snr_step": 0.5,
    "max_iter": 100,
    "min_errors": 100,
    "max_frames": 10**6,
    "seed": 0,
    "code_seed": 1,
    "workers": 1,
    "out": None,
    "code_file": None,
}


def _add_sweep_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with defaults for any flag below")
    p.add_argument("--nt", type=int, help="transmit antennas")
    p.add_argument("--nr", type=int, help="receive antennas (must equal --nt)")
    p.add_argument("--mod", choices=["bpsk", "qpsk", "16qam"], help="modulation")
    rate = p.add_mutually_exclusive_group()
    rate.add_argument("--rate", choices=sorted(RATE_TO_DC), help="code rate")
    rate.add_argument("--dc", type=int, help="parity-check row weight")
    p.add_argument("--n-bits", type=int, dest="n_bits", help="codeword length in bits")
    p.add_argument("--snr-start", type=float, dest="snr_start", help="grid start (dB)")
    p.add_argument("--snr-stop", type=float, dest="snr_stop", help="grid stop (dB)")
    p.add_argument("--snr-step", type=float, dest="snr_step", help="grid step (dB)")
    p.add_argument("--max-iter", type=int, dest="max_iter", help="decoder iteration cap")
    p.add_argument("--min-errors", type=int, dest="min_errors", help="frame-error events per point")
    p.add_argument("--max-frames", type=int, dest="max_frames", help="frame cap per point")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--code-seed", type=int, dest="code_seed", help="code construction seed")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--code-file", dest="code_file", help="load the parity-check matrix from this file if it exists, else construct and save it there")


def _resolve(args: argparse.Namespace) -> dict:
    resolved = dict(SWEEP_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            file_vals = json.load(fh)
        unknown = set(file_vals) - set(resolved)
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        resolved.update(file_vals)
    for key in resolved:
        val = getattr(args, key, None)
        if val is not None:
            resolved[key] = val
    # A rate given on the command line displaces a dc from the config file
    # and vice versa; they stay mutually exclusive.
    if args.dc is not None:
        resolved["rate"] = None
    elif args.rate is not None:
        resolved["dc"] = None
    return resolved


def _sweep_config(resolved: dict) -> SimConfig:
    if resolved["dc"] is not None and resolved["rate"] is not None:
        raise SystemExit("--rate and --dc are mutually exclusive")
    dc = resolved["dc"]
    if dc is None:
        dc = RATE_TO_DC[resolved["rate"] or "1/2"]
    m = 8
    if resolved["n_bits"] % m:
        raise SystemExit(f"--n-bits must be a multiple of {m}")
    return SimConfig(
        n_t=resolved["nt"],
        n_r=resolved["nr"],
        modulation=resolved["mod"],
        n_symbols=resolved["n_bits"] // m,
        dc=dc,
        m=m,
        code_seed=resolved["code_seed"],
        snr_start_db=resolved["snr_start"],
        snr_stop_db=resolved["snr_stop"],
        snr_step_db=resolved["snr_step"],
        max_iter=resolved["max_iter"],
        min_errors=resolved["min_errors"],
        max_frames=resolved["max_frames"],
        master_seed=resolved["seed"],
        workers=resolved["workers"],
        code_file=resolved["code_file"],
    )


def _cmd_sweep(args: argparse.Namespace) -> int:
    from .harness import format_csv

    resolved = _resolve(args)
    config = _sweep_config(resolved)
    records = run_sweep(config, out_path=resolved["out"])
    if resolved["out"] is None:
        sys.stdout.write(format_csv(config, records))
    return 0


def _cmd_capacity(args: argparse.Namespace) -> int:
    if (args.snr is None) == (args.target_rate is None):
        raise SystemExit("give exactly one of --snr or --target-rate")
    if args.target_rate is not None:
        gamma = snr_for_rate(
            args.nt,
            args.nr,
            args.target_rate,
            tol_db=args.tol_db,
            trials=args.trials or 10**4,
            seed=args.seed,
        )
        print(f"{gamma!r}")
        return 0
    trials = args.trials or 10**5
    rng = np.random.default_rng(args.seed)
    lines = [f"# capacity nt={args.nt} nr={args.nr} trials={trials} seed={args.seed}"]
    lines.append("gamma_db,mean_bps_hz,stderr")
    for gamma_db in args.snr:
        est = ergodic_capacity(args.nt, args.nr, gamma_db, trials=trials, rng=rng)
        lines.append(f"{est.gamma_db!r},{est.mean_bps_hz!r},{est.stderr!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbldpc-mimo",
        description="Non-binary LDPC coded large-MIMO link simulator",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-point progress")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="Monte-Carlo BER/FER sweep over SNR")
    _add_sweep_args(sweep)
    sweep.set_defaults(func=_cmd_sweep)

    cap = sub.add_parser("capacity", help="ergodic MIMO capacity estimation")
    cap.add_argument("--nt", type=int, required=True)
    cap.add_argument("--nr", type=int, required=True)
    cap.add_argument("--snr", type=float, nargs="+", help="SNR grid points (dB)")
    cap.add_argument("--target-rate", type=float, dest="target_rate", help="bps/Hz to invert for")
    cap.add_argument("--trials", type=int, help="draws per estimate (default 1e5, or 1e4 per bisection step)")
    cap.add_argument("--tol-db", type=float, dest="tol_db", default=0.05)
    cap.add_argument("--seed", type=int, default=0)
    cap.add_argument("--out", help="CSV output path (default stdout)")
    cap.set_defaults(func=_cmd_capacity)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
