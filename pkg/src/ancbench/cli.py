"""Command-line front end: ``ancbench {run,compare,sweep,tables}``.

Exit codes: 0 success, 1 invalid arguments or spec, 2 runtime or I/O failure.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import harness
from .filters import ALGORITHMS, FilterConfig
from .noisegen import NOISE_KINDS, NoiseSpec
from .siggen import WavError

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--signal", choices=harness.SIGNAL_KINDS, default="sinusoid")
    p.add_argument("--audio", metavar="PATH", help="16-bit PCM WAV for --signal audio")
    p.add_argument("--noise", choices=NOISE_KINDS, default="white")
    p.add_argument("--order", type=int, default=FilterConfig.order)
    p.add_argument("--lambda", dest="lam", type=float, default=FilterConfig.forgetting_factor)
    p.add_argument("--delta", type=float, default=FilterConfig.init_delta)
    p.add_argument("--mu", type=float, default=FilterConfig.step_size,
                   help="GAL reflection step size")
    p.add_argument("--mu-ladder", type=float, default=FilterConfig.ladder_step,
                   help="GAL ladder step size")
    p.add_argument("--beta", type=float, default=FilterConfig.smoothing)
    p.add_argument("--snr-db", type=float, default=harness.DEFAULT_SNR_DB)
    p.add_argument("--samples", type=int, default=harness.DEFAULT_SAMPLES)
    p.add_argument("--window", type=int, default=100, help="MSE window length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--channel-len", type=int, default=4)
    p.add_argument("--out-dir", default="out")
    p.add_argument("--traces", action="store_true", help="write per-sample CSV traces")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock convergence seconds in summaries")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser():
    parser = _Parser(prog="ancbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="one experiment")
    _common(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="rls")

    p = sub.add_parser("compare", help="RLS, FTF and GAL on identical inputs")
    _common(p)

    p = sub.add_parser("sweep", help="vary one parameter")
    _common(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="rls")
    p.add_argument("--param", choices=harness.SWEEP_PARAMS, required=True)
    p.add_argument("--values", type=float, nargs="+", required=True)

    p = sub.add_parser("tables", help="grids behind tables 1, 3, 4 and 5")
    _common(p)
    return parser


def spec_from_args(args, algorithm="rls") -> harness.ExperimentSpec:
    if args.audio and args.signal != "audio" and args.command != "tables":
        raise UsageError("--audio requires --signal audio")
    if args.signal == "audio" and not args.audio and args.command != "tables":
        raise UsageError("--signal audio requires --audio PATH")
    cfg = FilterConfig(algorithm=algorithm, order=args.order, forgetting_factor=args.lam,
                       init_delta=args.delta, step_size=args.mu, ladder_step=args.mu_ladder,
                       smoothing=args.beta)
    sig = harness.SignalSpec()
    if args.signal != "audio":
        sig = harness.SignalSpec(kind=args.signal)
    elif args.audio:
        sig = harness.SignalSpec(kind="audio", path=args.audio)
    spec = harness.ExperimentSpec(
        signal=sig, noise=NoiseSpec(kind=args.noise), channel=f"random:{args.channel_len}",
        input_snr_db=args.snr_db, filter_cfg=cfg, n_samples=args.samples, seed=args.seed,
        mse_window=args.window)
    spec.validate()
    return spec


def _write_records(records, args, name="summary.json"):
    out = harness.ensure_dir(args.out_dir)
    harness.write_summary(records, os.path.join(out, name), args.timing)
    if args.traces:
        for r in records:
            harness.write_csv(r, os.path.join(out, harness.trace_name(r)))


def _report(records):
    for r in records:
        m = r.report
        print(f"{r.spec.signal.kind:9s} {r.spec.algorithm:4s} snr_in={m.input_snr_db:7.2f} dB  "
              f"snr_out={m.output_snr_db:8.3f} dB  corr={m.corr_coeff:.4f}  "
              f"conv={m.convergence_samples}")


def _dispatch(args):
    if args.command == "run":
        records = [harness.run_experiment(spec_from_args(args, args.algo), args.traces)]
        _write_records(records, args)
    elif args.command == "compare":
        records = harness.run_comparison(spec_from_args(args), args.jobs, args.traces)
        _write_records(records, args)
    elif args.command == "sweep":
        records = harness.run_sweep(spec_from_args(args, args.algo), args.param, args.values,
                                    args.jobs, args.traces)
        _write_records(records, args)
    else:
        base = spec_from_args(args)
        grid = harness.run_tables(base, args.audio, args.jobs, args.traces)
        out = harness.ensure_dir(args.out_dir)
        records = []
        for table, rows in grid.items():
            harness.write_table_summary(table, rows, os.path.join(out, f"table{table}.json"),
                                        args.timing)
            for recs in rows.values():
                for r in recs or ():
                    if all(r is not seen for seen in records):
                        records.append(r)
        if args.traces:
            for r in records:
                harness.write_csv(r, os.path.join(out, harness.trace_name(r)))
    _report(records)


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        _dispatch(args)
    except UsageError as exc:
        print(f"ancbench: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, WavError) as exc:
        print(f"ancbench: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"ancbench: invalid experiment: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ArithmeticError, RuntimeError) as exc:
        print(f"ancbench: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
