"""
Command line for the threshold experiment, decoder replay and distillation tables.

    python -m surface_app.cli run --distances 3,5,7 --p-min 3e-3 --p-max 1.2e-2 --p-steps 8 \
        --trials 2000 --max-cycles 100000 --seed 1 --out results.csv
    python -m surface_app.cli plotdata results.csv --baseline baseline.csv
    python -m surface_app.cli estimate results.csv
"""

import argparse
import sys
from pathlib import Path

import pandas as pd
from loguru import logger

from surface_app.config import config
from surface_app.exceptions import BaseError
from surface_app.logic.constants import DEFAULT_DISTANCES, DEFAULT_P_MAX, DEFAULT_P_MIN, DEFAULT_P_STEPS, \
    REPLAY_COLUMNS
from surface_app.logic.helpers import magic_lab, threshold
from surface_app.logic.helpers.decoder import replay_trace
from surface_app.logic.helpers.frame_simulator import SyndromeTrace
from surface_app.logic.helpers.noise_model import NoiseParams
from surface_app.logic.helpers.planar_lattice import build_lattice
from surface_app.schemas import BaselineCell, CodeFamily, IdleNoise, SweepConfig


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        logger.info(f"Wrote {out}")


def _rate_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p-min", type=float, default=DEFAULT_P_MIN)
    parser.add_argument("--p-max", type=float, default=DEFAULT_P_MAX)
    parser.add_argument("--p-steps", type=int, default=DEFAULT_P_STEPS)
    parser.add_argument("--ps", type=_float_list, default=None, help="explicit comma-separated rates")


def _rates(args: argparse.Namespace) -> list[float]:
    if args.ps:
        return args.ps
    return SweepConfig.log_grid(args.p_min, args.p_max, args.p_steps)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threshold", description=__doc__.splitlines()[1])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="sweep distances and error rates, write the summary CSV")
    run.add_argument("--distances", type=_int_list, default=DEFAULT_DISTANCES)
    _rate_options(run)
    run.add_argument("--trials", type=int, default=200)
    run.add_argument("--max-cycles", type=int, default=config.get_int("MAX_CYCLES", 100_000))
    run.add_argument("--seed", type=int, default=config.get_int("SEED", 0))
    run.add_argument("--t-freeze", type=int, default=config.get_int("T_FREEZE", 20))
    run.add_argument("--idle-noise", choices=[v.value for v in IdleNoise], default=config.get("IDLE_NOISE", "all"))
    run.add_argument("--no-readout-idle-noise", action="store_true")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--out", type=Path, default=None)

    plot = sub.add_parser("plotdata", help="gnuplot columns from a summary CSV")
    plot.add_argument("input", type=Path)
    plot.add_argument("--baseline", type=Path, default=None, help="CSV written by the baseline command")
    plot.add_argument("--out", type=Path, default=None)

    estimate = sub.add_parser("estimate", help="threshold crossing from a summary CSV")
    estimate.add_argument("input", type=Path)
    estimate.add_argument("--bootstrap", type=int, default=1000)
    estimate.add_argument("--seed", type=int, default=config.get_int("SEED", 0))

    baseline = sub.add_parser("baseline", help="lifetimes of an unprotected qubit")
    _rate_options(baseline)
    baseline.add_argument("--trials", type=int, default=200)
    baseline.add_argument("--max-cycles", type=int, default=config.get_int("MAX_CYCLES", 100_000))
    baseline.add_argument("--seed", type=int, default=config.get_int("SEED", 0))
    baseline.add_argument("--out", type=Path, default=None)

    replay = sub.add_parser("replay", help="decode a recorded syndrome trace, one CSV row per cycle and kind")
    replay.add_argument("trace", type=Path)
    replay.add_argument("--record", action="store_true", help="record a new trace into TRACE first")
    replay.add_argument("-d", "--distance", type=int, default=3)
    replay.add_argument("-p", type=float, default=DEFAULT_P_MIN)
    replay.add_argument("--cycles", type=int, default=100)
    replay.add_argument("--seed", type=int, default=config.get_int("SEED", 0))
    replay.add_argument("--t-freeze", type=int, default=config.get_int("T_FREEZE", 20))
    replay.add_argument("--out", type=Path, default=None)

    distill = sub.add_parser("distill", help="distillation outcome tables and error scaling")
    distill.add_argument("--code", choices=[c.value for c in CodeFamily], action="append", default=None)
    distill.add_argument("--table", action="store_true", help="print the outcome table instead of the scaling CSV")
    distill.add_argument("--ps", type=_float_list, default=[0.005, 0.01, 0.02])
    distill.add_argument("--shots", type=int, default=2000)
    distill.add_argument("--seed", type=int, default=config.get_int("SEED", 0))
    distill.add_argument("--out", type=Path, default=None)
    return parser


def _run(args: argparse.Namespace) -> None:
    sweep_config = SweepConfig(
        distances=args.distances,
        ps=_rates(args),
        trials=args.trials,
        max_cycles=args.max_cycles,
        seed=args.seed,
        t_freeze=args.t_freeze,
        idle_noise=IdleNoise(args.idle_noise),
        readout_idle_noise=not args.no_readout_idle_noise,
        workers=args.workers,
    )
    _emit(threshold.sweep(sweep_config).csv, args.out)


def _read_baseline(path: Path | None) -> list[BaselineCell] | None:
    if path is None:
        return None
    return [BaselineCell(**row) for row in pd.read_csv(path).to_dict("records")]


def _plotdata(args: argparse.Namespace) -> None:
    summary = pd.read_csv(args.input)
    _emit(threshold.plotdata(summary, _read_baseline(args.baseline)), args.out)


def _estimate(args: argparse.Namespace) -> None:
    estimate = threshold.estimate_threshold(pd.read_csv(args.input), args.bootstrap, args.seed)
    print(f"p_th = {estimate.p_th:.4g}  95% CI [{estimate.ci_low:.4g}, {estimate.ci_high:.4g}]")
    print("crossings: " + " ".join(f"{c:.4g}" for c in estimate.crossings))


def _baseline(args: argparse.Namespace) -> None:
    cells = threshold.baseline_sweep(_rates(args), args.trials, args.seed, args.max_cycles)
    frame = pd.DataFrame([c.model_dump() for c in cells])
    _emit(threshold.sweep_csv(frame), args.out)


def _replay(args: argparse.Namespace) -> None:
    if args.record:
        trace = threshold.record_trace(args.distance, NoiseParams.uniform(args.p), args.seed, args.cycles)
        args.trace.write_bytes(trace.to_bytes())
        logger.info(f"Trace of {args.cycles} cycles written to {args.trace}")
    trace = SyndromeTrace.from_file(args.trace)
    frame = replay_trace(trace, build_lattice(trace.distance), args.t_freeze)
    _emit(frame[REPLAY_COLUMNS].to_csv(index=False, lineterminator="\n"), args.out)


def _distill(args: argparse.Namespace) -> None:
    codes = [CodeFamily(c) for c in args.code] if args.code else list(CodeFamily)
    if args.table:
        lines = []
        for code in codes:
            table = magic_lab.acceptance_table(code)
            lines += [f"# {code.value}", "pattern probability correction output fidelity"]
            lines += [
                f"{r.pattern} {r.probability:.6f} {r.correction.value} {r.output} {r.fidelity:.6f}" for r in table.rows
            ]
        _emit("\n".join(lines) + "\n", args.out)
        return
    _emit(magic_lab.scaling_report(codes, args.ps, args.shots, args.seed).csv, args.out)


COMMANDS = {
    "run": _run,
    "plotdata": _plotdata,
    "estimate": _estimate,
    "baseline": _baseline,
    "replay": _replay,
    "distill": _distill,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.verbose else config.get("logger_verbosity", "INFO").upper())
    try:
        COMMANDS[args.command](args)
    except BaseError as e:
        logger.error(str(e))
        return 2
    except ValueError as e:
        logger.error(f"Invalid arguments: {e}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
