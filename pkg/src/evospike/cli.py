"""Command-line entry points: ``evolve``, ``simulate`` and ``fitness``.

Precedence for evolution settings: built-in defaults < ``--config`` file < flags.

Exit codes: 0 success, 1 usage or config error, 2 data error, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import UndefinedFitnessError, ValidationError
from .evolution import EvolutionConfig, run_evolution
from .genome import decode
from .metrics import asdr, bin_counts, n_bins_for, temporal_fitness
from .simulation import observed_record, simulate
from .svg import fitness_svg, raster_svg, write_svg
from .topology import GridLayout, build_connectivity

log = logging.getLogger("evospike")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
SUMMARY_FILE = "summary.csv"
TOP_K = 10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _config_stage(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {exc.filename}") from None
    except (ValidationError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _data_stage(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except FileNotFoundError as exc:
        raise io.DataError(f"no such file: {exc.filename}") from None


def build_config(args) -> EvolutionConfig:
    cfg = io.load_config(args.config) if args.config else EvolutionConfig()
    overrides = {
        "seed": args.seed,
        "model_kind": args.model,
        "eval_steps": args.steps,
        "window_offset_s": args.window_offset_s,
        "generations": args.generations,
        "trials": args.trials,
        "population_size": args.population,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(cfg, **overrides)


def cross_trial_summary(results) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard deviation of the top-10 scores pooled over trials, per generation."""
    pooled = np.concatenate([r.top_k_scores(TOP_K) for r in results], axis=1)
    finite = np.where(np.isfinite(pooled), pooled, np.nan)
    with np.errstate(invalid="ignore"):
        return np.nanmean(finite, axis=1), np.nanstd(finite, axis=1)


def write_summary(path, mean, std) -> Path:
    with io._open_write(path) as fh:
        w = io._writer(fh)
        w.writerow(["generation", "mean_top10_score", "std_top10_score"])
        for g, (m, s) in enumerate(zip(mean, std)):
            w.writerow([g, repr(float(m)), repr(float(s))])
    return Path(path)


def cmd_evolve(args) -> int:
    cfg = _config_stage(build_config, args)
    events = _data_stage(io.load_spike_events, args.target, cfg.window_seconds, cfg.window_offset_s)
    target = bin_counts(events.times, cfg.window_seconds, cfg.bin_seconds)
    if target.total == 0:
        log.warning("target window contains no spikes; every fitness value will be undefined")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = [io.save_config(out / io.CONFIG_FILE, cfg)]
    results = []
    for trial in range(cfg.trials):
        trial_dir = out / f"trial_{trial:02d}"
        trial_dir.mkdir(parents=True, exist_ok=True)
        (trial_dir / io.COMPLETE_MARKER).unlink(missing_ok=True)
        progress = trial_dir / io.FITNESS_FILE

        def stream_rows(gen, pop, _trial=trial, _path=progress):
            rows = [(_trial, gen, i, ind.objective, 1.0 - ind.objective) for i, ind in enumerate(pop)]
            io.write_fitness(_path, rows, append=gen > 0)

        result = run_evolution(target, cfg, trial=trial, workers=args.threads, on_generation=stream_rows)
        results.append(result)
        paths = io.write_run(io.RunArtifacts.from_result(result), trial_dir)
        written.extend(paths.values())
        log.info("trial %d done: best f = %.4f", trial, result.best.objective)

    mean, std = cross_trial_summary(results)
    written.append(write_summary(out / SUMMARY_FILE, mean, std))
    written.append(write_svg(out / "fitness.svg", fitness_svg(mean, std)))
    for p in written:
        print(p)
    return EXIT_OK


def cmd_simulate(args) -> int:
    doc = _data_stage(io.read_genome, args.genome)
    genome, bounds = doc["genome"], doc["bounds"]
    params = decode(genome, bounds)
    layout = GridLayout()
    if args.seed is not None:
        conn_rng, dyn_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(args.seed).spawn(2))
    elif "stream_key" in doc:
        from .evolution import individual_streams

        conn_rng, dyn_rng = individual_streams(doc["seed"], *doc["stream_key"])
    else:
        conn_rng, dyn_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(doc["seed"]).spawn(2))

    if args.connectivity:
        cdir = Path(args.connectivity)
        conn = _data_stage(io.read_connectivity, cdir / io.EDGES_FILE, cdir / io.SIGNS_FILE, bounds.model_kind)
    else:
        conn = build_connectivity(layout, bounds.model_kind, params.density, params.inhib_ratio, conn_rng)

    record = observed_record(simulate(params, conn, args.steps, dyn_rng, layout=layout))
    events = io.SpikeEvents.from_record(record)
    counts = asdr(events.times, record.duration_seconds)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        io.write_spike_events(out / io.RASTER_FILE, events),
        io.write_asdr(out / io.ASDR_FILE, counts),
        write_svg(out / "raster.svg", raster_svg(events.times, events.channels, record.duration_seconds, counts)),
    ]
    for p in written:
        print(p)
    return EXIT_OK


def _inferred_window(events: io.SpikeEvents, bin_seconds: float, path) -> float:
    if len(events) == 0:
        raise io.DataError(f"{path}: no spikes; pass --window-s to fix the window")
    last = np.round(events.times.max() / bin_seconds, 9)
    return (math.floor(last) + 1) * bin_seconds


def cmd_fitness(args) -> int:
    bin_s = args.bin_s
    if args.window_s is not None:
        n_bins_for(args.window_s, bin_s)
        exp = _data_stage(io.load_spike_events, args.target, args.window_s)
        sim = _data_stage(io.load_spike_events, args.record, args.window_s)
        w_exp = w_sim = args.window_s
    else:
        exp = _data_stage(io.load_spike_events, args.target)
        sim = _data_stage(io.load_spike_events, args.record)
        w_exp = _inferred_window(exp, bin_s, args.target)
        w_sim = _inferred_window(sim, bin_s, args.record)
        if w_exp != w_sim:
            raise io.DataError(f"windows differ: target spans {w_exp} s, record spans {w_sim} s")
    value = temporal_fitness(bin_counts(exp.times, w_exp, bin_s), bin_counts(sim.times, w_sim, bin_s))
    print(f"objective_f={value.objective_f!r}")
    print(f"score={value.score!r}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evospike", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="evolve models against a target spike file")
    p.add_argument("--config", help="JSON config file (EvolutionConfig fields)")
    p.add_argument("--target", required=True, help="target spike CSV (time_s,channel)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--model", choices=["ca", "network"], help="model kind")
    p.add_argument("--steps", type=int, help="simulation steps per evaluation")
    p.add_argument("--window-offset-s", type=float, help="start of the target window in seconds")
    p.add_argument("--generations", type=int, help="number of generations after the initial one")
    p.add_argument("--trials", type=int, help="number of independent trials")
    p.add_argument("--population", type=int, help="population size")
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes for evaluation (results do not depend on it)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("simulate", help="replay a genome and export raster/ASDR")
    p.add_argument("--genome", required=True, help="genome JSON file")
    p.add_argument("--steps", type=int, default=1500, help="steps to simulate (45000 = 30 min)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int,
                   help="seed for fresh streams; default replays the genome's own evaluation stream")
    p.add_argument("--connectivity", help="run directory holding connectivity_edges.csv/connectivity_signs.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fitness", help="score a spike record against a target")
    p.add_argument("--target", required=True, help="target spike CSV")
    p.add_argument("--record", required=True, help="simulated spike CSV")
    p.add_argument("--window-s", type=float, help="window in seconds (default: inferred per file)")
    p.add_argument("--bin-s", type=float, default=1.0, help="bin width in seconds")
    p.set_defaults(func=cmd_fitness)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("evospike: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"evospike: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (io.DataError, UndefinedFitnessError) as exc:
        print(f"evospike: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValidationError as exc:
        print(f"evospike: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"evospike: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
