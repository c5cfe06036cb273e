"""Write a target spike CSV by simulating a known genome.

    python scripts/make_synthetic_target.py --model ca --genes 0.2,0.6,0.8,0.5,0.02,0.2,0.1 \
        --seconds 60 --seed 2026 --out target.csv
"""
import argparse

from evospike import io
from evospike.evolution import EvolutionConfig, synthetic_target
from evospike.genome import Genome, decode
from evospike.simulation import steps_for_seconds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", choices=["ca", "network"], default="ca")
    ap.add_argument("--genes", default="0.2,0.6,0.8,0.5,0.02,0.2,0.1")
    ap.add_argument("--seconds", type=float, default=60.0)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    genome = Genome(tuple(float(g) for g in args.genes.split(",")))
    cfg = EvolutionConfig(model_kind=args.model, seed=args.seed, eval_steps=steps_for_seconds(args.seconds))
    counts, record = synthetic_target(genome, cfg)
    io.write_spike_events(args.out, io.SpikeEvents.from_record(record))
    print(decode(genome, cfg.bounds))
    print(f"{counts.total} spikes over {counts.n_bins} s -> {args.out}")


if __name__ == "__main__":
    main()
