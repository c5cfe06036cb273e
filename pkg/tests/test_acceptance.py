"""Exit criteria for the package, one test per criterion.

Each test prints a PASS/FAIL line through the ``criterion`` fixture; the
lines are collected in the terminal summary.
"""
import filecmp
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from evospike import io
from evospike.cli import main
from evospike.evolution import EvolutionConfig, run_evolution, synthetic_target
from evospike.genome import Genome
from evospike.metrics import BinnedCounts, asdr, bin_counts, temporal_fitness
from evospike.neuron import ModelParams, NeuronState, neuron_step
from evospike.simulation import observed_record, simulate
from evospike.topology import GridLayout, build_ca, build_connectivity, build_network

LAYOUT = GridLayout()

# Frozen after calibration: this seed reached f = 0.071 by generation 30.
RECOVERY_SEED = 2026
RECOVERY_GENOME = (0.2, 0.6, 0.8, 0.5, 0.02, 0.2, 0.1)  # CA, radius 1, sparse with bursts
RECOVERY_F_MAX = 0.2


def reference_f(exp, sim):
    """Brute-force reference: pair the i-th smallest values by repeated minimum extraction."""
    e, s = list(exp), list(sim)
    total = 0.0
    while e:
        a = min(e)
        b = min(s)
        e.remove(a)
        s.remove(b)
        total += abs(a - b)
    mu = sum(exp) / len(exp)
    return total / (mu * len(exp))


def test_c1_oracle_equivalence(criterion):
    with criterion("C1 sorted-bin fitness equals brute-force reference (1000 pairs, 1e-12, <1 s)"):
        rng = np.random.default_rng(1)
        pairs = [([2, 0, 3], [1, 1, 1])]
        while len(pairs) < 1000:
            n = int(rng.integers(1, 101))
            exp = rng.integers(0, 51, n)
            if exp.sum() == 0:
                continue
            pairs.append((exp.tolist(), rng.integers(0, 51, n).tolist()))
        expected = [reference_f(e, s) for e, s in pairs]
        start = time.perf_counter()
        got = [temporal_fitness(BinnedCounts(1.0, e), BinnedCounts(1.0, s)).objective_f for e, s in pairs]
        elapsed = time.perf_counter() - start
        assert got[0] == pytest.approx(0.8, abs=1e-12)
        assert max(abs(a - b) for a, b in zip(got, expected)) <= 1e-12
        assert elapsed < 1.0


def test_c2_identity_and_permutation(criterion):
    with criterion("C2 f(x, permute(x)) == 0 exactly (100 vectors)"):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(1, 101))
            x = rng.integers(0, 51, n)
            x[rng.integers(n)] += 1  # non-silent target
            assert temporal_fitness(BinnedCounts(1.0, x), BinnedCounts(1.0, rng.permutation(x))).objective_f == 0.0
            assert temporal_fitness(BinnedCounts(1.0, x), BinnedCounts(1.0, x)).objective_f == 0.0


def test_c3_connectivity_statistics(criterion):
    with criterion("C3 network edge frequencies within 4 sigma of the Gaussian kernel (10^4 builds, <30 s)"):
        rng = np.random.default_rng(3)
        all_pairs = [(i, j) for i in range(LAYOUT.n_nodes) for j in range(LAYOUT.n_nodes) if i != j]
        center = LAYOUT.index(5, 5)
        # near pairs so probabilities are informative, plus random ones
        near = [(center, LAYOUT.index(5 + dr, 5 + dc)) for dr, dc in
                [(0, 1), (1, 1), (0, 2), (1, 2), (2, 2), (0, 3), (2, 3), (3, 3), (0, 4), (4, 4)]]
        chosen = near + [all_pairs[k] for k in rng.choice(len(all_pairs), 10, replace=False)]
        rows, cols = np.array(chosen).T
        m = 10_000
        start = time.perf_counter()
        for c_d in (0.5, 2.1, 4.1):
            hits = np.zeros(len(chosen))
            for _ in range(m):
                hits += build_network(LAYOUT, c_d, rng).adjacency[rows, cols]
            freq = hits / m
            for (i, j), f in zip(chosen, freq):
                (ri, ci), (rj, cj) = LAYOUT.position(i), LAYOUT.position(j)
                p = math.exp(-(math.hypot(ri - rj, ci - cj) / c_d) ** 2)
                sigma = math.sqrt(p * (1 - p) / m)
                assert abs(f - p) <= 4 * sigma, (c_d, i, j, f, p)
        assert time.perf_counter() - start < 30.0


def test_c4_moore_exactness(criterion):
    with criterion("C4 Moore neighbour counts for radius 1-6 match enumeration"):
        cells = {"interior": (5, 5), "edge": (0, 5), "corner": (0, 0), "near-edge": (1, 8)}
        for radius in range(1, 7):
            adj = build_ca(LAYOUT, radius).adjacency
            for (r, c) in cells.values():
                expected = sum(
                    1 for rr in range(10) for cc in range(10)
                    if (rr, cc) != (r, c) and max(abs(rr - r), abs(cc - c)) <= radius
                )
                assert adj[LAYOUT.index(r, c)].sum() == expected


def test_c5_refractory_fuzz(criterion):
    with criterion("C5 no inter-spike interval <= refractory period (10^5-step fuzz)"):
        rng = np.random.default_rng(5)
        steps_done = 0
        while steps_done < 100_000:
            prm = ModelParams(
                leak_c=rng.random(), integ_c=rng.random(), refractory_steps=int(rng.integers(0, 11)),
                threshold=0.1 + 1.9 * rng.random(), spont_prob=rng.random() * 0.5,
                inhib_ratio=0.0, density=1,
            )
            state, last = NeuronState(), None
            for t in range(1000):
                state = neuron_step(state, prm, float(rng.integers(-3, 6)), rng.random())
                if state.fired:
                    if last is not None:
                        assert t - last > prm.refractory_steps
                    last = t
            steps_done += 1000
        # the grid simulator obeys the same bound
        prm = ModelParams(0.3, 0.8, 3, 0.5, 0.3, 0.2, 3.0)
        conn = build_connectivity(LAYOUT, "network", 3.0, 0.2, rng)
        m = simulate(prm, conn, 1000, rng).spike_matrix()
        for node in range(100):
            assert np.all(np.diff(np.flatnonzero(m[:, node])) > 3)


@pytest.fixture(scope="module")
def synthetic_target_csv(tmp_path_factory):
    cfg = EvolutionConfig(model_kind="ca", seed=RECOVERY_SEED)
    _, record = synthetic_target(Genome(RECOVERY_GENOME), cfg)
    path = tmp_path_factory.mktemp("target") / "target.csv"
    io.write_spike_events(path, io.SpikeEvents.from_record(record))
    return path


def _trees_identical(a: Path, b: Path) -> bool:
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    if files_a != files_b:
        return False
    match, mismatch, errors = filecmp.cmpfiles(a, b, [str(f) for f in files_a], shallow=False)
    return not mismatch and not errors


@pytest.mark.slow
def test_c6_determinism(criterion, synthetic_target_csv, tmp_path):
    with criterion("C6 two evolve runs (N=60, 10 generations) give byte-identical trees across --threads (<2 min)"):
        start = time.perf_counter()
        common = ["evolve", "--target", str(synthetic_target_csv), "--population", "60",
                  "--generations", "10", "--trials", "1", "--seed", "7", "--model", "network"]
        assert main(common + ["--out", str(tmp_path / "a"), "--threads", "1"]) == 0
        assert main(common + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
        assert _trees_identical(tmp_path / "a", tmp_path / "b")
        assert time.perf_counter() - start < 120.0


@pytest.fixture(scope="module")
def recovery_run():
    cfg = EvolutionConfig(model_kind="ca", seed=RECOVERY_SEED, generations=30, population_size=60, trials=1)
    target, _ = synthetic_target(Genome(RECOVERY_GENOME), cfg)
    start = time.perf_counter()
    result = run_evolution(target, cfg)
    return target, result, time.perf_counter() - start


@pytest.mark.slow
def test_c7_synthetic_recovery(criterion, recovery_run):
    with criterion(f"C7 synthetic self-target reaches f <= {RECOVERY_F_MAX} within 30 generations (<5 min)"):
        _, result, elapsed = recovery_run
        print(f"best f = {result.best.objective:.4f} after {result.n_generations - 1} generations, {elapsed:.0f}s")
        assert result.best.objective <= RECOVERY_F_MAX
        assert elapsed < 300.0


@pytest.mark.slow
def test_c8_monotone_elitism(criterion, recovery_run):
    with criterion("C8 best-so-far f non-increasing across generations"):
        _, result, _ = recovery_run
        per_gen_min = result.objective.min(axis=1)
        assert np.all(np.diff(per_gen_min) <= 0)
        assert np.array_equal(per_gen_min, result.best_so_far())


@pytest.mark.slow
def test_c9_conservation(criterion, recovery_run):
    with criterion("C9 sum of ASDR equals observed spike count for every simulated record"):
        _, result, _ = recovery_run
        records = [ind.record for ind in result.best_per_generation]
        rng = np.random.default_rng(9)
        for _ in range(20):
            prm = ModelParams(rng.random(), rng.random(), int(rng.integers(0, 11)), 0.1 + 1.9 * rng.random(),
                              0.1 * rng.random(), 0.5 * rng.random(), 0.1 + 4 * rng.random())
            conn = build_connectivity(LAYOUT, "network", prm.density, prm.inhib_ratio, rng)
            records.append(observed_record(simulate(prm, conn, 1500, rng)))
        for rec in records:
            series = asdr(rec.times(), rec.duration_seconds)
            assert int(series.sum()) == rec.n_events
            assert np.array_equal(series, bin_counts(rec.times(), rec.duration_seconds, 1.0).counts)


@pytest.mark.slow
def test_c10_public_dataset(criterion):
    """Optional: set EVOSPIKE_DIV10_TARGET to a converted time_s,channel CSV of a low-activity culture."""
    with criterion("C10 (optional) low-activity recording reaches score >= 0.8 in 80 generations"):
        path = os.environ.get("EVOSPIKE_DIV10_TARGET")
        if not path:
            pytest.skip("EVOSPIKE_DIV10_TARGET not set; data-dependent criterion")
        cfg = EvolutionConfig(generations=80, trials=1, seed=0)
        events = io.load_spike_events(path, cfg.window_seconds)
        result = run_evolution(bin_counts(events.times, cfg.window_seconds), cfg)
        assert result.best.fitness.score >= 0.8
