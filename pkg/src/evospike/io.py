"""Reading target spike data and persisting run artifacts.

All tabular outputs are UTF-8 CSV with LF line endings. Floats that must
round-trip exactly (fitness values, genes) are written with ``repr``.
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .evolution import EvolutionConfig, EvolutionResult, Individual
from .genome import GeneBounds, Genome, decode
from .simulation import SpikeRecord
from .topology import Connectivity, ModelKind

N_CHANNELS = 60

EVENTS_HEADER = ["time_s", "channel"]
FITNESS_HEADER = ["trial", "generation", "individual", "objective_f", "score"]
ASDR_HEADER = ["second", "spike_count"]
EDGES_HEADER = ["pre", "post"]
SIGNS_HEADER = ["node", "sign"]

CONFIG_FILE = "config.json"
FITNESS_FILE = "fitness.csv"
GENOME_FILE = "best_genome.json"
EDGES_FILE = "connectivity_edges.csv"
SIGNS_FILE = "connectivity_signs.csv"
RASTER_FILE = "raster.csv"
ASDR_FILE = "asdr.csv"
COMPLETE_MARKER = "COMPLETE"


class DataError(ValidationError):
    """Malformed input file; the message carries the path and line number."""


@dataclass(frozen=True, eq=False)
class SpikeEvents:
    """Spike times (s) and channel ids, sorted by time then channel."""

    times: np.ndarray
    channels: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        c = np.asarray(self.channels, dtype=np.int64)
        order = np.lexsort((c, t))
        object.__setattr__(self, "times", t[order])
        object.__setattr__(self, "channels", c[order])

    def __len__(self):
        return int(self.times.size)

    def __eq__(self, other):
        if not isinstance(other, SpikeEvents):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(self.channels, other.channels)

    __hash__ = None

    @classmethod
    def from_record(cls, record: SpikeRecord) -> "SpikeEvents":
        # step * dt carries float noise (0.28000000000000003); keep the intended value
        return cls(np.round(record.times(), 9), record.event_nodes)


def _open_write(path):
    return open(path, "w", newline="", encoding="utf-8")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _read_rows(path, header: list[str]):
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None:
            return
        if [h.strip() for h in first] != header:
            raise DataError(f"{path}:1: expected header {','.join(header)}, got {','.join(first)}")
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, row


def _fmt_time(t: float) -> str:
    return repr(float(t))


def load_spike_events(path, window_seconds: float | None = None, offset_s: float = 0.0) -> SpikeEvents:
    """Load a ``time_s,channel`` CSV, sorted by time.

    With ``window_seconds`` only spikes in [offset, offset + window) are kept
    and their times are shifted so the window starts at 0.
    """
    times, channels = [], []
    for line, (t, c) in _read_rows(path, EVENTS_HEADER):
        try:
            t, c = float(t), int(c)
        except ValueError:
            raise DataError(f"{path}:{line}: cannot parse {t!r},{c!r}") from None
        if not np.isfinite(t) or t < 0:
            raise DataError(f"{path}:{line}: spike time must be finite and >= 0, got {t}")
        if not 0 <= c < N_CHANNELS:
            raise DataError(f"{path}:{line}: channel {c} outside [0, {N_CHANNELS})")
        times.append(t)
        channels.append(c)
    times = np.array(times, dtype=float)
    channels = np.array(channels, dtype=np.int64)
    if window_seconds is not None:
        if window_seconds <= 0 or offset_s < 0:
            raise ValidationError("window must be > 0 and offset >= 0")
        # rounding matches the binning tolerance, so step-aligned times stay in their bin
        rel = np.round(times - offset_s, 9)
        keep = (rel >= 0) & (rel < window_seconds)
        times, channels = np.maximum(times[keep] - offset_s, 0.0), channels[keep]
    return SpikeEvents(times, channels)


def write_spike_events(path, events: SpikeEvents) -> Path:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(EVENTS_HEADER)
        for t, c in zip(events.times, events.channels):
            w.writerow([_fmt_time(t), int(c)])
    return Path(path)


def write_asdr(path, counts) -> Path:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(ASDR_HEADER)
        for i, n in enumerate(counts):
            w.writerow([i, int(n)])
    return Path(path)


def read_asdr(path) -> np.ndarray:
    rows = [(int(s), int(n)) for _, (s, n) in _read_rows(path, ASDR_HEADER)]
    return np.array([n for _, n in sorted(rows)], dtype=np.int64)


def fitness_rows(result: EvolutionResult) -> list[tuple[int, int, int, float, float]]:
    rows = []
    for gen, objs in enumerate(result.objective):
        for i, f in enumerate(objs):
            rows.append((result.trial, gen, i, float(f), 1.0 - float(f)))
    return rows


def write_fitness(path, rows, append: bool = False) -> Path:
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        if not append:
            w.writerow(FITNESS_HEADER)
        for trial, gen, ind, f, score in rows:
            w.writerow([int(trial), int(gen), int(ind), repr(float(f)), repr(float(score))])
    return Path(path)


def read_fitness(path) -> list[tuple[int, int, int, float, float]]:
    out = []
    for line, row in _read_rows(path, FITNESS_HEADER):
        try:
            out.append((int(row[0]), int(row[1]), int(row[2]), float(row[3]), float(row[4])))
        except ValueError:
            raise DataError(f"{path}:{line}: cannot parse fitness row {row}") from None
    return out


def genome_document(genome: Genome, bounds: GeneBounds, seed: int,
                    stream_key: tuple[int, int, int] | None = None,
                    lineage_id: int | None = None) -> dict:
    doc = {
        "genes": list(genome.genes),
        "bounds": bounds.to_dict(),
        "params": decode(genome, bounds).to_dict(),
        "seed": int(seed),
        "model_kind": bounds.model_kind.value,
    }
    if stream_key is not None:
        doc["stream_key"] = [int(k) for k in stream_key]
    if lineage_id is not None:
        doc["lineage_id"] = int(lineage_id)
    return doc


def _dump_json(path, doc) -> Path:
    with _open_write(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return Path(path)


def write_genome(path, genome: Genome, bounds: GeneBounds, seed: int, **extra) -> Path:
    return _dump_json(path, genome_document(genome, bounds, seed, **extra))


def read_genome(path) -> dict:
    """Parse a genome file; returns its document with ``genome`` and ``bounds`` as objects."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    missing = {"genes", "bounds", "seed", "model_kind"} - set(doc)
    if missing:
        raise DataError(f"{path}: missing keys {sorted(missing)}")
    try:
        doc["genome"] = Genome(tuple(doc["genes"]))
        doc["bounds"] = GeneBounds.from_dict(doc["bounds"], model_kind=doc["model_kind"])
    except (ValidationError, TypeError) as exc:
        raise DataError(f"{path}: {exc}") from None
    return doc


def write_connectivity(edges_path, signs_path, conn: Connectivity) -> tuple[Path, Path]:
    with _open_write(edges_path) as fh:
        w = _writer(fh)
        w.writerow(EDGES_HEADER)
        w.writerows(conn.edges().tolist())
    with _open_write(signs_path) as fh:
        w = _writer(fh)
        w.writerow(SIGNS_HEADER)
        for node, sign in enumerate(conn.signs):
            w.writerow([node, int(sign)])
    return Path(edges_path), Path(signs_path)


def read_connectivity(edges_path, signs_path, kind) -> Connectivity:
    signs = {}
    for line, (node, sign) in _read_rows(signs_path, SIGNS_HEADER):
        signs[int(node)] = int(sign)
    n = len(signs)
    if sorted(signs) != list(range(n)):
        raise DataError(f"{signs_path}: node ids must be 0..{n - 1}")
    adj = np.zeros((n, n), dtype=bool)
    for line, (pre, post) in _read_rows(edges_path, EDGES_HEADER):
        pre, post = int(pre), int(post)
        if not (0 <= pre < n and 0 <= post < n):
            raise DataError(f"{edges_path}:{line}: node id outside [0, {n})")
        adj[pre, post] = True
    return Connectivity(ModelKind.parse(kind), adj, [signs[i] for i in range(n)])


def save_config(path, config: EvolutionConfig) -> Path:
    return _dump_json(path, config.to_dict())


def load_config(path) -> EvolutionConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    return EvolutionConfig.from_dict(data)


@dataclass
class RunArtifacts:
    config: EvolutionConfig
    fitness: list[tuple[int, int, int, float, float]]
    best: Individual
    raster: SpikeEvents
    asdr: np.ndarray

    @classmethod
    def from_result(cls, result: EvolutionResult) -> "RunArtifacts":
        from .metrics import asdr

        best = result.best
        raster = SpikeEvents.from_record(best.record)
        return cls(result.config, fitness_rows(result), best, raster,
                   asdr(raster.times, best.record.duration_seconds))


def write_run(artifacts: RunArtifacts, out_dir) -> dict[str, Path]:
    """Write every artifact file, then the completion marker."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / COMPLETE_MARKER
    if marker.exists():
        marker.unlink()
    best = artifacts.best
    cfg = artifacts.config
    paths = {
        "config": save_config(out / CONFIG_FILE, cfg),
        "fitness": write_fitness(out / FITNESS_FILE, artifacts.fitness),
        "genome": write_genome(out / GENOME_FILE, best.genome, cfg.bounds, cfg.seed,
                               stream_key=best.stream_key, lineage_id=best.lineage_id),
        "raster": write_spike_events(out / RASTER_FILE, artifacts.raster),
        "asdr": write_asdr(out / ASDR_FILE, artifacts.asdr),
    }
    if best.connectivity is not None:
        paths["edges"], paths["signs"] = write_connectivity(out / EDGES_FILE, out / SIGNS_FILE,
                                                            best.connectivity)
    marker.write_text("ok\n", encoding="utf-8")
    paths["marker"] = marker
    return paths


def is_complete(out_dir) -> bool:
    return os.path.exists(Path(out_dir) / COMPLETE_MARKER)
