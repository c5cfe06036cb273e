"""Synchronous discrete-time simulation of a full grid of LIF neurons."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .neuron import ModelParams
from .topology import Connectivity, GridLayout, observed_nodes

STEP_SECONDS = 0.04
# rows of uniforms drawn per call; bounds memory on 30-min replays
_DRAW_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class SpikeRecord:
    """Spike events as parallel ``steps``/``nodes`` integer arrays.

    Events are ordered by step, then node. ``observed`` lists the grid nodes
    that are recorded; it is ``None`` for a record that already contains only
    renumbered observed channels.
    """

    n_steps: int
    n_nodes: int
    event_steps: np.ndarray
    event_nodes: np.ndarray
    step_seconds: float = STEP_SECONDS
    observed: tuple[int, ...] | None = None

    def __post_init__(self):
        steps = np.asarray(self.event_steps, dtype=np.int64)
        nodes = np.asarray(self.event_nodes, dtype=np.int64)
        if steps.shape != nodes.shape or steps.ndim != 1:
            raise ValidationError("event step and node arrays must be 1-D and equal length")
        if steps.size and (steps.min() < 0 or steps.max() >= self.n_steps):
            raise ValidationError("event step outside [0, n_steps)")
        if nodes.size and (nodes.min() < 0 or nodes.max() >= self.n_nodes):
            raise ValidationError("event node outside [0, n_nodes)")
        order = np.lexsort((nodes, steps))
        steps, nodes = steps[order], nodes[order]
        steps.flags.writeable = False
        nodes.flags.writeable = False
        object.__setattr__(self, "event_steps", steps)
        object.__setattr__(self, "event_nodes", nodes)
        if self.observed is not None:
            object.__setattr__(self, "observed", tuple(int(i) for i in self.observed))

    @property
    def n_events(self) -> int:
        return int(self.event_steps.size)

    @property
    def duration_seconds(self) -> float:
        return self.n_steps * self.step_seconds

    def times(self) -> np.ndarray:
        return self.event_steps * self.step_seconds

    def spike_matrix(self) -> np.ndarray:
        """Dense (n_steps, n_nodes) boolean raster."""
        out = np.zeros((self.n_steps, self.n_nodes), dtype=bool)
        out[self.event_steps, self.event_nodes] = True
        return out

    def __eq__(self, other):
        if not isinstance(other, SpikeRecord):
            return NotImplemented
        return (
            self.n_steps == other.n_steps
            and self.n_nodes == other.n_nodes
            and self.step_seconds == other.step_seconds
            and self.observed == other.observed
            and np.array_equal(self.event_steps, other.event_steps)
            and np.array_equal(self.event_nodes, other.event_nodes)
        )

    __hash__ = None


def steps_for_seconds(seconds: float, step_seconds: float = STEP_SECONDS) -> int:
    n = seconds / step_seconds
    if abs(n - round(n)) > 1e-9:
        raise ValidationError(f"{seconds} s is not a whole number of {step_seconds} s steps")
    return int(round(n))


def simulate(params: ModelParams, connectivity: Connectivity, steps: int,
             rng: np.random.Generator, *, warmup_steps: int = 0,
             step_seconds: float = STEP_SECONDS,
             layout: GridLayout | None = None) -> SpikeRecord:
    """Run ``warmup_steps + steps`` synchronous updates and record the last ``steps``.

    Every step draws one uniform per neuron in node order, whether or not the
    neuron is refractory, so the stream position depends only on the step
    count. Input at step t is the signed sum of spikes emitted at step t-1.
    """
    layout = layout or GridLayout()
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    if warmup_steps < 0:
        raise ValidationError(f"warmup_steps must be >= 0, got {warmup_steps}")
    n = connectivity.n_nodes
    if n != layout.n_nodes:
        raise ValidationError(f"connectivity has {n} nodes but the layout has {layout.n_nodes}")

    weights = connectivity.adjacency.astype(float) * connectivity.signs[:, None].astype(float)
    leak, integ = float(params.leak_c), float(params.integ_c)
    thr, p_spont = float(params.threshold), float(params.spont_prob)
    refractory = int(params.refractory_steps)

    v = np.zeros(n)
    refr = np.zeros(n, dtype=np.int64)
    fired = np.zeros(n)
    total = warmup_steps + steps
    rec_steps, rec_nodes = [], []

    for start in range(0, total, _DRAW_CHUNK):
        spont = rng.random((min(_DRAW_CHUNK, total - start), n)) < p_spont
        for k in range(spont.shape[0]):
            t = start + k
            inp = fired @ weights
            locked = refr > 0
            v = v + (-leak * v + integ * inp)
            v[locked] = 0.0
            fire = ~locked & ((v >= thr) | spont[k])
            refr[locked] -= 1
            v[fire] = 0.0
            refr[fire] = refractory
            fired = fire.astype(float)
            if t >= warmup_steps:
                idx = np.flatnonzero(fire)
                if idx.size:
                    rec_nodes.append(idx)
                    rec_steps.append(np.full(idx.size, t - warmup_steps))

    ev_steps = np.concatenate(rec_steps) if rec_steps else np.zeros(0, dtype=np.int64)
    ev_nodes = np.concatenate(rec_nodes) if rec_nodes else np.zeros(0, dtype=np.int64)
    observed = observed_nodes(layout) if (layout.rows, layout.cols) == (10, 10) else None
    return SpikeRecord(steps, n, ev_steps, ev_nodes, step_seconds, observed)


def observed_record(record: SpikeRecord) -> SpikeRecord:
    """Keep only recorded nodes, renumbered 0..len(observed)-1 in observed order."""
    if record.observed is None:
        return record
    lookup = np.full(record.n_nodes, -1, dtype=np.int64)
    lookup[list(record.observed)] = np.arange(len(record.observed))
    channels = lookup[record.event_nodes]
    keep = channels >= 0
    return SpikeRecord(
        record.n_steps,
        len(record.observed),
        record.event_steps[keep],
        channels[keep],
        record.step_seconds,
        None,
    )
