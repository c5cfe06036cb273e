"""Spike-count binning, ASDR and the sorted-bin fitness measures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedFitnessError, ValidationError

# decimals kept when mapping times to bins; absorbs float noise in step * 0.04
_TIME_DECIMALS = 9


@dataclass(frozen=True, eq=False)
class BinnedCounts:
    bin_seconds: float
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1:
            raise ValidationError("counts must be 1-D")
        if (counts < 0).any():
            raise ValidationError("counts must be non-negative")
        counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def n_bins(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, BinnedCounts):
            return NotImplemented
        return self.bin_seconds == other.bin_seconds and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True)
class FitnessValue:
    objective_f: float

    @property
    def score(self) -> float:
        return 1.0 - self.objective_f


def n_bins_for(window_seconds: float, bin_seconds: float) -> int:
    if bin_seconds <= 0 or window_seconds <= 0:
        raise ValidationError("window and bin widths must be positive")
    n = window_seconds / bin_seconds
    if abs(n - round(n)) > 1e-9:
        raise ValidationError(
            f"window of {window_seconds} s is not a whole number of {bin_seconds} s bins"
        )
    return int(round(n))


def bin_counts(times, window_seconds: float, bin_seconds: float = 1.0) -> BinnedCounts:
    """Count spikes per half-open bin [i*w, (i+1)*w) over [0, window).

    ``times`` is an array of spike times in seconds pooled over all channels.
    Spikes outside the window are an error; truncate first.
    """
    n = n_bins_for(window_seconds, bin_seconds)
    t = np.asarray(times, dtype=float)
    if t.size == 0:
        return BinnedCounts(bin_seconds, np.zeros(n, dtype=np.int64))
    idx = np.floor(np.round(t / bin_seconds, _TIME_DECIMALS)).astype(np.int64)
    if idx.min() < 0 or idx.max() >= n:
        raise ValidationError(f"spike times fall outside the [0, {window_seconds}) s window")
    return BinnedCounts(bin_seconds, np.bincount(idx, minlength=n))


def asdr(times, window_seconds: float) -> np.ndarray:
    """Array-wide spike detection rate: spikes across all channels per second."""
    return bin_counts(times, window_seconds, 1.0).counts


def record_counts(record, bin_seconds: float = 1.0) -> BinnedCounts:
    """Bin a :class:`~evospike.simulation.SpikeRecord` over its full duration."""
    return bin_counts(record.times(), record.duration_seconds, bin_seconds)


def _sorted_distance(exp, sim, what: str) -> float:
    exp = np.asarray(exp, dtype=float)
    sim = np.asarray(sim, dtype=float)
    if exp.ndim != 1 or exp.shape != sim.shape:
        raise ValidationError(f"{what}: experimental and simulated lengths differ ({exp.size} vs {sim.size})")
    if exp.size == 0:
        raise ValidationError(f"{what}: need at least one value")
    mu = exp.mean()
    if not mu > 0:
        raise UndefinedFitnessError(f"{what}: experimental mean is zero, distance is undefined")
    return float(np.abs(np.sort(exp) - np.sort(sim)).sum() / (mu * exp.size))


def temporal_fitness(exp: BinnedCounts, sim: BinnedCounts) -> FitnessValue:
    """Mean absolute difference of ascending-sorted bin counts over the target mean.

    Normalisation uses the mean of the experimental (target) bins, so the
    measure is not symmetric in its arguments.
    """
    if exp.bin_seconds != sim.bin_seconds:
        raise ValidationError(f"bin widths differ ({exp.bin_seconds} vs {sim.bin_seconds})")
    return FitnessValue(_sorted_distance(exp.counts, sim.counts, "temporal fitness"))


def channel_rates(channels, n_channels: int, window_seconds: float) -> np.ndarray:
    """Mean firing rate (spikes/s) per channel."""
    counts = np.bincount(np.asarray(channels, dtype=np.int64), minlength=n_channels)
    if counts.size > n_channels:
        raise ValidationError(f"channel index >= {n_channels}")
    return counts / float(window_seconds)


def spatial_fitness(exp_rates, sim_rates) -> float:
    """Sorted per-channel rate distance, normalised like the temporal measure.

    Typically 60 channels each; any equal lengths are accepted.
    """
    return _sorted_distance(exp_rates, sim_rates, "spatial fitness")
