"""Seven-gene normalised genome and its decoding into model parameters."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import ValidationError
from .neuron import ModelParams
from .topology import CA_RADIUS_RANGE, NETWORK_DENSITY_RANGE, ModelKind

GENE_NAMES = (
    "leak_c",
    "integ_c",
    "refractory_steps",
    "threshold",
    "spont_prob",
    "inhib_ratio",
    "density",
)
N_GENES = len(GENE_NAMES)


@dataclass(frozen=True)
class Genome:
    genes: tuple[float, ...]

    def __post_init__(self):
        genes = tuple(float(g) for g in self.genes)
        if len(genes) != N_GENES:
            raise ValidationError(f"genome must have {N_GENES} genes, got {len(genes)}")
        for name, g in zip(GENE_NAMES, genes):
            if not 0.0 <= g <= 1.0:
                raise ValidationError(f"gene {name} = {g} outside [0, 1]")
        object.__setattr__(self, "genes", genes)

    def as_array(self) -> np.ndarray:
        return np.array(self.genes)


@dataclass(frozen=True)
class GeneBounds:
    """Per-gene (lower, upper) ranges.

    The density range is tied to the model kind and is not configurable:
    integer radius 1..6 for the CA, continuous 0.1..4.1 for the network.
    """

    model_kind: ModelKind = ModelKind.NETWORK
    leak_c: tuple[float, float] = (0.0, 1.0)
    integ_c: tuple[float, float] = (0.0, 1.0)
    refractory_steps: tuple[float, float] = (0.0, 10.0)
    threshold: tuple[float, float] = (0.1, 2.0)
    spont_prob: tuple[float, float] = (0.0, 0.1)
    inhib_ratio: tuple[float, float] = (0.0, 0.5)

    def __post_init__(self):
        object.__setattr__(self, "model_kind", ModelKind.parse(self.model_kind))
        for name in GENE_NAMES[:-1]:
            lo, hi = (float(x) for x in getattr(self, name))
            if not lo < hi:
                raise ValidationError(f"bounds for {name} need lower < upper, got ({lo}, {hi})")
            object.__setattr__(self, name, (lo, hi))
        if self.threshold[0] <= 0:
            raise ValidationError("threshold lower bound must be > 0")
        for name in ("spont_prob", "inhib_ratio"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi > 1:
                raise ValidationError(f"bounds for {name} must lie within [0, 1]")
        if self.refractory_steps[0] < 0:
            raise ValidationError("refractory lower bound must be >= 0")

    @property
    def density(self) -> tuple[float, float]:
        if self.model_kind is ModelKind.CA:
            return tuple(float(x) for x in CA_RADIUS_RANGE)
        return NETWORK_DENSITY_RANGE

    def pairs(self) -> list[tuple[float, float]]:
        return [getattr(self, name) for name in GENE_NAMES]

    def to_dict(self) -> dict:
        out = {"model_kind": self.model_kind.value}
        out.update({name: list(getattr(self, name)) for name in GENE_NAMES})
        return out

    @classmethod
    def from_dict(cls, data: dict, model_kind=None) -> "GeneBounds":
        data = dict(data)
        kind = ModelKind.parse(model_kind if model_kind is not None else data.pop("model_kind", "network"))
        data.pop("model_kind", None)
        density = data.pop("density", None)
        known = {f.name for f in fields(cls)} - {"model_kind"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown gene bounds: {sorted(unknown)}")
        bounds = cls(model_kind=kind, **{k: tuple(v) for k, v in data.items()})
        if density is not None and tuple(float(x) for x in density) != bounds.density:
            raise ValidationError(
                f"density bounds are fixed at {bounds.density} for the {kind.value} model, got {density}"
            )
        return bounds

    def with_kind(self, kind) -> "GeneBounds":
        return replace(self, model_kind=ModelKind.parse(kind))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def decode(genome: Genome, bounds: GeneBounds) -> ModelParams:
    values = {}
    for name, g, (lo, hi) in zip(GENE_NAMES, genome.genes, bounds.pairs()):
        values[name] = lo + g * (hi - lo)
    values["refractory_steps"] = _round_half_up(values["refractory_steps"])
    if bounds.model_kind is ModelKind.CA:
        lo, hi = (int(x) for x in bounds.density)
        g = genome.genes[-1]
        values["density"] = min(hi, lo + int(math.floor(g * (hi - lo + 1))))
    return ModelParams(**values)


def encode(params: ModelParams, bounds: GeneBounds) -> Genome:
    """Inverse of :func:`decode` (exact for continuous genes, bin-centred for integer ones)."""
    genes = []
    for name, (lo, hi) in zip(GENE_NAMES, bounds.pairs()):
        value = getattr(params, name)
        if name == "density" and bounds.model_kind is ModelKind.CA:
            n_levels = int(hi) - int(lo) + 1
            g = (value - lo + 0.5) / n_levels
        else:
            g = (value - lo) / (hi - lo)
        genes.append(min(1.0, max(0.0, g)))
    return Genome(tuple(genes))


def random_genome(rng: np.random.Generator) -> Genome:
    return Genome(tuple(rng.random(N_GENES)))
