"""Scalar leaky integrate-and-fire update.

The membrane follows dV/dt = -c_L * V + c_I * sum_j x_j w_ij with rest at 0,
integrated by forward Euler with a unit step. These functions are the
reference semantics; :mod:`evospike.simulation` runs the same rules
vectorised over a whole grid.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ValidationError


@dataclass(frozen=True)
class ModelParams:
    """Decoded physical parameters of one model."""

    leak_c: float
    integ_c: float
    refractory_steps: int
    threshold: float
    spont_prob: float
    inhib_ratio: float
    density: float  # integer radius for CA, c_D for the network model

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValidationError(f"threshold must be > 0, got {self.threshold}")
        if not 0.0 <= self.spont_prob <= 1.0:
            raise ValidationError(f"spont_prob must lie in [0, 1], got {self.spont_prob}")
        if not 0.0 <= self.inhib_ratio <= 1.0:
            raise ValidationError(f"inhib_ratio must lie in [0, 1], got {self.inhib_ratio}")
        if self.refractory_steps < 0 or int(self.refractory_steps) != self.refractory_steps:
            raise ValidationError(
                f"refractory_steps must be a non-negative integer, got {self.refractory_steps}"
            )

    def to_dict(self) -> dict:
        return {
            "leak_c": self.leak_c,
            "integ_c": self.integ_c,
            "refractory_steps": int(self.refractory_steps),
            "threshold": self.threshold,
            "spont_prob": self.spont_prob,
            "inhib_ratio": self.inhib_ratio,
            "density": self.density,
        }


@dataclass(frozen=True)
class NeuronState:
    potential: float = 0.0
    refractory_remaining: int = 0
    fired: bool = False
    is_inhibitory: bool = False


def membrane_step(state: NeuronState, params: ModelParams, weighted_input: float) -> NeuronState:
    """Integrate one step of input.

    ``weighted_input`` is the signed count of presynaptic spikes from the
    previous step (+1 per excitatory, -1 per inhibitory). A refractory neuron
    ignores its input and is held at rest; the lockout counter itself is
    advanced by :func:`threshold_fire`.
    """
    if state.refractory_remaining > 0:
        return replace(state, potential=0.0, fired=False)
    v = state.potential
    v = v + (-params.leak_c * v + params.integ_c * weighted_input)
    return replace(state, potential=v, fired=False)


def threshold_fire(state: NeuronState, params: ModelParams, uniform_draw: float) -> NeuronState:
    """Resolve the spike decision for a step whose integration is already done.

    Threshold and spontaneous spikes behave identically: potential resets to
    exactly 0 and the neuron is locked out for ``refractory_steps`` steps.
    """
    if state.refractory_remaining > 0:
        return replace(state, fired=False, refractory_remaining=state.refractory_remaining - 1)
    if state.potential >= params.threshold or uniform_draw < params.spont_prob:
        return replace(
            state,
            fired=True,
            potential=0.0,
            refractory_remaining=int(params.refractory_steps),
        )
    return replace(state, fired=False)


def neuron_step(state: NeuronState, params: ModelParams, weighted_input: float,
                uniform_draw: float) -> NeuronState:
    return threshold_fire(membrane_step(state, params, weighted_input), params, uniform_draw)
