"""Evolving leaky integrate-and-fire cellular automata and geometric networks
to reproduce the spike-count profile of recorded neuronal cultures."""

from .errors import UndefinedFitnessError, ValidationError
from .evolution import EvolutionConfig, EvolutionResult, Individual, run_evolution
from .genome import GeneBounds, Genome, decode, encode, random_genome
from .metrics import BinnedCounts, FitnessValue, asdr, bin_counts, spatial_fitness, temporal_fitness
from .neuron import ModelParams, NeuronState, membrane_step, threshold_fire
from .simulation import SpikeRecord, observed_record, simulate
from .topology import (
    Connectivity,
    GridLayout,
    ModelKind,
    assign_signs,
    build_ca,
    build_network,
    connection_probability,
    observed_nodes,
)

__version__ = "0.1.0"
