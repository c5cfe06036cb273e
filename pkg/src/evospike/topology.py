"""Grid layout and connectivity for the cellular-automaton and network models."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ValidationError

CA_RADIUS_RANGE = (1, 6)
NETWORK_DENSITY_RANGE = (0.1, 4.1)


class ModelKind(str, Enum):
    CA = "ca"
    NETWORK = "network"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(f"unknown model kind {value!r}; expected 'ca' or 'network'") from None


@dataclass(frozen=True)
class GridLayout:
    rows: int = 10
    cols: int = 10

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValidationError(f"grid must be non-empty, got {self.rows}x{self.cols}")

    @property
    def n_nodes(self) -> int:
        return self.rows * self.cols

    def position(self, node: int) -> tuple[int, int]:
        return divmod(node, self.cols)

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col

    @property
    def positions(self) -> np.ndarray:
        """(n_nodes, 2) integer array of (row, col), row-major."""
        r, c = np.divmod(np.arange(self.n_nodes), self.cols)
        return np.stack([r, c], axis=1)


@dataclass(frozen=True, eq=False)
class Connectivity:
    """Directed adjacency ``adjacency[pre, post]`` plus per-node signs (+1/-1)."""

    kind: ModelKind
    adjacency: np.ndarray
    signs: np.ndarray = field(default=None)

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        n = adj.shape[0]
        if adj.ndim != 2 or adj.shape != (n, n):
            raise ValidationError(f"adjacency must be square, got shape {adj.shape}")
        if adj.diagonal().any():
            raise ValidationError("adjacency contains self-edges")
        signs = np.ones(n, dtype=np.int8) if self.signs is None else np.asarray(self.signs, dtype=np.int8)
        if signs.shape != (n,) or not np.isin(signs, (-1, 1)).all():
            raise ValidationError("signs must be a length-n vector of +1/-1")
        adj = adj.copy()
        signs = signs.copy()
        adj.flags.writeable = False
        signs.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum())

    def edges(self) -> np.ndarray:
        """(n_edges, 2) array of (pre, post) pairs in row-major order."""
        return np.argwhere(self.adjacency)

    def with_signs(self, signs) -> "Connectivity":
        return Connectivity(self.kind, self.adjacency, signs)

    def __eq__(self, other):
        if not isinstance(other, Connectivity):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.adjacency, other.adjacency)
            and np.array_equal(self.signs, other.signs)
        )

    __hash__ = None


def build_ca(layout: GridLayout, radius: int) -> Connectivity:
    """Moore neighbourhood of the given radius on a bounded grid."""
    lo, hi = CA_RADIUS_RANGE
    if int(radius) != radius or not lo <= radius <= hi:
        raise ValidationError(f"CA radius must be an integer in [{lo}, {hi}], got {radius}")
    pos = layout.positions
    cheb = np.abs(pos[:, None, :] - pos[None, :, :]).max(axis=2)
    adj = cheb <= radius
    np.fill_diagonal(adj, False)
    return Connectivity(ModelKind.CA, adj)


def connection_probability(d, c_D: float):
    """exp(-(d / c_D)^2); accepts scalars or arrays."""
    if not c_D > 0:
        raise ValidationError(f"c_D must be > 0, got {c_D}")
    return np.exp(-np.square(np.asarray(d, dtype=float) / c_D))


def distance_matrix(layout: GridLayout) -> np.ndarray:
    pos = layout.positions.astype(float)
    diff = pos[:, None, :] - pos[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def build_network(layout: GridLayout, c_D: float, rng: np.random.Generator) -> Connectivity:
    """Sample each ordered pair independently with the Gaussian distance kernel.

    Consumes exactly ``n_nodes**2`` uniforms from ``rng`` (diagonal draws are
    discarded) so the stream position after the call does not depend on c_D.
    """
    lo, hi = NETWORK_DENSITY_RANGE
    if not lo <= c_D <= hi:
        raise ValidationError(f"c_D must lie in [{lo}, {hi}], got {c_D}")
    prob = connection_probability(distance_matrix(layout), c_D)
    u = rng.random(prob.shape)
    adj = u < prob
    np.fill_diagonal(adj, False)
    return Connectivity(ModelKind.NETWORK, adj)


def n_inhibitory(n_nodes: int, inhib_ratio: float) -> int:
    # half-up, so 0.125 * 100 -> 13 rather than banker's 12
    return int(math.floor(inhib_ratio * n_nodes + 0.5))


def assign_signs(layout: GridLayout, inhib_ratio: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= inhib_ratio <= 1.0:
        raise ValidationError(f"inhib_ratio must lie in [0, 1], got {inhib_ratio}")
    n = layout.n_nodes
    signs = np.ones(n, dtype=np.int8)
    k = n_inhibitory(n, inhib_ratio)
    signs[rng.permutation(n)[:k]] = -1
    return signs


def build_connectivity(layout: GridLayout, kind: ModelKind, density: float, inhib_ratio: float,
                       rng: np.random.Generator) -> Connectivity:
    """Edges first, then signs, both from the same stream."""
    kind = ModelKind.parse(kind)
    if kind is ModelKind.CA:
        conn = build_ca(layout, int(density))
    else:
        conn = build_network(layout, float(density), rng)
    return conn.with_signs(assign_signs(layout, inhib_ratio, rng))


def observed_nodes(layout: GridLayout) -> list[int]:
    """The 60 recorded nodes: central 8x8 block without its corners, row-major."""
    if (layout.rows, layout.cols) != (10, 10):
        raise ValidationError(f"observed-node mapping is defined for a 10x10 grid, got {layout.rows}x{layout.cols}")
    corners = {(1, 1), (1, 8), (8, 1), (8, 8)}
    return [
        layout.index(r, c)
        for r in range(1, 9)
        for c in range(1, 9)
        if (r, c) not in corners
    ]
