"""Geometric sensor-network model and the topology metrics it is scored on.

An activation vector decides which nodes are awake.  Each awake node
transmits just far enough to reach its nearest awake neighbour (capped at
r_max), links are bidirectional (both radii must cover the distance), and
a topology is scored on total transmit power, the number of nodes whose
radius exceeds the threshold r_t, and the fraction of awake nodes in the
largest connected component.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Node:
    """A sensor at (x, y) with its current transmission radius."""

    x: float
    y: float
    radius: float = 0.0

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")


@dataclass(frozen=True)
class Scenario:
    """A deployment: node positions plus the radio and pairing constants."""

    nodes: tuple
    r_max: float
    r_t: float
    area: tuple
    dist_conn: float
    path_loss_exponent: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "area", (float(self.area[0]), float(self.area[1])))
        n = len(self.nodes)
        if n < 2 or n % 2 != 0:
            raise ValueError(f"node count must be even and >= 2, got {n}")
        if self.r_max <= 0 or self.r_t <= 0 or self.dist_conn <= 0:
            raise ValueError("r_max, r_t and dist_conn must be positive")
        if self.r_t > self.r_max:
            raise ValueError(f"r_t={self.r_t} must not exceed r_max={self.r_max}")
        if self.path_loss_exponent < 1:
            raise ValueError("path_loss_exponent must be >= 1")
        w, h = self.area
        for i, node in enumerate(self.nodes):
            if not (0 <= node.x <= w and 0 <= node.y <= h):
                raise ValueError(f"node {i} at ({node.x}, {node.y}) is outside the {w}x{h} area")
            if node.radius > self.r_max:
                raise ValueError(f"node {i} radius {node.radius} exceeds r_max")

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def positions(self) -> np.ndarray:
        pos = np.array([[node.x, node.y] for node in self.nodes], dtype=np.float64)
        pos.flags.writeable = False
        return pos


@dataclass(frozen=True)
class TopologyMetrics:
    """Score components of one activation on one geometry."""

    total_power: float
    violations: int
    connectivity_ratio: float
    active_count: int


def distance(a: Node, b: Node) -> float:
    """Euclidean distance between two nodes."""
    return math.hypot(a.x - b.x, a.y - b.y)


def power_of_radius(radius: float, gamma: float) -> float:
    """Transmit power for a radius under the path-loss model: radius**gamma."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    return radius ** gamma


def assign_radii(scenario: Scenario, act, positions=None) -> np.ndarray:
    """Radius per node for an activation: nearest active neighbour, capped.

    Active nodes get min(distance to nearest other active node, r_max);
    inactive nodes and a lone active node get 0.
    """
    act = _check_activation(scenario, act)
    pos = scenario.positions if positions is None else np.asarray(positions, dtype=np.float64)
    radii = np.zeros(scenario.n)
    active = np.flatnonzero(act)
    if active.size < 2:
        return radii
    p = pos[active]
    d = _pairwise(p)
    np.fill_diagonal(d, np.inf)
    radii[active] = np.minimum(d.min(axis=1), scenario.r_max)
    return radii


def build_adjacency(scenario: Scenario, act, radii=None, positions=None) -> np.ndarray:
    """Link matrix: 1 iff both endpoints are active and both radii reach.

    Boundary counts: distance exactly equal to a radius is still a link.
    """
    act = _check_activation(scenario, act)
    if radii is None:
        radii = assign_radii(scenario, act, positions)
    radii = np.asarray(radii, dtype=np.float64)
    pos = scenario.positions if positions is None else np.asarray(positions, dtype=np.float64)
    d = _pairwise(pos)
    both_active = (act[:, None] == 1) & (act[None, :] == 1)
    within = (d <= radii[:, None]) & (d <= radii[None, :])
    adj = (both_active & within).astype(np.uint8)
    np.fill_diagonal(adj, 0)
    return adj


def connectivity_ratio(adj, act) -> float:
    """Fraction of active nodes in the largest connected component.

    Defined as 1.0 when at most one node is active.
    """
    act = np.asarray(act)
    active = np.flatnonzero(act)
    if active.size <= 1:
        return 1.0
    adj = np.asarray(adj)
    uf = _UnionFind(len(act))
    rows, cols = np.nonzero(np.triu(adj, 1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        uf.union(i, j)
    sizes = {}
    for i in active.tolist():
        root = uf.find(i)
        sizes[root] = sizes.get(root, 0) + 1
    return max(sizes.values()) / active.size


def threshold_violations(scenario: Scenario, act, radii=None, positions=None) -> int:
    """Count of active nodes transmitting strictly beyond r_t."""
    act = _check_activation(scenario, act)
    if radii is None:
        radii = assign_radii(scenario, act, positions)
    radii = np.asarray(radii, dtype=np.float64)
    return int(np.sum((act == 1) & (radii > scenario.r_t)))


def total_power(scenario: Scenario, act, radii=None, positions=None) -> float:
    """Sum of per-node transmit power over active nodes."""
    act = _check_activation(scenario, act)
    if radii is None:
        radii = assign_radii(scenario, act, positions)
    radii = np.asarray(radii, dtype=np.float64)
    return float(np.sum(radii[act == 1] ** scenario.path_loss_exponent))


def evaluate(scenario: Scenario, act, positions=None) -> TopologyMetrics:
    """Full metric pipeline for one activation at the given geometry."""
    act = _check_activation(scenario, act)
    radii = assign_radii(scenario, act, positions)
    adj = build_adjacency(scenario, act, radii, positions)
    return TopologyMetrics(
        total_power=total_power(scenario, act, radii),
        violations=threshold_violations(scenario, act, radii),
        connectivity_ratio=connectivity_ratio(adj, act),
        active_count=int(act.sum()),
    )


def scenario_fingerprint(scenario: Scenario) -> str:
    """Stable digest of the scenario geometry and constants."""
    payload = {
        "positions": [[node.x, node.y] for node in scenario.nodes],
        "r_max": scenario.r_max,
        "r_t": scenario.r_t,
        "area": list(scenario.area),
        "dist_conn": scenario.dist_conn,
        "path_loss_exponent": scenario.path_loss_exponent,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _check_activation(scenario: Scenario, act) -> np.ndarray:
    act = np.asarray(act, dtype=np.int64)
    if act.shape != (scenario.n,):
        raise ValueError(f"activation vector must have length {scenario.n}, got shape {act.shape}")
    if np.any((act != 0) & (act != 1)):
        raise ValueError("activation vector must be binary")
    return act


def _pairwise(pos: np.ndarray) -> np.ndarray:
    diff = pos[:, None, :] - pos[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


class _UnionFind:
    """Path-compressing union-find over node indices."""

    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
