"""Paired two-qubit registers with distance memory and step-wise movement.

Nodes are matched into pairs at initialization; each pair shares one
order-2 register and remembers the inter-node distance from the previous
update.  The movement operator nudges a pair's distance toward the
scenario's target connection distance in fixed-size steps, moving one
node (picked at random) or both symmetrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .qcore import QuantumRegister, uniform_register
from .wsn import Scenario

BOTH = "both"

_DIST_TOL = 1e-9
_STALL_LIMIT = 10


class AdjustmentMode(Enum):
    UNIDIRECTIONAL = "unidirectional"
    BIDIRECTIONAL = "bidirectional"


class StallError(RuntimeError):
    """Raised when area clamping blocks a pair from reaching its target."""


@dataclass
class LinkedRegister:
    """Two node indices bound to one order-2 register, with distance memory."""

    register_id: int
    node_a: int
    node_b: int
    register: QuantumRegister
    last_distance: float

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise ValueError("a linked register needs two distinct nodes")
        if self.register.order != 2:
            raise ValueError("linked registers are order 2")


@dataclass
class PairingPlan:
    """A partition of all nodes into linked pairs."""

    pairs: list = field(default_factory=list)

    def __post_init__(self):
        members = [node for p in self.pairs for node in (p.node_a, p.node_b)]
        if sorted(members) != list(range(len(members))):
            raise ValueError("pairs must cover every node index exactly once")


def pair_nodes(scenario: Scenario) -> PairingPlan:
    """Greedy nearest-neighbour matching over the scenario's nodes.

    Repeatedly takes the lowest-index unpaired node and pairs it with its
    nearest unpaired neighbour, breaking distance ties by lower index.
    Registers start uniform; distance memory starts at the true distance.
    """
    n = scenario.n
    if n % 2 != 0:
        raise ValueError(f"pairing needs an even node count, got {n}")
    pos = scenario.positions
    unpaired = list(range(n))
    pairs = []
    while unpaired:
        i = unpaired.pop(0)
        best_j, best_d = None, math.inf
        for j in unpaired:
            d = math.hypot(pos[i, 0] - pos[j, 0], pos[i, 1] - pos[j, 1])
            if d < best_d:
                best_j, best_d = j, d
        unpaired.remove(best_j)
        pairs.append(
            LinkedRegister(
                register_id=len(pairs),
                node_a=i,
                node_b=best_j,
                register=uniform_register(2),
                last_distance=best_d,
            )
        )
    return PairingPlan(pairs)


def select_mover(pair: LinkedRegister, mode: AdjustmentMode, rng: np.random.Generator):
    """Pick which node moves this step.

    Unidirectional: node_a or node_b with probability 1/2 (one rng draw).
    Bidirectional: the constant BOTH, consuming no randomness.
    """
    if mode is AdjustmentMode.BIDIRECTIONAL:
        return BOTH
    return pair.node_a if rng.random() < 0.5 else pair.node_b


def adjust_step(
    pair: LinkedRegister,
    positions: np.ndarray,
    dist_conn: float,
    delta: float,
    mode: AdjustmentMode,
    rng: np.random.Generator,
    area=None,
) -> np.ndarray:
    """One movement step of the pair distance toward dist_conn.

    The pair distance changes by step = min(delta, |d - dist_conn|), so
    the final step lands exactly on the target.  The selected node moves
    along the line through the pair (both nodes move step/2 in opposite
    senses in bidirectional mode).  Coordinates are clamped to the area
    rectangle when one is given, which can shorten the achieved step.
    A coincident pair (d = 0) has no direction, so node_b is pushed +x.

    Returns a new positions array; other pairs are untouched.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    out = positions.copy()
    pa, pb = out[pair.node_a], out[pair.node_b]
    d = float(np.hypot(*(pb - pa)))
    gap = dist_conn - d
    if abs(gap) <= _DIST_TOL:
        return out
    step = min(delta, abs(gap))
    if d == 0.0:
        out[pair.node_b, 0] += step
        _clamp(out, pair.node_b, area)
        return out
    u = (pb - pa) / d
    sign = 1.0 if gap > 0 else -1.0  # +1 moves the pair apart
    mover = select_mover(pair, mode, rng)
    if mover == BOTH:
        out[pair.node_a] = pa - u * (sign * step / 2)
        out[pair.node_b] = pb + u * (sign * step / 2)
        _clamp(out, pair.node_a, area)
        _clamp(out, pair.node_b, area)
    elif mover == pair.node_a:
        out[pair.node_a] = pa - u * (sign * step)
        _clamp(out, pair.node_a, area)
    else:
        out[pair.node_b] = pb + u * (sign * step)
        _clamp(out, pair.node_b, area)
    return out


def converge_pair(
    pair: LinkedRegister,
    positions: np.ndarray,
    dist_conn: float,
    delta: float,
    mode: AdjustmentMode,
    rng: np.random.Generator,
    area=None,
):
    """Iterate adjust_step until the pair sits at dist_conn.

    Returns (positions, steps_taken).  Unobstructed, the step count is
    exactly ceil(|d0 - dist_conn| / delta).  If clamping stops the gap
    from shrinking for 10 consecutive steps, raises StallError rather
    than looping forever.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    steps = 0
    stalled = 0
    gap = abs(_pair_distance(pair, positions) - dist_conn)
    while gap > _DIST_TOL:
        positions = adjust_step(pair, positions, dist_conn, delta, mode, rng, area)
        steps += 1
        new_gap = abs(_pair_distance(pair, positions) - dist_conn)
        if new_gap >= gap - 1e-12:
            stalled += 1
            if stalled >= _STALL_LIMIT:
                raise StallError(
                    f"pair {pair.register_id} ({pair.node_a},{pair.node_b}) stalled "
                    f"at distance gap {new_gap:.6g} after {steps} steps"
                )
        else:
            stalled = 0
        gap = new_gap
    return positions, steps


def update_memory(pair: LinkedRegister, positions: np.ndarray) -> LinkedRegister:
    """Refresh the pair's stored distance from the current positions."""
    pair.last_distance = _pair_distance(pair, positions)
    return pair


def _pair_distance(pair: LinkedRegister, positions: np.ndarray) -> float:
    pa, pb = positions[pair.node_a], positions[pair.node_b]
    return float(np.hypot(*(pb - pa)))


def _clamp(positions: np.ndarray, idx: int, area):
    if area is None:
        return
    positions[idx, 0] = min(max(positions[idx, 0], 0.0), area[0])
    positions[idx, 1] = min(max(positions[idx, 1], 0.0), area[1])
