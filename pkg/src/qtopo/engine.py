"""Evolutionary loop shared by the order-1 and order-2 algorithms.

Each generation observes the register population several times, picks an
exemplar by roulette over fitness, moves linked pairs that the exemplar
activated (order-2 only), refreshes the best-so-far store, and rotates
every register toward the best solution.  Runs are a pure function of
(seed, config, scenario): every draw comes from a counter-based stream
keyed by seed, lane and generation, so results are bit-identical across
platforms and across repeated or resumed executions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as rngmod
from .lqr import AdjustmentMode, PairingPlan, adjust_step, pair_nodes, update_memory
from .qcore import QuantumRegister, observe, rotate_toward, uniform_register
from .wsn import Scenario, TopologyMetrics, evaluate, scenario_fingerprint

ALGORITHMS = ("qga", "qiga2")

DEFAULT_THETA = 0.01 * math.pi
DEFAULT_WEIGHTS = (0.5, 0.3, 0.2)


@dataclass(frozen=True)
class Feasibility:
    """Thresholds that define when a stored solution counts as found."""

    min_connectivity_ratio: float
    max_violations: int

    def __post_init__(self):
        if not 0 <= self.min_connectivity_ratio <= 1:
            raise ValueError("min_connectivity_ratio must be in [0, 1]")
        if self.max_violations < 0:
            raise ValueError("max_violations must be >= 0")


@dataclass(frozen=True)
class EngineConfig:
    algorithm: str
    generations_max: int
    seed: int
    delta: float
    feasibility: Feasibility
    theta: float = DEFAULT_THETA
    mode: AdjustmentMode = AdjustmentMode.UNIDIRECTIONAL
    fitness_weights: tuple = DEFAULT_WEIGHTS
    observations_per_generation: int = 10

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.generations_max < 0:
            raise ValueError("generations_max must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.observations_per_generation < 1:
            raise ValueError("observations_per_generation must be >= 1")
        w = tuple(float(x) for x in self.fitness_weights)
        if len(w) != 3 or any(x < 0 for x in w):
            raise ValueError("fitness_weights must be three nonnegative reals")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"fitness_weights must sum to 1, got {sum(w)}")
        object.__setattr__(self, "fitness_weights", w)


@dataclass
class Population:
    """Registers plus the node indices each register's genes decode to."""

    registers: list
    register_nodes: list

    @property
    def gene_count(self) -> int:
        return sum(len(nodes) for nodes in self.register_nodes)


@dataclass
class Observation:
    """One observed activation with its metrics and scalar fitness."""

    bits: np.ndarray
    fitness: float
    metrics: TopologyMetrics


@dataclass
class BestStore:
    """Best solution seen so far; fitness is monotone over a run."""

    best_bits: np.ndarray
    best_fitness: float
    found_at_generation: int


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    total_power: float
    violations: int
    connectivity_ratio: float
    feasible: bool


@dataclass
class RunResult:
    history: list
    first_feasible_generation: int | None
    best: BestStore | None
    final_positions: np.ndarray
    seed: int
    algorithm: str
    scenario_fingerprint: str


@dataclass
class EngineState:
    scenario: Scenario
    config: EngineConfig
    population: Population
    plan: PairingPlan | None
    positions: np.ndarray
    best: BestStore | None = None
    first_feasible_generation: int | None = None
    history: list = field(default_factory=list)
    generation: int = 0


def init_population(scenario: Scenario, config: EngineConfig):
    """Uniform starting population: paired order-2 registers, or one
    order-1 register per node for the baseline."""
    if config.algorithm == "qiga2":
        plan = pair_nodes(scenario)
        pop = Population(
            registers=[p.register for p in plan.pairs],
            register_nodes=[(p.node_a, p.node_b) for p in plan.pairs],
        )
        return pop, plan
    pop = Population(
        registers=[uniform_register(1) for _ in range(scenario.n)],
        register_nodes=[(i,) for i in range(scenario.n)],
    )
    return pop, None


def observe_population(pop: Population, rng: np.random.Generator) -> np.ndarray:
    """Observe every register in order and place the genes at their nodes."""
    bits = np.zeros(pop.gene_count, dtype=np.int64)
    for reg, nodes in zip(pop.registers, pop.register_nodes):
        genes = observe(reg, rng)
        for gene, node in zip(genes, nodes):
            bits[node] = int(gene)
    return bits


def fitness_from_metrics(metrics: TopologyMetrics, weights, power_reference: float) -> float:
    """Weighted score in [0, 1] of connectivity, saved power, and sparsity
    of threshold violations.  Every term is clamped to [0, 1]; the
    violation term is vacuously 1 with no active nodes."""
    alpha, beta, gamma = weights
    power_term = min(max(1.0 - metrics.total_power / power_reference, 0.0), 1.0)
    if metrics.active_count == 0:
        violation_term = 1.0
    else:
        violation_term = min(max(1.0 - metrics.violations / metrics.active_count, 0.0), 1.0)
    conn_term = min(max(metrics.connectivity_ratio, 0.0), 1.0)
    return alpha * conn_term + beta * power_term + gamma * violation_term


def fitness(scenario: Scenario, act, weights=DEFAULT_WEIGHTS, positions=None) -> float:
    """Score one activation vector at the given geometry."""
    metrics = evaluate(scenario, act, positions)
    return fitness_from_metrics(metrics, weights, power_reference(scenario))


def power_reference(scenario: Scenario) -> float:
    """Worst-case total power: every node at r_max."""
    return scenario.n * scenario.r_max ** scenario.path_loss_exponent


def is_feasible(metrics: TopologyMetrics, feasibility: Feasibility) -> bool:
    """A solution is found when connectivity and violation thresholds hold
    for at least two active nodes."""
    return (
        metrics.active_count >= 2
        and metrics.connectivity_ratio >= feasibility.min_connectivity_ratio
        and metrics.violations <= feasibility.max_violations
    )


def roulette_select(observations, count: int, rng: np.random.Generator):
    """Sample observation indices with replacement, proportional to fitness.

    Falls back to uniform selection when every fitness is zero.  One rng
    draw per selected index.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    weights = [max(o.fitness, 0.0) for o in observations]
    total = sum(weights)
    if total <= 0.0:
        weights = [1.0] * len(observations)
        total = float(len(observations))
    cum = []
    acc = 0.0
    for w in weights:
        acc += w / total
        cum.append(acc)
    picks = []
    for _ in range(count):
        u = rng.random()
        k = 0
        while k < len(cum) - 1 and u >= cum[k]:
            k += 1
        picks.append(k)
    return picks


def update_quantum(pop: Population, best: BestStore, theta: float) -> Population:
    """Rotate every register toward the best solution's genes at its nodes."""
    new_regs = []
    for reg, nodes in zip(pop.registers, pop.register_nodes):
        target = "".join(str(int(best.best_bits[node])) for node in nodes)
        new_regs.append(rotate_toward(reg, target, theta))
    return Population(new_regs, pop.register_nodes)


def new_state(scenario: Scenario, config: EngineConfig) -> EngineState:
    pop, plan = init_population(scenario, config)
    return EngineState(
        scenario=scenario,
        config=config,
        population=pop,
        plan=plan,
        positions=scenario.positions.copy(),
    )


def step_generation(state: EngineState) -> EngineState:
    """Advance one generation: observe, select, move, score, store, rotate."""
    cfg, scenario = state.config, state.scenario
    g = state.generation
    if g >= cfg.generations_max:
        raise ValueError(f"run already at generations_max={cfg.generations_max}")
    p_ref = power_reference(scenario)

    # observe K candidate activations at the current geometry
    rng_obs = rngmod.stream(cfg.seed, rngmod.LANE_OBSERVE, g)
    observations = []
    for _ in range(cfg.observations_per_generation):
        bits = observe_population(state.population, rng_obs)
        metrics = evaluate(scenario, bits, state.positions)
        observations.append(
            Observation(bits, fitness_from_metrics(metrics, cfg.fitness_weights, p_ref), metrics)
        )
    rng_sel = rngmod.stream(cfg.seed, rngmod.LANE_SELECT, g)
    exemplar = observations[roulette_select(observations, 1, rng_sel)[0]]

    # pairs fully activated by the exemplar take one distance step
    if state.plan is not None:
        for pair in state.plan.pairs:
            if exemplar.bits[pair.node_a] == 1 and exemplar.bits[pair.node_b] == 1:
                rng_move = rngmod.stream(cfg.seed, pair.register_id, g)
                state.positions = adjust_step(
                    pair, state.positions, scenario.dist_conn, cfg.delta,
                    cfg.mode, rng_move, area=scenario.area,
                )
        for pair in state.plan.pairs:
            update_memory(pair, state.positions)

    # re-score the exemplar on the moved geometry and update the store
    metrics = evaluate(scenario, exemplar.bits, state.positions)
    fit = fitness_from_metrics(metrics, cfg.fitness_weights, p_ref)
    if state.best is None or fit > state.best.best_fitness:
        state.best = BestStore(exemplar.bits.copy(), fit, g)

    best_metrics = evaluate(scenario, state.best.best_bits, state.positions)
    feasible = is_feasible(best_metrics, cfg.feasibility)
    if feasible and state.first_feasible_generation is None:
        state.first_feasible_generation = g
    state.history.append(
        GenerationRecord(
            generation=g,
            best_fitness=state.best.best_fitness,
            total_power=best_metrics.total_power,
            violations=best_metrics.violations,
            connectivity_ratio=best_metrics.connectivity_ratio,
            feasible=feasible,
        )
    )

    state.population = update_quantum(state.population, state.best, cfg.theta)
    if state.plan is not None:
        for pair, reg in zip(state.plan.pairs, state.population.registers):
            pair.register = reg
    state.generation += 1
    return state


def run(scenario: Scenario, config: EngineConfig) -> RunResult:
    """Run to generations_max, recording when feasibility is first reached.

    The loop keeps going after the first feasible generation so the best
    solution keeps improving; both the first-feasible and the best-found
    generation end up in the result.
    """
    state = new_state(scenario, config)
    for _ in range(config.generations_max):
        step_generation(state)
    return RunResult(
        history=state.history,
        first_feasible_generation=state.first_feasible_generation,
        best=state.best,
        final_positions=state.positions,
        seed=config.seed,
        algorithm=config.algorithm,
        scenario_fingerprint=scenario_fingerprint(scenario),
    )


def run_qga_baseline(scenario: Scenario, config: EngineConfig) -> RunResult:
    """The order-1 baseline: same loop, static positions, per-node qubits."""
    if config.algorithm != "qga":
        config = replace(config, algorithm="qga")
    return run(scenario, config)
