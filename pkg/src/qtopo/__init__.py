"""Quantum-inspired genetic search for sensor-network topology control.

Two algorithm variants share one evolutionary engine: `qga` keeps an
independent single-qubit gene per node, while `qiga2` pairs nodes into
two-qubit linked registers that remember and adjust their inter-node
distance each generation.  The harness runs seeded batteries of both and
compares them on generations-to-feasibility, final power and threshold
violations.
"""

from .engine import (
    BestStore,
    EngineConfig,
    Feasibility,
    GenerationRecord,
    Observation,
    Population,
    RunResult,
    fitness,
    is_feasible,
    run,
    run_qga_baseline,
)
from .harness import ComparisonSummary, compare, load_scenario, run_experiment
from .lqr import AdjustmentMode, LinkedRegister, PairingPlan, pair_nodes
from .qcore import (
    OrderMetrics,
    QuantumRegister,
    observe,
    order_metrics,
    probabilities,
    quantum_factor_log2,
    relative_order,
    rotate_toward,
    uniform_register,
)
from .wsn import Node, Scenario, TopologyMetrics, evaluate

__all__ = [
    "AdjustmentMode",
    "BestStore",
    "ComparisonSummary",
    "EngineConfig",
    "Feasibility",
    "GenerationRecord",
    "LinkedRegister",
    "Node",
    "Observation",
    "OrderMetrics",
    "PairingPlan",
    "Population",
    "QuantumRegister",
    "RunResult",
    "Scenario",
    "TopologyMetrics",
    "compare",
    "evaluate",
    "fitness",
    "is_feasible",
    "load_scenario",
    "observe",
    "order_metrics",
    "pair_nodes",
    "probabilities",
    "quantum_factor_log2",
    "relative_order",
    "rotate_toward",
    "run",
    "run_experiment",
    "run_qga_baseline",
    "uniform_register",
]

__version__ = "0.1.0"
