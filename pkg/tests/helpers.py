"""Shared construction helpers for the test suite."""

from qtopo.engine import EngineConfig, Feasibility
from qtopo.lqr import AdjustmentMode
from qtopo.wsn import Node, Scenario


def make_scenario(coords, r_max=10.0, r_t=7.0, area=(100.0, 100.0), dist_conn=4.0, gamma=2.0):
    return Scenario(
        nodes=tuple(Node(float(x), float(y)) for x, y in coords),
        r_max=r_max,
        r_t=r_t,
        area=area,
        dist_conn=dist_conn,
        path_loss_exponent=gamma,
    )


def make_config(algorithm="qiga2", generations_max=50, seed=1, delta=1.0,
                min_ratio=1.0, max_violations=0, **kwargs):
    return EngineConfig(
        algorithm=algorithm,
        generations_max=generations_max,
        seed=seed,
        delta=delta,
        feasibility=Feasibility(min_ratio, max_violations),
        **kwargs,
    )


def square_scenario(side=4.0, **kwargs):
    """Four nodes on the corners of a square with the given side."""
    return make_scenario([(0, 0), (side, 0), (0, side), (side, side)], **kwargs)


UNI = AdjustmentMode.UNIDIRECTIONAL
BI = AdjustmentMode.BIDIRECTIONAL
