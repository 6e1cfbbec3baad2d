"""Quantum-register representation and order/factor arithmetic.

A register of order r holds 2**r real, nonnegative amplitudes over the
basis bit strings of length r.  Observation samples a basis string with
squared-amplitude probabilities; variation is a capped plane rotation
toward a target basis state.  Amplitudes stay in the nonnegative orthant
throughout, so probabilities are all that ever matter.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property

import numpy as np

_NORM_TOL = 1e-9
_SUPPORTED_ORDERS = (1, 2)


@dataclass(frozen=True, eq=False)
class QuantumRegister:
    """Immutable register: `order` qubits, 2**order unit-norm amplitudes."""

    order: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order}")
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        if amps.shape != (2 ** self.order,):
            raise ValueError(
                f"order-{self.order} register needs {2 ** self.order} amplitudes, "
                f"got shape {amps.shape}"
            )
        if np.any(amps < -_NORM_TOL) or np.any(amps > 1.0 + _NORM_TOL):
            raise ValueError("amplitudes must lie in [0, 1]")
        if abs(float(np.dot(amps, amps)) - 1.0) > _NORM_TOL:
            raise ValueError("amplitudes must have unit squared sum")
        amps = np.clip(amps, 0.0, 1.0)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @cached_property
    def _cumulative(self) -> tuple:
        # cumulative squared amplitudes, cached for fast repeated observation
        total, cum = 0.0, []
        for a in self.amplitudes.tolist():
            total += a * a
            cum.append(total)
        return tuple(cum)


@dataclass(frozen=True)
class OrderMetrics:
    """Register-size bookkeeping: order r against total problem size N."""

    quantum_order: int
    problem_size: int
    relative_order: float
    log2_quantum_factor: float


def uniform_register(order: int) -> QuantumRegister:
    """Register in the uniform superposition (1/sqrt(2) per qubit).

    Only orders 1 and 2 are supported; larger registers are out of scope.
    """
    if order not in _SUPPORTED_ORDERS:
        raise ValueError(f"order must be 1 or 2, got {order}")
    size = 2 ** order
    return QuantumRegister(order, np.full(size, size ** -0.5))


def probabilities(reg: QuantumRegister) -> np.ndarray:
    """Observation probabilities: element k is amplitudes[k] squared."""
    return reg.amplitudes ** 2


def observe(reg: QuantumRegister, rng: np.random.Generator) -> str:
    """Sample one basis bit string, consuming exactly one draw from rng.

    The first gene is the most significant bit of the basis index, so an
    order-2 register returning index 2 yields "10".
    """
    u = rng.random()
    k = bisect_right(reg._cumulative, u)
    k = min(k, len(reg._cumulative) - 1)
    return format(k, f"0{reg.order}b")


def rotate_toward(reg: QuantumRegister, target: str, theta: float) -> QuantumRegister:
    """Rotate the amplitude vector toward the target basis state.

    The rotation happens in the 2-plane spanned by the current vector v
    and the basis vector e_t, by angle min(theta, phi) where phi is the
    current angle between them.  The cap means repeated rotation converges
    onto e_t exactly instead of overshooting, and it keeps every amplitude
    nonnegative.  Norm is preserved (renormalized each call, so drift over
    long sequences stays at machine epsilon).

    Args:
        reg: register to rotate (unchanged; a new register is returned).
        target: bit string of length reg.order.
        theta: rotation angle in radians, >= 0.

    Returns:
        The rotated register.
    """
    if len(target) != reg.order or any(c not in "01" for c in target):
        raise ValueError(f"target must be a bit string of length {reg.order}, got {target!r}")
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    t = int(target, 2)
    v = reg.amplitudes
    cos_phi = min(float(v[t]), 1.0)
    phi = math.acos(cos_phi)
    if theta == 0.0 or phi == 0.0:
        return reg
    phi_new = phi - min(theta, phi)
    rest = v.copy()
    rest[t] = 0.0
    sin_phi = float(np.linalg.norm(rest))
    if sin_phi == 0.0:
        return reg
    out = rest * (math.sin(phi_new) / sin_phi)
    out[t] = math.cos(phi_new)
    out /= np.linalg.norm(out)
    return QuantumRegister(reg.order, out)


def relative_order(r: int, n: int) -> float:
    """Ratio of register size to problem size, w = r/n."""
    _check_order_args(r, n)
    return r / n


def quantum_factor_log2(r: int, n: int) -> float:
    """log2 of the state-space coverage factor 2**r / (w * 2**n).

    Exposed in log form because 2**n underflows/overflows floats long
    before realistic problem sizes; the linear value is 2**result.
    """
    _check_order_args(r, n)
    return r - n - math.log2(r / n)


def order_metrics(r: int, n: int) -> OrderMetrics:
    """Bundle the order arithmetic for a register size r on n genes."""
    return OrderMetrics(r, n, relative_order(r, n), quantum_factor_log2(r, n))


def _check_order_args(r: int, n: int):
    if r < 1 or n < 1:
        raise ValueError(f"r and n must be positive, got r={r}, n={n}")
    if r > n:
        raise ValueError(f"register order r={r} cannot exceed problem size n={n}")
