import math
from collections import Counter

import numpy as np
import pytest

from qtopo.qcore import (
    QuantumRegister,
    observe,
    order_metrics,
    probabilities,
    quantum_factor_log2,
    relative_order,
    rotate_toward,
    uniform_register,
)
from qtopo.rng import stream


def test_uniform_register_order1():
    reg = uniform_register(1)
    assert np.allclose(reg.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_uniform_register_order2():
    reg = uniform_register(2)
    assert np.allclose(reg.amplitudes, [0.5, 0.5, 0.5, 0.5])
    assert np.allclose(probabilities(reg), [0.25, 0.25, 0.25, 0.25])


@pytest.mark.parametrize("order", [0, 3, -1])
def test_uniform_register_rejects_unsupported_orders(order):
    with pytest.raises(ValueError):
        uniform_register(order)


def test_register_validates_norm_and_sign():
    with pytest.raises(ValueError):
        QuantumRegister(2, np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        QuantumRegister(1, np.array([-0.6, 0.8]))
    with pytest.raises(ValueError):
        QuantumRegister(2, np.array([1.0, 0.0]))


def test_probabilities_basis_state():
    reg = QuantumRegister(2, np.array([1.0, 0.0, 0.0, 0.0]))
    assert np.allclose(probabilities(reg), [1, 0, 0, 0])


def test_probabilities_definition():
    reg = QuantumRegister(2, np.array([math.sqrt(0.7), math.sqrt(0.3), 0.0, 0.0]))
    assert np.allclose(probabilities(reg), [0.7, 0.3, 0.0, 0.0])
    assert abs(probabilities(reg).sum() - 1.0) <= 1e-9


def test_observe_degenerate_states():
    rng = stream(1, 0)
    lo = QuantumRegister(2, np.array([1.0, 0.0, 0.0, 0.0]))
    hi = QuantumRegister(2, np.array([0.0, 0.0, 0.0, 1.0]))
    assert all(observe(lo, rng) == "00" for _ in range(50))
    assert all(observe(hi, rng) == "11" for _ in range(50))


def test_observe_reproducible_and_single_draw():
    reg = uniform_register(2)
    a = [observe(reg, stream(42, 3, 9)) for _ in range(20)]
    b = [observe(reg, stream(42, 3, 9)) for _ in range(20)]
    assert a == b
    # exactly one uniform consumed per observation
    r1, r2 = stream(7, 0), stream(7, 0)
    observe(reg, r1)
    r2.random()
    assert r1.random() == r2.random()


def test_observe_uniform_frequencies():
    reg = uniform_register(2)
    rng = stream(123, 0)
    counts = Counter(observe(reg, rng) for _ in range(100_000))
    assert set(counts) == {"00", "01", "10", "11"}
    for freq in counts.values():
        assert 0.24 <= freq / 100_000 <= 0.26


def test_rotate_toward_already_aligned():
    reg = QuantumRegister(2, np.array([1.0, 0.0, 0.0, 0.0]))
    out = rotate_toward(reg, "00", 1.3)
    assert np.allclose(out.amplitudes, reg.amplitudes)


def test_rotate_toward_zero_angle_is_identity():
    reg = uniform_register(2)
    out = rotate_toward(reg, "10", 0.0)
    assert np.array_equal(out.amplitudes, reg.amplitudes)


def _plane_rotation_oracle(v, t, angle):
    # independent construction: exact rotation matrix in the (e_t, v_perp) plane
    e = np.zeros_like(v)
    e[t] = 1.0
    w = v - np.dot(v, e) * e
    w = w / np.linalg.norm(w)
    outer = np.outer
    generator = outer(e, w) - outer(w, e)
    projector = outer(e, e) + outer(w, w)
    rot = np.eye(len(v)) + math.sin(angle) * generator + (math.cos(angle) - 1.0) * projector
    return rot @ v


def test_rotate_toward_full_alignment_matches_plane_rotation():
    reg = uniform_register(2)
    phi = math.acos(0.5)
    expected = _plane_rotation_oracle(reg.amplitudes.copy(), 3, phi)
    assert np.allclose(expected, [0, 0, 0, 1], atol=1e-12)
    out = rotate_toward(reg, "11", phi)
    assert np.allclose(out.amplitudes, [0, 0, 0, 1], atol=1e-9)


def test_rotate_toward_partial_step_matches_plane_rotation():
    reg = uniform_register(2)
    theta = 0.17
    expected = _plane_rotation_oracle(reg.amplitudes.copy(), 2, theta)
    out = rotate_toward(reg, "10", theta)
    assert np.allclose(out.amplitudes, expected, atol=1e-12)


def test_rotate_toward_closed_form_target_probability():
    out = rotate_toward(uniform_register(2), "11", 0.01 * math.pi)
    expected = math.sin(math.asin(0.5) + 0.01 * math.pi) ** 2
    assert abs(probabilities(out)[3] - expected) <= 1e-9
    assert abs(expected - 0.2776824104075363) <= 1e-12


def test_rotate_toward_caps_at_target():
    reg = uniform_register(2)
    out = rotate_toward(reg, "01", 10.0)
    assert np.allclose(out.amplitudes, [0, 1, 0, 0], atol=1e-9)


@pytest.mark.parametrize("target", ["2x", "0", "001", "ab"])
def test_rotate_toward_rejects_bad_targets(target):
    with pytest.raises(ValueError):
        rotate_toward(uniform_register(2), target, 0.1)


def test_rotate_toward_rejects_negative_theta():
    with pytest.raises(ValueError):
        rotate_toward(uniform_register(2), "11", -0.1)


def test_normalization_closure_under_random_rotations():
    rng = stream(2024, 1)
    reg = uniform_register(2)
    for _ in range(10_000):
        target = format(int(rng.random() * 4), "02b")
        theta = rng.random() * 0.5
        reg = rotate_toward(reg, target, theta)
        assert abs(float(np.dot(reg.amplitudes, reg.amplitudes)) - 1.0) <= 1e-9
        assert np.all(reg.amplitudes >= 0.0)


def test_monotone_approach_reaches_target():
    theta = 0.05
    reg = uniform_register(2)
    phi0 = math.acos(0.5)
    bound = math.ceil(phi0 / theta)
    prev = probabilities(reg)[3]
    steps = 0
    while probabilities(reg)[3] < 1.0 - 1e-12:
        reg = rotate_toward(reg, "11", theta)
        cur = probabilities(reg)[3]
        assert cur >= prev
        prev = cur
        steps += 1
        assert steps <= bound
    assert steps == bound


def test_relative_order_values():
    assert relative_order(2, 100) == 0.02
    assert relative_order(5, 5) == 1.0
    assert relative_order(2, 16) == 0.125


@pytest.mark.parametrize("r,n", [(3, 2), (0, 5), (2, 0)])
def test_relative_order_rejects_bad_args(r, n):
    with pytest.raises(ValueError):
        relative_order(r, n)


def test_quantum_factor_log2_values():
    assert quantum_factor_log2(4, 4) == 0.0
    assert abs(quantum_factor_log2(2, 16) - (-11.0)) <= 1e-12
    # arbitrary-precision oracle for the r=2, N=100 case
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    lam = mp.mpf(2) ** 2 / ((mp.mpf(2) / 100) * mp.mpf(2) ** 100)
    assert abs(quantum_factor_log2(2, 100) - float(mp.log(lam, 2))) <= 1e-9


def test_quantum_factor_log2_monotone_in_order():
    # 2**r / r is equal at r=1 and r=2, so growth is strict only from r=2 on
    for n in (4, 16, 100):
        assert quantum_factor_log2(1, n) == pytest.approx(quantum_factor_log2(2, n))
        for r in range(2, n):
            assert quantum_factor_log2(r, n) < quantum_factor_log2(r + 1, n)


def test_order_metrics_bundle():
    m = order_metrics(2, 16)
    assert (m.quantum_order, m.problem_size) == (2, 16)
    assert 0 < m.relative_order <= 1
    assert m.log2_quantum_factor <= 0
    assert order_metrics(8, 8).log2_quantum_factor == 0.0
