import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from merminlab._kernels import HAVE_NUMBA
from merminlab.pauli import WeightedPauliSum
from merminlab.statevector import (
    CNOT,
    Circuit,
    GateOp,
    H,
    StateVector,
    U1,
    apply,
    build_ghz_circuit,
    expectation_complex,
    expectation_exact,
    ghz_like_state,
    pauli_expectations,
    prepare_theta_state,
    run,
)

SQ = 1 / math.sqrt(2)


def ghz_oracle(n, phi):
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = SQ
    amps[-1] = SQ * np.exp(1j * phi)
    return StateVector(n, amps)


def test_gate_examples():
    s = apply(StateVector.zeros(1), H(0))
    np.testing.assert_allclose(s.amps, [SQ, SQ], atol=1e-15)
    s = apply(StateVector.basis(1, 1), U1(0, 0.3))
    np.testing.assert_allclose(s.amps, [0, np.exp(0.3j)], atol=1e-15)
    s = StateVector(2, [SQ, SQ, 0, 0])  # (|00> + |10>)/sqrt2, qubit 0 is bit 0
    apply(s, CNOT(0, 1))
    np.testing.assert_allclose(s.amps, [SQ, 0, 0, SQ], atol=1e-15)


def test_ghz_examples():
    np.testing.assert_allclose(ghz_like_state(5, math.pi).amps, ghz_oracle(5, math.pi).amps, atol=1e-12)
    np.testing.assert_allclose(ghz_like_state(2, 0).amps, [SQ, 0, 0, SQ], atol=1e-12)
    s = ghz_like_state(3, math.pi / 2)
    assert s.amps[7] == pytest.approx(1j * SQ)


@pytest.mark.parametrize("n", range(2, 11))
def test_ghz_fidelity(n):
    for k in range(8):
        phi = k * math.pi / 4
        assert run(build_ghz_circuit(n, phi)).fidelity(ghz_oracle(n, phi)) == pytest.approx(1, abs=1e-12)


def test_theta_state_examples():
    for phi in (0.0, 1.0):
        assert prepare_theta_state(2, math.pi / 4, phi).fidelity(ghz_oracle(2, phi)) == pytest.approx(1, abs=1e-12)
    assert prepare_theta_state(2, 0.0, 0.7).fidelity(StateVector.basis(2, 3)) == pytest.approx(1, abs=1e-12)
    assert prepare_theta_state(3, math.pi / 2, 0.0).fidelity(StateVector.zeros(3)) == pytest.approx(1, abs=1e-12)


def test_expectation_examples(pairs):
    for phi in np.linspace(0, 2 * math.pi, 9):
        s = ghz_like_state(2, phi)
        xx, xy = pauli_expectations(s, ["XX", "XY"])
        assert xx == pytest.approx(math.cos(phi), abs=1e-12)
        assert xy == pytest.approx(math.sin(phi), abs=1e-12)
    assert expectation_exact(ghz_oracle(3, math.pi / 2), pairs[3].m) == pytest.approx(4, abs=1e-12)


def test_y_eigenstate():
    # Y|0> = i|1>; (|0> + i|1>)/sqrt2 is the +1 eigenstate
    s = StateVector(1, [SQ, 1j * SQ])
    assert expectation_complex(s, WeightedPauliSum(1, {"Y": 1})) == pytest.approx(1)


def test_validation():
    with pytest.raises(ValueError):
        StateVector(1, [1, 1])
    with pytest.raises(ValueError):
        GateOp("cx", (1, 1))
    with pytest.raises(ValueError):
        GateOp("foo", (0,))
    with pytest.raises(ValueError):
        Circuit(2, [H(2)])
    with pytest.raises(IndexError):
        apply(StateVector.zeros(2), H(3))


def test_circuit_json_round_trip():
    c = build_ghz_circuit(4, 0.25)
    assert Circuit.from_json(c.to_json()) == c


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_backends_agree():
    c = build_ghz_circuit(6, 1.1)
    a = run(c, backend="numba").amps
    b = run(c, backend="numpy").amps
    np.testing.assert_array_equal(a, b)


gates = st.one_of(
    st.builds(lambda g, q: GateOp(g, (q,)), st.sampled_from(["h", "x", "y", "z", "s", "sdg"]), st.integers(0, 3)),
    st.builds(lambda q, p: U1(q, p), st.integers(0, 3), st.floats(-7, 7)),
    st.builds(lambda a, d: CNOT(a, (a + d) % 4), st.integers(0, 3), st.integers(1, 3)),
)


@settings(max_examples=50, deadline=None)
@given(st.lists(gates, max_size=30))
def test_norm_preserved(ops):
    s = StateVector.zeros(4)
    for op in ops:
        apply(s, op)
        assert abs(s.norm() - 1) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0, math.pi / 2), st.floats(0, 2 * math.pi))
def test_radius_law(theta, phi):
    from merminlab.mermin import canonical_operator

    p = canonical_operator(2)
    s = prepare_theta_state(2, theta, phi)
    r = math.hypot(expectation_exact(s, p.m), expectation_exact(s, p.m_prime))
    assert r == pytest.approx(2 * math.sqrt(2) * math.sin(2 * theta), abs=1e-9)
