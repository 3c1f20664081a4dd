import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from merminlab.mermin import (
    F_TABLE,
    AnalyticSpec,
    MerminPair,
    TableInconsistencyError,
    analytic_expectation,
    build_recursive,
    canonical_operator,
    f_coefficient,
    f_expansion,
    lhv_max_bruteforce,
    lr_bound,
    normalize,
    phi_max,
    quantum_max_normalized,
    recursion_scale,
)
from merminlab.pauli import WeightedPauliSum, y_weight
from merminlab.statevector import expectation_exact, ghz_like_state

SQ2 = math.sqrt(2)


def test_recursion_base_cases():
    p1 = build_recursive(1)
    assert dict(p1.m.terms) == {"X": 1} and dict(p1.m_prime.terms) == {"Y": 1}
    assert dict(build_recursive(2).m.terms) == {"XX": 1, "XY": 1, "YX": 1, "YY": -1}
    assert dict(build_recursive(3).m.terms) == {"XXY": 2, "XYX": 2, "YXX": 2, "YYY": -2}


def test_f_expansion_examples():
    assert dict(f_expansion(2).terms) == {"XX": 1, "XY": 1, "YX": 1, "YY": -1}
    assert dict(f_expansion(3).terms) == {"XXY": 1, "XYX": 1, "YXX": 1, "YYY": -1}


def test_scale_factors():
    # measured oracle: k_n = 2^floor((n-1)/2)
    expected = {2: 1, 3: 2, 4: 2, 5: 4, 6: 4, 7: 8, 8: 8}
    for n, k in expected.items():
        assert recursion_scale(n) == Fraction(k)
        assert build_recursive(n).m == f_expansion(n) * k


def test_class_structure():
    for n in range(2, 9):
        m = canonical_operator(n).m
        for s in ("".join(bits) for bits in itertools.product("XY", repeat=n)):
            assert m.coefficient(s) == f_coefficient(n, y_weight(s))


def test_xy_only_everywhere():
    for n in range(1, 9):
        forms = [build_recursive(n)] + ([canonical_operator(n)] if n >= 2 else [])
        for form in forms:
            for op in (form.m, form.m_prime):
                assert all(set(s) <= {"X", "Y"} for s in op.terms)


def test_pair_rejects_z():
    bad = WeightedPauliSum(2, {"XZ": 1})
    with pytest.raises(ValueError):
        MerminPair(bad, bad, 2, 1)


def test_mutated_table_detected():
    table = [list(row) for row in F_TABLE]
    table[1][5] = -table[1][5] if table[1][5] else 1
    with pytest.raises(TableInconsistencyError):
        for n in range(2, 9):
            recursion_scale(n, table)


def test_analytic_examples():
    m, mp = analytic_expectation(AnalyticSpec(3, math.pi / 2))
    assert m == pytest.approx(4, abs=1e-12) and mp == pytest.approx(0, abs=1e-12)
    m, mp = analytic_expectation(AnalyticSpec(2, math.pi / 4))
    assert m == pytest.approx(2 * SQ2, abs=1e-12) and mp == pytest.approx(0, abs=1e-12)
    m, mp = analytic_expectation(AnalyticSpec(5, 0.0))
    assert m == pytest.approx(-16, abs=1e-12) and mp == pytest.approx(0, abs=1e-12)


def test_analytic_spec_validation():
    with pytest.raises(ValueError):
        AnalyticSpec(1, 0.0)
    assert AnalyticSpec(4, 0.0).parity == "even"


def test_closed_form_matches_statevector(pairs):
    for n in range(2, 8):
        for k in range(32):
            phi = 2 * math.pi * k / 32
            st = ghz_like_state(n, phi)
            am, amp = analytic_expectation(AnalyticSpec(n, phi))
            assert abs(expectation_exact(st, pairs[n].m) - am) <= 1e-9
            assert abs(expectation_exact(st, pairs[n].m_prime) - amp) <= 1e-9


def test_lr_bound_and_normalize():
    assert [lr_bound(n) for n in (2, 3, 7)] == [2, 2, 8]
    assert normalize(4, 3) == 2
    assert normalize(0, 5) == 0
    assert normalize(2 * SQ2, 2) == pytest.approx(SQ2)


def test_phi_max():
    assert phi_max(2) == pytest.approx(math.pi / 4)
    assert phi_max(5) == pytest.approx(math.pi)
    assert phi_max(7) == pytest.approx(3 * math.pi / 2)
    assert quantum_max_normalized(3) == pytest.approx(2)


@pytest.mark.parametrize("n,expected", [(2, 2), (3, 2), (4, 4), (5, 4)])
def test_lhv_bruteforce(n, expected):
    assert lhv_max_bruteforce(canonical_operator(n)) == expected
    assert lhv_max_bruteforce(canonical_operator(n), backend="numpy") == expected


def test_lhv_guard():
    with pytest.raises(ValueError):
        lhv_max_bruteforce(canonical_operator(7))


def test_sum_rule():
    for n in range(2, 8):
        for phi in np.linspace(0, 2 * math.pi, 32, endpoint=False):
            m, mp = analytic_expectation(AnalyticSpec(n, float(phi)))
            assert normalize(m, n) ** 2 + normalize(mp, n) ** 2 == pytest.approx(2 ** (n - 1), abs=1e-9)
