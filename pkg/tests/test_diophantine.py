
import pytest
from hypothesis import given, settings, strategies as st

from arnold_cat.diophantine import (PUBLISHED_WEIGHTS, WeightCandidate, check_divisibility,
                                    coupling_formulas, evaluate_formula, expand_factored,
                                    format_polynomial, minimal_weights, n3_general_ansatz_solutions)
from arnold_cat.errors import DivisibilityError, ValidationError
from arnold_cat.potential import ShiftParameters, build_potential


def test_expand_n3():
    c = expand_factored(3, (3, 3))
    assert c[1] == {(1, 0, 0): -3, (0, 1, 0): -6, (0, 0, 1): -3}


def test_expand_n2_n1():
    c = expand_factored(2, (2,))
    assert c[1] == {(1, 0): -2, (0, 1): -2}
    assert c[2] == {(2, 0): 1, (1, 1): 2}
    assert expand_factored(1, ()) == [{(0,): 1}, {(1,): -1}]


def test_witness_n3():
    cand = check_divisibility(WeightCandidate(3, (1, 3)))
    assert not cand.valid
    w = cand.witness
    # xi^2 coefficient is -3 alpha^2 - 2 beta^2 - 3 gamma^2
    assert (w.m, w.monomial, w.coefficient, w.divisor) == (1, (0, 1, 0), -2, 3)
    assert "beta^2" in str(w)


@pytest.mark.parametrize("N", sorted(set(PUBLISHED_WEIGHTS) - {1}))
def test_published_tuples_valid(N):
    assert check_divisibility(WeightCandidate(N, PUBLISHED_WEIGHTS[N])).valid


@pytest.mark.parametrize("N,expect", [(2, (2,)), (3, (3, 3)), (4, (4, 6, 12))])
def test_minimal_small(N, expect):
    assert minimal_weights(N).weights == expect


def test_minimal_n8_and_determinism():
    a = minimal_weights(8)
    assert a.weights == (8, 28, 56, 70, 280, 140, 280)
    assert minimal_weights(8) == a


def test_minimal_bound_exhausted():
    with pytest.raises(ValidationError, match="no valid tuple"):
        minimal_weights(4, bound=5)
    with pytest.raises(ValidationError):
        minimal_weights(11)


def test_formulas():
    f5 = coupling_formulas(5, (5, 10, 10, 10))
    assert format_polynomial(f5[0]) == "alpha^2 + 4*beta^2 + 6*gamma^2 + 4*delta^2 + 2*epsilon^2"
    f7 = coupling_formulas(7, PUBLISHED_WEIGHTS[7])
    assert format_polynomial(f7[0]) == ("alpha^2 + 6*beta^2 + 15*gamma^2 + 60*delta^2 "
                                        "+ 15*epsilon^2 + 30*zeta^2 + 15*eta^2")
    f3 = coupling_formulas(3, (3, 3))
    assert f3[2] == {(3, 0, 0): 1, (2, 1, 0): 6, (2, 0, 1): 3, (1, 2, 0): 9, (1, 1, 1): 9}
    with pytest.raises(DivisibilityError):
        coupling_formulas(3, (1, 3))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.randoms(use_true_random=False))
def test_formulas_match_build(N, rnd):
    squares = [rnd.uniform(0.1, 3.0) for _ in range(N)]
    pot = build_potential(ShiftParameters.from_squares(squares))
    for poly, c in zip(coupling_formulas(N, PUBLISHED_WEIGHTS[N]), pot.couplings):
        assert evaluate_formula(poly, squares) == pytest.approx(c, rel=1e-12)


def test_n3_uniqueness():
    sols = n3_general_ansatz_solutions(max_sum=6, max_r=6)
    assert {(p, q) for p, q, _ in sols} == {(3, 3)}
