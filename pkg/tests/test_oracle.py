import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alignment_games import lp
from alignment_games.continuous import interval_fixed_value, solve_continuous
from alignment_games.discrete import hider_cardinality_value, solve_finite
from alignment_games.model import (
    FixedCardinality, FixedLength, GameSpec, MixedStrategy, Side, Solution, SubsetFamily,
    complement_family, complement_strategy, full_mask,
)
from alignment_games.oracle import (
    MAX_ENTRIES_ENV, OracleLimitError, PayoffMatrix, best_response, build_payoff_matrix,
    discretize_continuous, oracle_solution, solve_matrix_game, verify_solution,
)

from conftest import random_costs


def _matrix(rows):
    return PayoffMatrix.from_entries(range(len(rows)), range(len(rows[0])), rows)


# --- payoff matrices ------------------------------------------------------------

def test_build_matrix_examples():
    m = build_payoff_matrix(GameSpec.finite((2, 1), (1, 1)))
    assert m.shape == (4, 4)
    assert [m.entry(0, j) for j in range(4)] == [0, 2, 1, 3]
    m = build_payoff_matrix(GameSpec.finite((1, 1), hider=FixedCardinality(1),
                                            searcher=FixedCardinality(1)))
    assert m.entries.tolist() == [[0, 2], [2, 0]]
    m = build_payoff_matrix(GameSpec.finite((1, 2), hider=SubsetFamily((0,)), searcher=SubsetFamily((0,))))
    assert m.entries.tolist() == [[0]]


def test_matrix_entries_are_nonnegative_and_rational():
    m = build_payoff_matrix(GameSpec.finite((F(1, 3), F(2, 7)), (F(5, 2), 0)))
    assert m.denominator == 42
    assert (m.numerators >= 0).all()
    assert m.entry(1, 0) == F(5, 2)


def test_size_limit(monkeypatch):
    with pytest.raises(OracleLimitError):
        build_payoff_matrix(GameSpec.finite((1,) * 11))
    monkeypatch.setenv(MAX_ENTRIES_ENV, "15")
    with pytest.raises(OracleLimitError):
        build_payoff_matrix(GameSpec.finite((1, 1)))
    with pytest.raises(ValueError):
        build_payoff_matrix(GameSpec.circle())


# --- matrix-game solver ---------------------------------------------------------

def test_solve_matrix_examples():
    value, x, y = solve_matrix_game(_matrix([[0, 2], [2, 0]]))
    assert value == 1 and x == y == (F(1, 2), F(1, 2))
    assert solve_matrix_game(build_payoff_matrix(GameSpec.finite((2, 1), (1, 1))))[0] == F(7, 6)
    spec = GameSpec.finite((1, 1, 1), hider=FixedCardinality(1), searcher=FixedCardinality(1))
    assert solve_matrix_game(build_payoff_matrix(spec))[0] == F(4, 3)


def test_solve_matrix_handles_negative_and_degenerate_entries():
    assert solve_matrix_game(_matrix([[-3, -3], [-3, -3]]))[0] == -3
    assert lp.solve_exact([[1, -1], [-1, 1]]).value == 0
    assert lp.solve_exact([[5]]).value == 5
    assert solve_matrix_game(_matrix([[0, 0, 0], [0, 0, 0]]))[0] == 0


matrices = st.integers(1, 6).flatmap(lambda m: st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


@given(matrices)
def test_exact_duality(rows):
    A = np.array(rows, dtype=object)
    for strategy in ("pivot", "certify"):
        sol = lp.solve_exact(rows, strategy=strategy)
        x = np.array(sol.row_mix, dtype=object)
        y = np.array(sol.col_mix, dtype=object)
        assert sum(x) == 1 and sum(y) == 1 and min(x) >= 0 and min(y) >= 0
        assert min(x.dot(A)) == sol.value == max(A.dot(y))


@given(matrices)
def test_float_mode_agrees(rows):
    exact = lp.solve_exact(rows).value
    fl = lp.solve_float(rows)
    assert abs(fl.value - float(exact)) < 1e-9
    A = np.array(rows, dtype=float)
    assert min(np.array(fl.row_mix) @ A) >= float(exact) - 1e-9
    value, _, _ = solve_matrix_game(_matrix(rows), mode="float")
    assert abs(value - float(exact)) < 1e-9


def test_certified_path_matches_pivoting():
    rng = np.random.default_rng(5)
    rows = rng.integers(0, 50, size=(80, 60)).tolist()
    assert lp.solve_exact(rows, strategy="certify").value == lp.solve_exact(rows, strategy="pivot").value


def test_certified_path_is_a_valid_certificate():
    rng = np.random.default_rng(6)
    rows = rng.integers(-20, 40, size=(120, 100)).tolist()
    sol = lp.solve_exact(rows, strategy="certify")
    A = np.array(rows, dtype=object)
    x = np.array(sol.row_mix, dtype=object)
    y = np.array(sol.col_mix, dtype=object)
    assert sum(x) == sum(y) == 1
    assert min(x.dot(A)) == sol.value == max(A.dot(y))


# --- best responses -------------------------------------------------------------

def test_best_response_to_point_mass_is_complement():
    spec = GameSpec.finite((3, 1, 2))
    for S in range(8):
        H, pay = best_response(spec, MixedStrategy.point(S), Side.HIDER)
        assert H == 7 ^ S and pay == 6


def test_best_response_ties_take_canonical_order():
    spec = GameSpec.finite((1, 1), hider=FixedCardinality(1), searcher=FixedCardinality(1))
    assert best_response(spec, MixedStrategy.uniform([1, 2]), Side.SEARCHER) == (1, 1)


def test_best_response_respects_limit(monkeypatch):
    monkeypatch.setenv(MAX_ENTRIES_ENV, "3")
    with pytest.raises(OracleLimitError):
        best_response(GameSpec.finite((1, 1)), MixedStrategy.point(0), Side.HIDER)


# --- verification ---------------------------------------------------------------

def test_perturbed_solution_fails():
    spec = GameSpec.finite((4, 3, 2, 1), hider=FixedCardinality(2))
    sol = solve_finite(spec)
    atoms = list(sol.searcher.atoms)
    mask, p = atoms[0]
    atoms[0] = (mask, p + F(1, 10))
    bumped = MixedStrategy(tuple((m, q / F(11, 10)) for m, q in atoms))
    rep = verify_solution(spec, Solution(sol.hider, bumped, sol.value, "perturbed"))
    assert not rep.passed and rep.searcher_gap > 0


def test_wrong_value_fails_against_oracle():
    spec = GameSpec.finite((2, 1), (1, 1))
    sol = solve_finite(spec)
    rep = verify_solution(spec, Solution(sol.hider, sol.searcher, sol.value + F(1, 100), "off"))
    assert not rep.passed and rep.oracle_value == F(7, 6)


def test_verify_rejects_atoms_outside_family():
    spec = GameSpec.finite((1, 1), hider=FixedCardinality(1))
    bad = Solution(MixedStrategy.point(3), MixedStrategy.point(0), 2, "bad")
    with pytest.raises(ValueError):
        verify_solution(spec, bad)


def test_oracle_self_consistency():
    rng = random.Random(11)
    for _ in range(15):
        n = rng.randint(1, 4)
        costs, pens = random_costs(rng, n, 0, 5), random_costs(rng, n, 0, 5)
        fams = [SubsetFamily(tuple(rng.sample(range(1 << n), rng.randint(1, 1 << n)))) for _ in range(2)]
        spec = GameSpec.finite(costs, pens, hider=fams[0], searcher=fams[1])
        rep = verify_solution(spec, oracle_solution(spec), tolerance=0)
        assert rep.passed and rep.hider_gap == rep.searcher_gap == 0


# --- continuous discretisation --------------------------------------------------

def test_discretize_examples():
    spec = GameSpec.interval(hider=FixedLength(F(2, 5)), searcher=FixedLength(F(2, 5)))
    m = discretize_continuous(spec, F(1, 100))
    assert m.shape == (61, 61)
    assert abs(solve_matrix_game(m)[0] - F(7, 15)) <= F(1, 50)
    spec = GameSpec.circle(hider=FixedLength(F(1, 2)), searcher=FixedLength(F(1, 2)))
    assert abs(solve_matrix_game(discretize_continuous(spec, F(1, 50)))[0] - F(1, 2)) <= F(1, 50)
    full = GameSpec.interval(hider=FixedLength(1), searcher=FixedLength(1))
    m = discretize_continuous(full, F(1, 10))
    assert m.shape == (1, 1) and solve_matrix_game(m)[0] == 0


def test_discretize_rejects_bad_input():
    with pytest.raises(ValueError):
        discretize_continuous(GameSpec.circle(), F(1, 10))
    spec = GameSpec.interval(hider=FixedLength(F(1, 3)), searcher=FixedLength(F(1, 3)))
    with pytest.raises(ValueError):
        discretize_continuous(spec, F(3, 10))
    with pytest.raises(ValueError):
        discretize_continuous(GameSpec.finite((1,)), F(1, 2))


def test_discretize_adds_right_end_start():
    spec = GameSpec.interval(hider=FixedLength(F(1, 3)), searcher=FixedLength(F(1, 3)))
    m = discretize_continuous(spec, F(1, 10))
    assert m.row_labels[-1].start == F(2, 3)


@pytest.mark.parametrize("alpha", [F(3, 10), F(2, 5), F(9, 20)])
def test_monotone_grid_refinement(alpha):
    spec = GameSpec.interval(hider=FixedLength(alpha), searcher=FixedLength(alpha))
    v = interval_fixed_value(alpha)
    coarse = abs(solve_matrix_game(discretize_continuous(spec, F(1, 50)))[0] - v)
    fine = abs(solve_matrix_game(discretize_continuous(spec, F(1, 200)))[0] - v)
    assert fine <= coarse


def test_interval_unequal_lengths_are_oracle_only():
    spec = GameSpec.interval(hider=FixedLength(F(2, 5)), searcher=FixedLength(F(3, 10)))
    value, x, y = solve_matrix_game(discretize_continuous(spec, F(1, 20)))
    assert 0 < value < 1


def test_continuous_verification_detects_bad_strategy():
    spec = GameSpec.interval(hider=FixedLength(F(2, 5)), searcher=FixedLength(F(2, 5)))
    sol = solve_continuous(spec)
    lazy = Solution(MixedStrategy.point(sol.hider.atoms[0][0]), sol.searcher, sol.value, "lazy")
    rep = verify_solution(spec, lazy)
    assert not rep.passed and rep.hider_gap > 0.1


# --- complement symmetry and sandwich bound ------------------------------------------

def _random_family(rng, n):
    size = rng.randint(1, min(10, 1 << n))
    return SubsetFamily(tuple(rng.sample(range(1 << n), size)))


def test_complement_symmetry_on_random_games():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randint(1, 5)
        costs = random_costs(rng, n, 1, 9)
        H, S = _random_family(rng, n), _random_family(rng, n)
        base = oracle_solution(GameSpec.finite(costs, hider=H, searcher=S))
        dual = GameSpec.finite(costs, hider=complement_family(H, n), searcher=complement_family(S, n))
        mapped = Solution(complement_strategy(base.hider, n), complement_strategy(base.searcher, n),
                          base.value, "complement")
        assert verify_solution(dual, mapped).passed
        swapped = GameSpec.finite(costs, hider=complement_family(S, n), searcher=H)
        flipped = Solution(complement_strategy(base.searcher, n), base.hider,
                           sum(costs) - base.value, "swap")
        assert verify_solution(swapped, flipped).passed


@pytest.mark.parametrize("n", range(2, 6))
def test_sandwich_bound(n):
    rng = random.Random(n)
    costs = random_costs(rng, n, 1, 9)
    for k in range(1, n):
        spec = GameSpec.finite(costs, hider=FixedCardinality(k), searcher=FixedCardinality(k))
        value = solve_matrix_game(build_payoff_matrix(spec))[0]
        vk = hider_cardinality_value(costs, k)
        assert vk <= value <= sum(costs) - vk
