from fractions import Fraction as F
from itertools import product

import pytest
import numpy as np
from hypothesis import given, strategies as st

from alignment_games.model import (
    Arc, CostProfile, Domain, FixedCardinality, FixedLength, FreeLength, GameSpec,
    IndependentSubsets, MixedStrategy, PowerSet, RateProfile, SubsetFamily, UniformStartArc,
    arc_payoff_array, arc_symmetric_difference, as_rational, circle_arc, complement_family, complement_strategy,
    enumerate_family, from_mask, full_mask, interval_arc_payoff, mixed_payoff, subset_payoff,
    to_mask,
)

costs_st = st.lists(st.integers(1, 9), min_size=1, max_size=6)


def test_as_rational_reads_decimals_exactly():
    assert as_rational(0.1) == F(1, 10)
    assert as_rational("0.4") == F(2, 5)
    assert as_rational("2/5") == F(2, 5)
    with pytest.raises(TypeError):
        as_rational(True)
    with pytest.raises(ValueError):
        as_rational(float("nan"))


def test_masks_round_trip():
    assert to_mask([1, 3]) == 0b101
    assert from_mask(0b101) == (1, 3)
    with pytest.raises(ValueError):
        to_mask([0])


def test_subset_payoff_examples():
    prof = CostProfile((2, 1), (1, 1))
    assert subset_payoff(prof, [2], [1]) == 3
    assert subset_payoff(prof, 0b11, 0b11) == 0
    unit = CostProfile.symmetric((1, 1, 1))
    assert subset_payoff(unit, [1, 2], [2, 3]) == 2
    with pytest.raises(ValueError):
        subset_payoff(prof, [3], [])


def test_interval_arc_payoff_examples():
    assert interval_arc_payoff(F(2, 5), 0, F(3, 10)) == F(3, 5)
    assert interval_arc_payoff(F(2, 5), 0, F(3, 5)) == F(4, 5)
    assert interval_arc_payoff(F(1, 3), F(1, 5), F(1, 5)) == 0
    with pytest.raises(ValueError):
        interval_arc_payoff(F(1, 2), F(3, 5), 0)


def test_arc_symmetric_difference_examples():
    half = F(1, 2)
    assert arc_symmetric_difference(Domain.CIRCLE, 1, 1, Arc(0, half), Arc(F(1, 4), half)) == half
    wrapped = circle_arc(F(9, 10), F(1, 5))
    assert arc_symmetric_difference(Domain.CIRCLE, 2, 3, wrapped, Arc(0, F(1, 5))) == half
    assert arc_symmetric_difference(Domain.INTERVAL, 1, 1, Arc(0, F(2, 5)),
                                    Arc(F(3, 10), F(2, 5))) == F(3, 5)
    with pytest.raises(ValueError):
        arc_symmetric_difference(Domain.INTERVAL, 1, 1, Arc(F(4, 5), F(2, 5)), Arc(0, 0))


def test_mixed_payoff_examples():
    circle = GameSpec.circle(hider=FixedLength(F(1, 2)), searcher=FixedLength(F(1, 2)))
    assert mixed_payoff(circle, UniformStartArc(F(1, 2)), UniformStartArc(F(1, 2))) == F(1, 2)
    spec = GameSpec.finite((1, 1))
    assert mixed_payoff(spec, MixedStrategy.uniform([0b01, 0b10]), MixedStrategy.point(0)) == 1
    assert mixed_payoff(spec, 0b01, 0b10) == subset_payoff(spec.profile, 0b01, 0b10)


def test_complement_examples():
    h = MixedStrategy(((0b001, F(1, 2)), (0b010, F(1, 2))))
    assert complement_strategy(h, 3).atoms == ((0b110, F(1, 2)), (0b101, F(1, 2)))
    assert complement_strategy(MixedStrategy.point(0), 2).atoms == ((0b11, 1),)
    assert complement_family(FixedCardinality(1), 4) == FixedCardinality(3)


def test_strategy_validation():
    with pytest.raises(ValueError):
        MixedStrategy(((0, F(1, 2)),))
    with pytest.raises(ValueError):
        MixedStrategy(((0, F(3, 2)), (1, F(-1, 2))))
    with pytest.raises(ValueError):
        MixedStrategy(((0, F(1, 2)), (Arc(0, 0), F(1, 2))))
    assert MixedStrategy.uniform([1, 1, 2]).atoms == ((1, F(2, 3)), (2, F(1, 3)))


def test_spec_validation():
    with pytest.raises(ValueError):
        GameSpec.finite((1,) * 25)
    with pytest.raises(ValueError):
        GameSpec.finite((1, 2), hider=FixedCardinality(3))
    with pytest.raises(ValueError):
        GameSpec(Domain.CIRCLE, PowerSet(), FreeLength(), RateProfile(1, 1))
    with pytest.raises(ValueError):
        RateProfile(0, 1)
    with pytest.raises(ValueError):
        FixedLength(F(3, 2))


def test_canonical_enumeration_order():
    assert enumerate_family(FixedCardinality(2), 3) == [0b011, 0b101, 0b110]
    assert enumerate_family(PowerSet(), 2) == [0, 1, 2, 3]
    assert enumerate_family(SubsetFamily((3, 1)), 2) == [3, 1]


def test_independent_subsets_expand_to_product():
    s = IndependentSubsets((F(1, 3), F(1, 2)))
    atoms = dict(s.atoms().atoms)
    assert atoms == {0: F(1, 3), 1: F(1, 6), 2: F(1, 3), 3: F(1, 6)}


# --- invariants ---------------------------------------------------------------

@given(costs_st, st.data())
def test_symmetric_payoff_is_symmetric(costs, data):
    prof = CostProfile.symmetric(costs)
    n = len(costs)
    H = data.draw(st.integers(0, full_mask(n)))
    S = data.draw(st.integers(0, full_mask(n)))
    assert subset_payoff(prof, H, S) == subset_payoff(prof, S, H)


@pytest.mark.parametrize("n", range(1, 9))
def test_complement_identity_exhaustive(n):
    # c(A^c sym-diff B) = c([n]) - c(A sym-diff B) for every pair of subsets
    prof = CostProfile.symmetric(tuple(range(1, n + 1)))
    full = full_mask(n)
    total = prof.total_cost
    for A in range(full + 1):
        for B in range(full + 1):
            assert prof.cost((full ^ A) ^ B) == total - prof.cost(A ^ B)


def _strategy(data, n):
    k = data.draw(st.integers(1, min(4, 1 << n)))
    masks = data.draw(st.lists(st.integers(0, full_mask(n)), min_size=k, max_size=k, unique=True))
    w = data.draw(st.lists(st.integers(1, 7), min_size=k, max_size=k))
    return MixedStrategy(tuple((m, F(x, sum(w))) for m, x in zip(masks, w)))


@given(st.lists(st.integers(0, 9), min_size=1, max_size=5), st.data())
def test_mixed_payoff_is_bilinear(costs, data):
    n = len(costs)
    pens = data.draw(st.lists(st.integers(0, 9), min_size=n, max_size=n))
    spec = GameSpec.finite(costs, pens)
    h, s = _strategy(data, n), _strategy(data, n)
    brute = sum(p * q * subset_payoff(spec.profile, a, b) for a, p in h.atoms for b, q in s.atoms)
    assert mixed_payoff(spec, h, s) == brute
    h2 = _strategy(data, n)
    t = F(data.draw(st.integers(0, 5)), 5)
    mix = MixedStrategy.from_weights([(m, t * p) for m, p in h.atoms] +
                                     [(m, (1 - t) * p) for m, p in h2.atoms])
    assert mixed_payoff(spec, mix, s) == t * mixed_payoff(spec, h, s) + (1 - t) * mixed_payoff(spec, h2, s)


@given(st.integers(1, 6), st.data())
def test_complement_is_probability_preserving_involution(n, data):
    h = _strategy(data, n)
    c = complement_strategy(h, n)
    assert sum(p for _, p in c.atoms) == 1
    assert complement_strategy(c, n) == h
    ind = IndependentSubsets(tuple(F(data.draw(st.integers(0, 4)), 4) for _ in range(n)))
    assert complement_strategy(complement_strategy(ind, n), n) == ind


fracs = st.fractions(min_value=0, max_value=1, max_denominator=40)


@given(fracs, fracs, fracs, st.integers(1, 5), st.integers(1, 5))
def test_uniform_versus_arc_matches_direct_integration(L, start, length, c, pi):
    # expectation over a uniform start, by a fine midpoint sum over the start
    spec = GameSpec.circle(c, pi, FixedLength(L), FixedLength(length))
    arc = Arc(start % 1, length)
    exact = mixed_payoff(spec, UniformStartArc(L), arc)
    u = (np.arange(20000) + 0.5) / 20000
    approx = arc_payoff_array(Domain.CIRCLE, c, pi, u, float(L), float(arc.start), float(length)).mean()
    assert abs(float(exact) - approx) < 1e-3
    # and the same expectation with the roles of the players exchanged
    flipped = mixed_payoff(GameSpec.circle(pi, c, FixedLength(length), FixedLength(L)),
                           arc, UniformStartArc(L))
    assert flipped == exact


@given(fracs, fracs, st.integers(1, 5), st.integers(1, 5))
def test_uniform_pair_formula_agrees_with_arc_integration(a, b, c, pi):
    spec = GameSpec.circle(c, pi, FixedLength(a), FixedLength(b))
    direct = mixed_payoff(spec, UniformStartArc(a), MixedStrategy.point(Arc(F(0), b)))
    assert direct == mixed_payoff(spec, UniformStartArc(a), UniformStartArc(b))
    assert direct == b * (1 - a) * c + a * (1 - b) * pi
