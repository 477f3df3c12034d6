"""Closed-form solutions of the finite alignment games.

The cardinality and single-pick solutions are stated for costs sorted in
decreasing order.  Inputs are sorted with a stable sort (ties keep their
original order), the formulas are applied in sorted coordinates, and the
resulting strategies are mapped back to the caller's labels.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import (
    CostProfile,
    Domain,
    FixedCardinality,
    GameSpec,
    IndependentSubsets,
    MixedStrategy,
    NoClosedFormError,
    PowerSet,
    Solution,
    as_rational,
    complement_strategy,
)


@dataclass(frozen=True)
class SingletonCaseData:
    """Threshold data of the game where both players pick one location.

    ``hider_probs`` and ``searcher_probs`` map 1-based *sorted* positions to
    probabilities; ``order[t]`` is the original 1-based location at sorted
    position ``t + 1``.  ``M`` and ``case`` are ``None`` for ``n == 2``.
    """

    M: Optional[int]
    case: Optional[int]
    hider_probs: dict
    searcher_probs: dict
    value: Fraction
    order: tuple[int, ...]


def _positive_costs(costs: Sequence) -> list[Fraction]:
    costs = [as_rational(c) for c in costs]
    if not costs:
        raise ValueError("need at least one location")
    if any(c <= 0 for c in costs):
        raise ValueError("this closed form divides by costs, so all must be positive")
    return costs


def _descending_order(costs: Sequence[Fraction]) -> list[int]:
    """0-based indices sorted by decreasing cost, ties by index."""
    return sorted(range(len(costs)), key=lambda i: -costs[i])


def _prefix_mask(order: Sequence[int], j: int) -> int:
    """Original-label mask of the ``j`` most expensive locations."""
    m = 0
    for i in order[:j]:
        m |= 1 << i
    return m


# ---------------------------------------------------------------------------
# both players choose any subset

def ratio_product(ratios: Sequence[Fraction], locations) -> Fraction:
    """Sum over subsets B of ``locations`` of prod_{j in B} ratio_j, via prod (1 + ratio_j)."""
    out = Fraction(1)
    for j in locations:
        out *= 1 + ratios[j]
    return out


def solve_powerset(profile: CostProfile) -> Solution:
    """Both players choose any subset; costs and penalties may differ.

    The Hider includes location ``j`` independently with probability
    ``r_j / (1 + r_j)`` where ``r_j = c_j / pi_j``, giving each subset weight
    proportional to the product of its ratios.  The Searcher plays the
    complement of the Hider's distribution.  Strategies are returned in
    independent-inclusion form; use :meth:`IndependentSubsets.atoms` for the
    explicit ``2**n``-atom list.
    """
    if any(p == 0 for p in profile.penalties):
        raise ValueError("every penalty must be positive for the cost/penalty ratios to exist")
    ratios = [c / p for c, p in zip(profile.costs, profile.penalties)]
    n = profile.n
    everything = ratio_product(ratios, range(n))
    value = sum((ratio_product(ratios, (i for i in range(n) if i != j)) / everything * c
                 for j, c in enumerate(profile.costs)), Fraction(0))
    inclusion = tuple(r / (1 + r) for r in ratios)
    hider = IndependentSubsets(inclusion)
    searcher = IndependentSubsets(tuple(1 - q for q in inclusion))
    return Solution(hider, searcher, value, "powerset-ratio-product")


# ---------------------------------------------------------------------------
# two locations, Hider picks one, Searcher picks any subset

def solve_two_by_two_k1(profile: CostProfile) -> Solution:
    """Two locations, the Hider hides in exactly one, the Searcher picks any subset.

    Locations are relabelled so that ``c_1 >= c_2``.  The scenario is chosen
    by the signs of ``pi_1 pi_2 - c_1 c_2`` and ``pi_1 - pi_2``; on ties the
    lowest-numbered scenario wins.  Scenario (iii) mirrors (i) across the two
    locations.  In scenario (iv) the Searcher mixes ``{2}`` and ``{1, 2}``
    exactly as in (ii); mirroring (ii) instead would give a negative weight
    whenever ``c_1 > c_2``.
    """
    if profile.n != 2:
        raise ValueError("this solution needs exactly two locations")
    entries = profile.costs + profile.penalties
    if any(x <= 0 for x in entries):
        raise ValueError("costs and penalties must be positive")
    swap = profile.costs[0] < profile.costs[1]
    (c1, c2), (p1, p2) = profile.costs, profile.penalties
    if swap:
        c1, c2, p1, p2 = c2, c1, p2, p1

    def lab(*locs):
        # sorted label -> caller's label
        m = 0
        for loc in locs:
            m |= 1 << ((2 - loc) if swap else (loc - 1))
        return m

    det = p1 * p2 - c1 * c2
    if det <= 0 and p1 <= p2:
        scenario = "i"
        q = p2 / (c2 + p2)
        p = (c2 + p1) / (c2 + p2)
        hider = [(lab(1), q), (lab(2), 1 - q)]
        searcher = [(lab(), p), (lab(2), 1 - p)]
        value = (c2 + p1) * p2 / (c2 + p2)
    elif det >= 0 and p1 <= p2:
        scenario = "ii"
        hider, searcher, value = _scenario_two(c1, c2, p1, lab)
    elif det <= 0:
        scenario = "iii"
        q = p1 / (c1 + p1)
        p = (c1 + p2) / (c1 + p1)
        hider = [(lab(2), q), (lab(1), 1 - q)]
        searcher = [(lab(), p), (lab(1), 1 - p)]
        value = (c1 + p2) * p1 / (c1 + p1)
    else:
        scenario = "iv"
        hider, searcher, value = _scenario_two(c1, c2, p1, lab)
    return Solution(MixedStrategy.from_weights(hider), MixedStrategy.from_weights(searcher),
                    value, f"two-locations-hide-one scenario ({scenario})")


def _scenario_two(c1, c2, p1, lab):
    q = c1 / (p1 + c1)
    p = (c1 - c2) / (p1 + c1)
    hider = [(lab(1), q), (lab(2), 1 - q)]
    searcher = [(lab(2), p), (lab(1, 2), 1 - p)]
    return hider, searcher, (c2 + p1) * c1 / (p1 + c1)


# ---------------------------------------------------------------------------
# equal costs and penalties, one side restricted to k locations

def hider_cardinality_value(costs: Sequence, k: int) -> Fraction:
    """Value when the Hider picks exactly ``k`` locations and the Searcher any subset."""
    costs = sorted((as_rational(c) for c in costs), reverse=True)
    n = len(costs)
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    m = k if 2 * k <= n else n - k
    return sum(costs[:2 * m], Fraction(0)) / 2


def solve_hider_cardinality(costs: Sequence, k: int) -> Solution:
    """Hider picks exactly ``k`` locations, Searcher any subset, ``c = pi``.

    For ``k <= n/2`` the Hider splits the ``2k`` most expensive locations into
    the top ``k`` and the next ``k`` and picks either half with probability
    1/2.  The Searcher picks the empty set or a prefix of the ``2k - 1`` most
    expensive locations with weights that telescope to one.  Larger ``k`` is
    reduced to ``n - k`` by complementing both strategies.
    """
    costs = _positive_costs(costs)
    n = len(costs)
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= n:
        raise ValueError(f"k={k!r} outside [0, {n}]")
    k = int(k)
    if k == 0:
        empty = MixedStrategy.point(0)
        return Solution(empty, empty, Fraction(0), "hider-cardinality k=0")
    if 2 * k > n:
        base = solve_hider_cardinality(costs, n - k)
        return Solution(complement_strategy(base.hider, n), complement_strategy(base.searcher, n),
                        base.value, f"hider-cardinality complement of k={n - k}")

    order = _descending_order(costs)
    c = [costs[i] for i in order]  # c[0] >= c[1] >= ...
    top = _prefix_mask(order, k)
    hider = MixedStrategy(((top, Fraction(1, 2)), (_prefix_mask(order, 2 * k) ^ top, Fraction(1, 2))))

    pivot = c[2 * k - 1]
    weights = [(0, Fraction(1, 2) + pivot / (2 * c[0]))]
    for j in range(1, 2 * k):
        weights.append((_prefix_mask(order, j), pivot / (2 * c[j]) - pivot / (2 * c[j - 1])))
    searcher = MixedStrategy(tuple(weights))
    value = sum(c[:2 * k], Fraction(0)) / 2
    return Solution(hider, searcher, value, f"hider-cardinality k={k}")


def solve_searcher_cardinality(costs: Sequence, k: int) -> Solution:
    """Searcher picks exactly ``k`` locations, Hider any subset, ``c = pi``.

    The Searcher borrows the Hider's strategy from the game where the Hider
    is the restricted side, the Hider plays the complement of that game's
    Searcher strategy, and the value is the total cost minus that game's value.
    """
    base = solve_hider_cardinality(costs, k)
    n = len(costs)
    total = sum((as_rational(c) for c in costs), Fraction(0))
    return Solution(complement_strategy(base.searcher, n), base.hider, total - base.value,
                    f"searcher-cardinality k={k}")


# ---------------------------------------------------------------------------
# equal costs and penalties, both players pick a single location

def singleton_threshold(sorted_costs: Sequence[Fraction]) -> int:
    """Largest ``M`` in ``2..n-1`` with ``sum_{i<=M} 1/c_i >= (M - 2)/c_n``."""
    c = sorted_costs
    n = len(c)
    inv = [1 / x for x in c]
    for M in range(n - 1, 1, -1):
        if sum(inv[:M]) >= Fraction(M - 2) / c[-1]:
            return M
    raise AssertionError("the threshold condition always holds at M = 2")


def solve_singleton_pair(costs: Sequence) -> tuple[Solution, SingletonCaseData]:
    """Both players pick exactly one location, ``c = pi``.

    Payoff is ``c_i + c_j`` when the picks differ and 0 when they match.
    With three or more locations the solution depends on the threshold ``M``
    from :func:`singleton_threshold`: if ``M = n - 1`` both players use the
    same interior mix over all locations (case 1), otherwise the Hider mixes
    the top ``M + 1`` locations and the Searcher the top ``M`` plus the
    cheapest one (case 2).
    """
    costs = _positive_costs(costs)
    n = len(costs)
    if n < 2:
        raise ValueError("need at least two locations")
    order = _descending_order(costs)
    c = [costs[i] for i in order]
    labels = tuple(i + 1 for i in order)
    half = Fraction(1, 2)

    if n == 2:
        probs = {1: half, 2: half}
        value = (c[0] + c[1]) / 2
        sol = Solution(_singleton_strategy(probs, order), _singleton_strategy(probs, order),
                       value, "single-pick n=2 (matching pennies)")
        return sol, SingletonCaseData(None, None, probs, dict(probs), value, labels)

    M = singleton_threshold(c)
    if M == n - 1:
        inv_sum = sum(1 / x for x in c)
        probs = {j + 1: half - Fraction(n - 2) / (2 * c[j] * inv_sum) for j in range(n)}
        value = sum(c) / 2 - Fraction((n - 2) ** 2) / (2 * inv_sum)
        sol = Solution(_singleton_strategy(probs, order), _singleton_strategy(probs, order),
                       value, f"single-pick case 1 M={M}")
        return sol, SingletonCaseData(M, 1, probs, dict(probs), value, labels)

    cn, cm1 = c[-1], c[M]  # c_n and c_{M+1}
    hider = {j + 1: half - cn / (2 * c[j]) for j in range(M)}
    hider[M + 1] = 1 - sum(hider.values())
    searcher = {j + 1: half - cm1 / (2 * c[j]) for j in range(M)}
    searcher[n] = 1 - sum(searcher.values())
    value = -Fraction(M - 2) * (cn + cm1) / 2 + sum(c[i] + cm1 * cn / c[i] for i in range(M)) / 2
    sol = Solution(_singleton_strategy(hider, order), _singleton_strategy(searcher, order),
                   value, f"single-pick case 2 M={M}")
    return sol, SingletonCaseData(M, 2, hider, searcher, value, labels)


def _singleton_strategy(probs: dict, order: Sequence[int]) -> MixedStrategy:
    return MixedStrategy(tuple((1 << order[pos - 1], p) for pos, p in probs.items()))


# ---------------------------------------------------------------------------

def solve_finite(spec: GameSpec) -> Solution:
    """Dispatch a finite game to the closed form that covers it.

    Raises :class:`NoClosedFormError` for variants without one.
    """
    if spec.domain is not Domain.FINITE:
        raise ValueError("not a finite game")
    prof, hider, searcher, n = spec.profile, spec.hider, spec.searcher, spec.n
    sym = prof.is_symmetric

    if isinstance(hider, PowerSet) and isinstance(searcher, PowerSet):
        if any(p == 0 for p in prof.penalties):
            raise NoClosedFormError("a zero penalty leaves the cost/penalty ratio undefined")
        return solve_powerset(prof)

    positive = all(c > 0 for c in prof.costs)
    if sym and positive:
        if isinstance(hider, FixedCardinality) and isinstance(searcher, PowerSet):
            return solve_hider_cardinality(prof.costs, hider.k)
        if isinstance(hider, PowerSet) and isinstance(searcher, FixedCardinality):
            return solve_searcher_cardinality(prof.costs, searcher.k)
        if (isinstance(hider, FixedCardinality) and isinstance(searcher, FixedCardinality)
                and hider.k == searcher.k == 1 and n >= 2):
            return solve_singleton_pair(prof.costs)[0]

    if (n == 2 and isinstance(hider, FixedCardinality) and hider.k == 1
            and isinstance(searcher, PowerSet)
            and all(x > 0 for x in prof.costs + prof.penalties)):
        return solve_two_by_two_k1(prof)

    raise NoClosedFormError("no closed form for this finite variant; use the numeric oracle")
