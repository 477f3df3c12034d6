"""Domain types and exact payoff evaluation for alignment games.

A Hider picks a set ``H`` and a Searcher picks a set ``S``; the Hider receives
``C(S \\ H) + Pi(H \\ S)`` where ``C`` charges searched-but-empty locations and
``Pi`` charges occupied-but-unsearched ones.  Finite games use additive
costs over locations ``1..n`` and subsets are stored as integer bitmasks
(bit ``j - 1`` is location ``j``).  Continuous games live on the unit circle or
unit interval, with pure strategies given by arcs and costs proportional to
length.

Everything that touches a finite game is evaluated in exact rational
arithmetic.  Continuous quantities are computed with whatever number type the
caller supplies, so passing :class:`~fractions.Fraction` keeps them exact too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

MAX_LOCATIONS = 24
MAX_EXPLICIT_ATOMS_N = 20
FLOAT_PROBABILITY_TOL = 1e-12


class NoClosedFormError(ValueError):
    """Raised for game variants that have no closed-form solution here."""


class Domain(Enum):
    CIRCLE = "circle"
    INTERVAL = "interval"
    FINITE = "finite"


class Side(Enum):
    HIDER = "hider"
    SEARCHER = "searcher"


def as_rational(x) -> Fraction:
    """Convert ``x`` to a :class:`Fraction`.

    Floats go through their shortest decimal repr so ``0.1`` becomes ``1/10``
    rather than the nearest binary fraction.  Strings accept ``"2/5"`` and
    ``"0.4"`` alike.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite number {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if hasattr(x, "item"):  # numpy scalars
        return as_rational(x.item())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


# ---------------------------------------------------------------------------
# subsets

def to_mask(locations: Iterable[int]) -> int:
    """Bitmask of a collection of 1-based locations."""
    m = 0
    for j in locations:
        if j < 1:
            raise ValueError(f"locations are 1-based, got {j}")
        m |= 1 << (j - 1)
    return m


def from_mask(mask: int) -> tuple[int, ...]:
    """Sorted 1-based locations contained in ``mask``."""
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def full_mask(n: int) -> int:
    return (1 << n) - 1


def _coerce_mask(x) -> int:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        if x < 0:
            raise ValueError("subset masks are non-negative")
        return x
    return to_mask(x)


# ---------------------------------------------------------------------------
# cost profiles

@dataclass(frozen=True)
class CostProfile:
    """Per-location costs ``c_j`` and penalties ``pi_j`` of a finite game."""

    costs: tuple[Fraction, ...]
    penalties: tuple[Fraction, ...]

    def __post_init__(self):
        costs = tuple(as_rational(c) for c in self.costs)
        penalties = tuple(as_rational(p) for p in self.penalties)
        if len(costs) != len(penalties):
            raise ValueError(
                f"costs has {len(costs)} entries but penalties has {len(penalties)}")
        if not costs:
            raise ValueError("a finite game needs at least one location")
        if any(c < 0 for c in costs):
            raise ValueError("costs must be non-negative")
        if any(p < 0 for p in penalties):
            raise ValueError("penalties must be non-negative")
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "penalties", penalties)

    @classmethod
    def symmetric(cls, costs: Sequence) -> "CostProfile":
        """Profile with penalties equal to costs, so payoffs are ``c(H ^ S)``."""
        costs = tuple(costs)
        return cls(costs, costs)

    @property
    def n(self) -> int:
        return len(self.costs)

    @property
    def is_symmetric(self) -> bool:
        return self.costs == self.penalties

    def cost(self, mask: int) -> Fraction:
        return sum((self.costs[j - 1] for j in from_mask(mask)), Fraction(0))

    def penalty(self, mask: int) -> Fraction:
        return sum((self.penalties[j - 1] for j in from_mask(mask)), Fraction(0))

    @property
    def total_cost(self) -> Fraction:
        return sum(self.costs, Fraction(0))

    def scaled(self, t) -> "CostProfile":
        t = as_rational(t)
        return CostProfile(tuple(t * c for c in self.costs),
                           tuple(t * p for p in self.penalties))


@dataclass(frozen=True)
class RateProfile:
    """Cost and penalty per unit length for the continuous games."""

    cost: Fraction
    penalty: Fraction

    def __post_init__(self):
        c, p = as_rational(self.cost), as_rational(self.penalty)
        if c <= 0 or p <= 0:
            raise ValueError("continuous cost and penalty rates must be positive")
        object.__setattr__(self, "cost", c)
        object.__setattr__(self, "penalty", p)


# ---------------------------------------------------------------------------
# strategy families

@dataclass(frozen=True)
class FreeLength:
    """The player chooses both the start and the length of the arc."""


@dataclass(frozen=True)
class FixedLength:
    length: Fraction

    def __post_init__(self):
        x = as_rational(self.length)
        if not 0 <= x <= 1:
            raise ValueError(f"fixed length must lie in [0, 1], got {x}")
        object.__setattr__(self, "length", x)


@dataclass(frozen=True)
class PowerSet:
    """Every subset of the ground set is feasible."""


@dataclass(frozen=True)
class FixedCardinality:
    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 0:
            raise ValueError(f"cardinality must be a non-negative integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))


@dataclass(frozen=True)
class SubsetFamily:
    """An explicit collection of feasible subsets, kept in the given order."""

    masks: tuple[int, ...]

    def __post_init__(self):
        masks = tuple(_coerce_mask(m) for m in self.masks)
        if not masks:
            raise ValueError("a subset family needs at least one member")
        if len(set(masks)) != len(masks):
            raise ValueError("subset family has duplicate members")
        object.__setattr__(self, "masks", masks)


ContinuousFamily = Union[FreeLength, FixedLength]
FiniteFamily = Union[PowerSet, FixedCardinality, SubsetFamily]
Family = Union[ContinuousFamily, FiniteFamily]


def family_size(family: FiniteFamily, n: int) -> int:
    if isinstance(family, PowerSet):
        return 1 << n
    if isinstance(family, FixedCardinality):
        return math.comb(n, family.k)
    return len(family.masks)


def enumerate_family(family: FiniteFamily, n: int) -> list[int]:
    """Members of a finite family in canonical order.

    Power sets are listed by ascending bitmask, cardinality families in
    lexicographic order of their sorted location tuples, explicit families
    as given.
    """
    if isinstance(family, PowerSet):
        return list(range(1 << n))
    if isinstance(family, FixedCardinality):
        return [sum(1 << j for j in combo) for combo in combinations(range(n), family.k)]
    return list(family.masks)


def family_contains(family: FiniteFamily, mask: int, n: int) -> bool:
    if mask >> n:
        return False
    if isinstance(family, PowerSet):
        return True
    if isinstance(family, FixedCardinality):
        return popcount(mask) == family.k
    return mask in family.masks


def complement_family(family: FiniteFamily, n: int) -> FiniteFamily:
    """The family of complements ``{[n] \\ A : A in family}``."""
    if isinstance(family, PowerSet):
        return family
    if isinstance(family, FixedCardinality):
        return FixedCardinality(n - family.k)
    full = full_mask(n)
    return SubsetFamily(tuple(full ^ m for m in family.masks))


# ---------------------------------------------------------------------------
# game specification

@dataclass(frozen=True)
class GameSpec:
    domain: Domain
    hider: Family
    searcher: Family
    profile: Union[CostProfile, RateProfile]

    def __post_init__(self):
        if self.domain is Domain.FINITE:
            if not isinstance(self.profile, CostProfile):
                raise ValueError("finite games need a CostProfile")
            n = self.profile.n
            if n > MAX_LOCATIONS:
                raise ValueError(f"at most {MAX_LOCATIONS} locations are supported, got {n}")
            for side, fam in (("hider", self.hider), ("searcher", self.searcher)):
                if not isinstance(fam, (PowerSet, FixedCardinality, SubsetFamily)):
                    raise ValueError(f"{side} family {fam!r} is not a finite family")
                if isinstance(fam, FixedCardinality) and fam.k > n:
                    raise ValueError(f"{side} cardinality {fam.k} exceeds n={n}")
                if isinstance(fam, SubsetFamily) and any(m >> n for m in fam.masks):
                    raise ValueError(f"{side} family has a set outside [{n}]")
        else:
            if not isinstance(self.profile, RateProfile):
                raise ValueError("continuous games need a RateProfile")
            for side, fam in (("hider", self.hider), ("searcher", self.searcher)):
                if not isinstance(fam, (FreeLength, FixedLength)):
                    raise ValueError(f"{side} family {fam!r} is not an arc family")

    @property
    def n(self) -> int:
        if self.domain is not Domain.FINITE:
            raise AttributeError("continuous games have no location count")
        return self.profile.n

    @property
    def is_continuous(self) -> bool:
        return self.domain is not Domain.FINITE

    def family(self, side: Side) -> Family:
        return self.hider if side is Side.HIDER else self.searcher

    @classmethod
    def finite(cls, costs, penalties=None, hider=None, searcher=None) -> "GameSpec":
        profile = CostProfile(tuple(costs), tuple(costs if penalties is None else penalties))
        return cls(Domain.FINITE, hider or PowerSet(), searcher or PowerSet(), profile)

    @classmethod
    def circle(cls, cost=1, penalty=1, hider=None, searcher=None) -> "GameSpec":
        return cls(Domain.CIRCLE, hider or FreeLength(), searcher or FreeLength(),
                   RateProfile(cost, penalty))

    @classmethod
    def interval(cls, cost=1, penalty=1, hider=None, searcher=None) -> "GameSpec":
        return cls(Domain.INTERVAL, hider or FreeLength(), searcher or FreeLength(),
                   RateProfile(cost, penalty))


# ---------------------------------------------------------------------------
# pure and mixed strategies

@dataclass(frozen=True)
class Arc:
    """Arc ``[start, start + length]``; on the circle it wraps modulo 1."""

    start: object
    length: object

    @property
    def end(self):
        return self.start + self.length


def circle_arc(start, length) -> Arc:
    """Circle arc with its start normalised into ``[0, 1)``."""
    if not 0 <= length <= 1:
        raise ValueError(f"arc length must lie in [0, 1], got {length}")
    return Arc(start % 1, length)


def check_arc(domain: Domain, arc: Arc) -> None:
    if not 0 <= arc.length <= 1:
        raise ValueError(f"arc length must lie in [0, 1], got {arc.length}")
    if domain is Domain.CIRCLE:
        if not 0 <= arc.start < 1:
            raise ValueError(f"circle arc start must lie in [0, 1), got {arc.start}")
    elif domain is Domain.INTERVAL:
        if arc.start < 0 or arc.start + arc.length > 1:
            raise ValueError(f"interval arc [{arc.start}, {arc.end}] leaves [0, 1]")
    else:
        raise ValueError("arcs only exist in continuous domains")


@dataclass(frozen=True)
class MixedStrategy:
    """Finite distribution over pure strategies (bitmasks or :class:`Arc`).

    Atom order is significant: sampling walks the cumulative distribution in
    listed order.  Exact probabilities must sum to exactly one; float
    probabilities to within ``1e-12``.
    """

    atoms: tuple[tuple[object, object], ...]

    def __post_init__(self):
        atoms = tuple((pure, p) for pure, p in self.atoms)
        if not atoms:
            raise ValueError("a mixed strategy needs at least one atom")
        kinds = {type(pure) is Arc for pure, _ in atoms}
        if len(kinds) != 1:
            raise ValueError("atoms mix subsets and arcs")
        if kinds == {False}:
            for pure, _ in atoms:
                if isinstance(pure, bool) or not isinstance(pure, int) or pure < 0:
                    raise ValueError(f"subset atoms must be bitmasks, got {pure!r}")
        probs = [p for _, p in atoms]
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be non-negative")
        if all(is_exact(p) for p in probs):
            if sum(probs) != 1:
                raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        elif abs(math.fsum(float(p) for p in probs) - 1.0) > FLOAT_PROBABILITY_TOL:
            raise ValueError("probabilities do not sum to 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def point(cls, pure) -> "MixedStrategy":
        return cls(((pure, Fraction(1)),))

    @classmethod
    def uniform(cls, pures: Iterable) -> "MixedStrategy":
        """Equal weight on each listed pure strategy; repeats are merged."""
        pures = list(pures)
        if not pures:
            raise ValueError("need at least one pure strategy")
        weight = Fraction(1, len(pures))
        return cls.from_weights([(p, weight) for p in pures])

    @classmethod
    def from_weights(cls, pairs: Iterable) -> "MixedStrategy":
        """Build from (pure, probability) pairs, merging repeated pures in first-seen order."""
        merged: dict = {}
        for pure, p in pairs:
            merged[pure] = merged.get(pure, 0) + p
        return cls(tuple(merged.items()))

    @property
    def is_subset_strategy(self) -> bool:
        return type(self.atoms[0][0]) is not Arc

    def probability(self, pure) -> object:
        return sum((p for q, p in self.atoms if q == pure), 0)

    def support(self) -> list:
        return [pure for pure, p in self.atoms if p > 0]

    def without_zeros(self) -> "MixedStrategy":
        return MixedStrategy(tuple((q, p) for q, p in self.atoms if p > 0))


@dataclass(frozen=True)
class UniformStartArc:
    """Arc of fixed length whose start is uniform on the circle."""

    length: object

    def __post_init__(self):
        if not 0 <= self.length <= 1:
            raise ValueError(f"arc length must lie in [0, 1], got {self.length}")


@dataclass(frozen=True)
class IndependentSubsets:
    """Random subset that contains each location ``j`` independently.

    ``inclusion[j - 1]`` is the probability that location ``j`` is chosen.  This
    is the compact form of a product distribution over all ``2**n`` subsets.
    """

    inclusion: tuple

    def __post_init__(self):
        inc = tuple(self.inclusion)
        if not inc:
            raise ValueError("need at least one location")
        if any(not 0 <= q <= 1 for q in inc):
            raise ValueError("inclusion probabilities must lie in [0, 1]")
        object.__setattr__(self, "inclusion", inc)

    @property
    def n(self) -> int:
        return len(self.inclusion)

    def probability(self, mask: int) -> object:
        p = Fraction(1) if all(is_exact(q) for q in self.inclusion) else 1.0
        for j, q in enumerate(self.inclusion):
            p *= q if (mask >> j) & 1 else 1 - q
        return p

    def atoms(self, keep_zero: bool = False) -> MixedStrategy:
        """Explicit distribution, subsets listed by ascending bitmask."""
        if self.n > MAX_EXPLICIT_ATOMS_N:
            raise ValueError(
                f"explicit expansion is limited to n <= {MAX_EXPLICIT_ATOMS_N}")
        pairs = ((m, self.probability(m)) for m in range(1 << self.n))
        return MixedStrategy(tuple((m, p) for m, p in pairs if keep_zero or p > 0))


Strategy = Union[MixedStrategy, UniformStartArc, IndependentSubsets]


@dataclass(frozen=True)
class Solution:
    """Optimal strategy pair, game value and a tag naming the result used."""

    hider: Strategy
    searcher: Strategy
    value: object
    provenance: str


# ---------------------------------------------------------------------------
# payoffs

def subset_payoff(profile: CostProfile, H, S) -> Fraction:
    """``c(S \\ H) + pi(H \\ S)`` for subsets given as bitmasks or 1-based locations."""
    H, S = _coerce_mask(H), _coerce_mask(S)
    if (H | S) >> profile.n:
        raise ValueError(f"subset reaches beyond the {profile.n} locations of the profile")
    return profile.cost(S & ~H) + profile.penalty(H & ~S)


def interval_arc_payoff(alpha, a, b):
    """Payoff of equal-length arcs ``[a, a+alpha]`` and ``[b, b+alpha]`` on the unit interval
    with unit cost and penalty."""
    hi = 1 - alpha
    for name, x in (("a", a), ("b", b)):
        if not 0 <= x <= hi:
            raise ValueError(f"start {name}={x} outside [0, {hi}]")
    d = abs(a - b)
    return 2 * d if d <= alpha else 2 * alpha


def _overlap_interval(a: Arc, b: Arc):
    lo, hi = max(a.start, b.start), min(a.end, b.end)
    return hi - lo if hi > lo else 0 * lo


def _overlap_circle(a: Arc, b: Arc):
    # lifts of b by -1, 0, +1 cover every intersection with a for starts in [0, 1)
    total = 0 * a.start
    for k in (-1, 0, 1):
        lo = max(a.start, b.start + k)
        hi = min(a.end, b.end + k)
        if hi > lo:
            total += hi - lo
    return total


def arc_overlap(domain: Domain, a: Arc, b: Arc):
    check_arc(domain, a)
    check_arc(domain, b)
    return _overlap_circle(a, b) if domain is Domain.CIRCLE else _overlap_interval(a, b)


def arc_symmetric_difference(domain: Domain, c, pi, hider_arc: Arc, searcher_arc: Arc):
    """``c * |S \\ H| + pi * |H \\ S|`` for a Hider arc ``H`` and Searcher arc ``S``."""
    ov = arc_overlap(domain, hider_arc, searcher_arc)
    return c * (searcher_arc.length - ov) + pi * (hider_arc.length - ov)


def arc_payoff_array(domain: Domain, c, pi, hider_start, hider_length,
                     searcher_start, searcher_length):
    """Vectorised float version of :func:`arc_symmetric_difference` (broadcasting)."""
    hs, hl = np.asarray(hider_start, float), np.asarray(hider_length, float)
    ss, sl = np.asarray(searcher_start, float), np.asarray(searcher_length, float)
    if domain is Domain.CIRCLE:
        ov = 0.0
        for k in (-1.0, 0.0, 1.0):
            ov = ov + np.clip(np.minimum(hs + hl, ss + sl + k) - np.maximum(hs, ss + k), 0.0, None)
    else:
        ov = np.clip(np.minimum(hs + hl, ss + sl) - np.maximum(hs, ss), 0.0, None)
    return float(c) * (sl - ov) + float(pi) * (hl - ov)


def _uniform_vs_arc(c, pi, uniform_length, arc: Arc, uniform_is_hider: bool):
    """Expected payoff of a fixed circle arc against a uniform-start arc.

    The payoff is piecewise linear in the uniform start with kinks where arc
    endpoints meet, so the trapezoid rule over the kinks is exact.
    """
    L = uniform_length
    kinks = {arc.start % 1, arc.end % 1, (arc.start - L) % 1, (arc.end - L) % 1}
    zero = 0 * arc.start * L
    pts = sorted(kinks | {zero, zero + 1})

    def f(t):
        u = Arc(t % 1, L)
        ov = _overlap_circle(u, arc) if uniform_is_hider else _overlap_circle(arc, u)
        h_len, s_len = (L, arc.length) if uniform_is_hider else (arc.length, L)
        return c * (s_len - ov) + pi * (h_len - ov)

    total = zero
    prev_t, prev_f = pts[0], f(pts[0])
    for t in pts[1:]:
        ft = f(t)
        total += (t - prev_t) * (prev_f + ft) / 2
        prev_t, prev_f = t, ft
    return total


def circle_uniform_payoff(alpha, beta, c, pi):
    """Expected payoff when both arcs have uniform random starts on the circle."""
    return beta * (1 - alpha) * c + alpha * (1 - beta) * pi


def inclusion_marginals(strategy, n: int) -> list:
    """Probability that each location lies in the chosen subset."""
    if isinstance(strategy, IndependentSubsets):
        if strategy.n != n:
            raise ValueError("strategy and game disagree on the number of locations")
        return list(strategy.inclusion)
    if not isinstance(strategy, MixedStrategy) or not strategy.is_subset_strategy:
        raise TypeError("expected a subset strategy")
    marg = [0] * n
    for mask, p in strategy.atoms:
        if mask >> n:
            raise ValueError("atom reaches beyond the ground set")
        for j in range(n):
            if (mask >> j) & 1:
                marg[j] += p
    return marg


def _finite_expected(profile: CostProfile, hider_marg, searcher_marg):
    # independence of the two draws lets additive payoffs factor through the marginals
    total = 0
    for c, pi, h, s in zip(profile.costs, profile.penalties, hider_marg, searcher_marg):
        total += c * s * (1 - h) + pi * h * (1 - s)
    return total


def mixed_payoff(spec: GameSpec, h, s):
    """Expected payoff ``P(h, s)`` of two (possibly pure) strategies.

    Pure strategies may be passed directly: a bitmask in finite games, an
    :class:`Arc` in continuous ones.
    """
    if spec.domain is Domain.FINITE:
        if isinstance(h, int) and not isinstance(h, bool):
            h = MixedStrategy.point(h)
        if isinstance(s, int) and not isinstance(s, bool):
            s = MixedStrategy.point(s)
        n = spec.n
        return _finite_expected(spec.profile, inclusion_marginals(h, n),
                                inclusion_marginals(s, n))

    c, pi = spec.profile.cost, spec.profile.penalty
    if isinstance(h, Arc):
        h = MixedStrategy.point(h)
    if isinstance(s, Arc):
        s = MixedStrategy.point(s)
    for strat in (h, s):
        if isinstance(strat, IndependentSubsets) or (
                isinstance(strat, MixedStrategy) and strat.is_subset_strategy):
            raise TypeError("subset strategy used in a continuous game")
    if isinstance(h, UniformStartArc) or isinstance(s, UniformStartArc):
        if spec.domain is not Domain.CIRCLE:
            raise ValueError("uniform-start arcs are only defined on the circle")
        if isinstance(h, UniformStartArc) and isinstance(s, UniformStartArc):
            return circle_uniform_payoff(h.length, s.length, c, pi)
        if isinstance(h, UniformStartArc):
            return sum(p * _uniform_vs_arc(c, pi, h.length, arc, True) for arc, p in s.atoms)
        return sum(p * _uniform_vs_arc(c, pi, s.length, arc, False) for arc, p in h.atoms)
    return sum(p * q * arc_symmetric_difference(spec.domain, c, pi, a, b)
               for a, p in h.atoms for b, q in s.atoms)


def complement_strategy(strategy, n: int):
    """Map every atom ``A`` to ``[n] \\ A`` with the same probability."""
    if isinstance(strategy, IndependentSubsets):
        if strategy.n != n:
            raise ValueError("strategy and game disagree on the number of locations")
        return IndependentSubsets(tuple(1 - q for q in strategy.inclusion))
    if not isinstance(strategy, MixedStrategy) or not strategy.is_subset_strategy:
        raise TypeError("only subset strategies can be complemented")
    full = full_mask(n)
    if any(m >> n for m, _ in strategy.atoms):
        raise ValueError("atom reaches beyond the ground set")
    return MixedStrategy(tuple((full ^ m, p) for m, p in strategy.atoms))
