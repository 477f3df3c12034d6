"""Closed-form solutions of the circle and unit-interval games.

All parameters are converted to exact rationals, so the returned values and
arc endpoints are exact.  Boundary cases where a player is indifferent
(``alpha == alpha*``, ``beta == beta*``, length exactly 1/2) resolve to the
``>=`` branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    Arc,
    Domain,
    FixedLength,
    FreeLength,
    GameSpec,
    MixedStrategy,
    NoClosedFormError,
    Side,
    Solution,
    UniformStartArc,
    as_rational,
    circle_uniform_payoff,
)

EMPTY_ARC = Arc(Fraction(0), Fraction(0))
WHOLE_INTERVAL = Arc(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class IntervalFixedSolution:
    """Structure of the equal-fixed-length interval game.

    ``cover_points`` are the ``M + 1`` evenly spaced left endpoints of a
    minimal cover of ``[0, 1]``; ``searcher_points`` the ``M`` left endpoints
    of a maximal packing, which the Searcher mixes uniformly.
    ``hider_atoms`` is the Hider's optimal mix as ``(left endpoint,
    probability)`` pairs.  The evenly spaced cover only guarantees the value
    when ``M == 1``: for smaller lengths one Searcher arc can meet three of
    its members, so the Hider instead mixes the "chains" described in
    :func:`chain_cover_mix`.
    """

    M: int
    cover_points: tuple[Fraction, ...]
    searcher_points: tuple[Fraction, ...]
    hider_atoms: tuple[tuple[Fraction, Fraction], ...]
    value: Fraction


def _unit(x, name: str) -> Fraction:
    x = as_rational(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x


def _rate(x, name: str) -> Fraction:
    x = as_rational(x)
    if x <= 0:
        raise ValueError(f"{name} must be positive, got {x}")
    return x


def circle_uniform_value(alpha, beta, c, pi) -> Fraction:
    """Value of the circle game with both arc lengths fixed (uniform starts)."""
    alpha, beta = _unit(alpha, "alpha"), _unit(beta, "beta")
    return circle_uniform_payoff(alpha, beta, _rate(c, "c"), _rate(pi, "pi"))


def solve_circle(spec: GameSpec) -> Solution:
    if spec.domain is not Domain.CIRCLE:
        raise ValueError("solve_circle needs a circle game")
    c, pi = spec.profile.cost, spec.profile.penalty
    alpha_star = c / (c + pi)
    beta_star = pi / (c + pi)
    hider, searcher = spec.hider, spec.searcher

    if isinstance(hider, FreeLength) and isinstance(searcher, FreeLength):
        return Solution(UniformStartArc(alpha_star), UniformStartArc(beta_star),
                        c * pi / (c + pi), "circle-free-lengths")

    if isinstance(hider, FixedLength) and isinstance(searcher, FreeLength):
        alpha = hider.length
        if alpha < alpha_star:
            return Solution(UniformStartArc(alpha), UniformStartArc(Fraction(0)),
                            alpha * pi, "circle-hider-fixed searcher-empty")
        return Solution(UniformStartArc(alpha), UniformStartArc(Fraction(1)),
                        (1 - alpha) * c, "circle-hider-fixed searcher-full")

    if isinstance(hider, FreeLength) and isinstance(searcher, FixedLength):
        beta = searcher.length
        if beta < beta_star:
            return Solution(UniformStartArc(Fraction(1)), UniformStartArc(beta),
                            (1 - beta) * pi, "circle-searcher-fixed hider-full")
        return Solution(UniformStartArc(Fraction(0)), UniformStartArc(beta),
                        beta * c, "circle-searcher-fixed hider-empty")

    alpha, beta = hider.length, searcher.length
    return Solution(UniformStartArc(alpha), UniformStartArc(beta),
                    circle_uniform_payoff(alpha, beta, c, pi), "circle-fixed-lengths")


def _require_equal_rates(c, pi) -> Fraction:
    c, pi = _rate(c, "c"), _rate(pi, "pi")
    if c != pi:
        raise NoClosedFormError(
            "no closed form for interval games with unequal cost and penalty; use the numeric oracle")
    return c


def solve_interval_free(c=1, pi=1) -> Solution:
    """Both lengths free: each player mixes the two halves of ``[0, 1]`` equally."""
    rate = _require_equal_rates(c, pi)
    half = Fraction(1, 2)
    halves = MixedStrategy.uniform([Arc(Fraction(0), half), Arc(half, half)])
    return Solution(halves, halves, rate * half, "interval-free-lengths")


def solve_interval_one_fixed(fixed_side: Side, x) -> Solution:
    """One player's length is fixed at ``x``; unit cost and penalty."""
    x = _unit(x, "fixed length")
    ends = MixedStrategy.uniform([Arc(Fraction(0), x), Arc(1 - x, x)])
    half = Fraction(1, 2)
    if fixed_side is Side.HIDER:
        if x >= half:
            return Solution(ends, MixedStrategy.point(WHOLE_INTERVAL), 1 - x,
                            "interval-hider-fixed searcher-full")
        return Solution(ends, MixedStrategy.point(EMPTY_ARC), x,
                        "interval-hider-fixed searcher-empty")
    if x >= half:
        return Solution(MixedStrategy.point(EMPTY_ARC), ends, x,
                        "interval-searcher-fixed hider-empty")
    return Solution(MixedStrategy.point(WHOLE_INTERVAL), ends, 1 - x,
                    "interval-searcher-fixed hider-full")


def interval_fixed_value(alpha) -> Fraction:
    """Value of the equal-fixed-length interval game, unit cost and penalty."""
    alpha = _unit(alpha, "alpha")
    if alpha == 0:
        raise ValueError("length 0 leaves the number of support points unbounded")
    M = math.floor(1 / alpha)
    return (2 * alpha * (M * M - M - 1) + 2) / (M * (M + 1))


def chain_cover_mix(alpha) -> tuple[tuple[Fraction, Fraction], ...]:
    """Optimal Hider mix for equal fixed lengths ``alpha``, as (start, probability).

    For ``k = 1..M`` the chain ``C_k`` packs ``k`` arcs rightwards from 0
    and ``M + 1 - k`` arcs leftwards from 1, which covers ``[0, 1]`` with
    ``M + 1`` arcs.  The Hider picks ``k`` uniformly and then an arc of
    ``C_k`` uniformly.  Start ``i * alpha`` lies in ``M - i`` chains and start
    ``1 - j * alpha`` in ``M + 1 - j``; coinciding starts are merged.
    """
    alpha = _unit(alpha, "alpha")
    if alpha == 0:
        raise ValueError("length 0 leaves the number of support points unbounded")
    M = math.floor(1 / alpha)
    unit = Fraction(1, M * (M + 1))
    weights: dict = {}
    for i in range(M):
        weights[alpha * i] = weights.get(alpha * i, 0) + (M - i) * unit
    for j in range(1, M + 1):
        start = 1 - alpha * j
        weights[start] = weights.get(start, 0) + (M + 1 - j) * unit
    return tuple(sorted(weights.items()))


def solve_interval_both_fixed(alpha, beta=None) -> tuple[Solution, IntervalFixedSolution]:
    """Both lengths fixed at ``alpha``; unit cost and penalty.

    With ``M = floor(1/alpha)`` the Searcher mixes uniformly over ``M``
    disjoint arcs at spacing ``(1 + alpha) / (M + 1)`` and the Hider plays
    :func:`chain_cover_mix`.  The value is
    ``(2 alpha (M^2 - M - 1) + 2) / (M (M + 1))``.
    """
    alpha = _unit(alpha, "alpha")
    if beta is not None and as_rational(beta) != alpha:
        raise NoClosedFormError(
            "no closed form for interval games with different fixed lengths; use the numeric oracle")
    if alpha == 0:
        raise ValueError("length 0 leaves the number of support points unbounded")
    M = math.floor(1 / alpha)
    cover_pts = tuple((1 - alpha) / M * i for i in range(M + 1))
    searcher_pts = tuple((1 + alpha) / (M + 1) * i - alpha for i in range(1, M + 1))
    value = interval_fixed_value(alpha)
    hider_atoms = chain_cover_mix(alpha)
    hider = MixedStrategy(tuple((Arc(a, alpha), p) for a, p in hider_atoms))
    searcher = MixedStrategy.uniform([Arc(b, alpha) for b in searcher_pts])
    sol = Solution(hider, searcher, value, f"interval-fixed-equal-lengths M={M}")
    return sol, IntervalFixedSolution(M, cover_pts, searcher_pts, hider_atoms, value)


def solve_continuous(spec: GameSpec) -> Solution:
    """Dispatch a continuous game to its closed form."""
    if spec.domain is Domain.CIRCLE:
        return solve_circle(spec)
    if spec.domain is not Domain.INTERVAL:
        raise ValueError("not a continuous game")
    c, pi = spec.profile.cost, spec.profile.penalty
    hider, searcher = spec.hider, spec.searcher
    if isinstance(hider, FreeLength) and isinstance(searcher, FreeLength):
        return solve_interval_free(c, pi)
    if c != 1 or pi != 1:
        raise NoClosedFormError(
            "fixed-length interval games are solved only for unit cost and penalty; use the numeric oracle")
    if isinstance(hider, FixedLength) and isinstance(searcher, FreeLength):
        return solve_interval_one_fixed(Side.HIDER, hider.length)
    if isinstance(hider, FreeLength) and isinstance(searcher, FixedLength):
        return solve_interval_one_fixed(Side.SEARCHER, searcher.length)
    return solve_interval_both_fixed(hider.length, searcher.length)[0]
