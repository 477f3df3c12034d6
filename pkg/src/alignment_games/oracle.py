"""Numeric verification of closed-form solutions.

Nothing here uses the closed forms.  Finite games are materialised as payoff
matrices and solved by the simplex code in :mod:`alignment_games.lp`; claimed
strategies are checked by exhaustive best responses.  Continuous games are
checked by best responses over a grid of arcs augmented with the endpoints of
the opposing strategy's support, and can be discretised into matrix games.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

import numpy as np

from . import lp
from .model import (
    Arc,
    Domain,
    FixedLength,
    FreeLength,
    GameSpec,
    IndependentSubsets,
    MixedStrategy,
    Side,
    Solution,
    UniformStartArc,
    arc_payoff_array,
    arc_symmetric_difference,
    as_rational,
    enumerate_family,
    family_contains,
    family_size,
    inclusion_marginals,
)

DEFAULT_MAX_ENTRIES = 1 << 20
MAX_ENTRIES_ENV = "ALIGNMENT_GAMES_MAX_ENTRIES"
DEFAULT_GRID = Fraction(1, 1000)
CONTINUOUS_TOL = 1e-6
FLOAT_LP_TOL = 1e-9


class OracleLimitError(RuntimeError):
    """The enumerated game would exceed the oracle's size limit."""


def max_entries() -> int:
    raw = os.environ.get(MAX_ENTRIES_ENV)
    return int(raw) if raw else DEFAULT_MAX_ENTRIES


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """Payoffs ``numerators / denominator``; rows are Hider strategies, columns Searcher ones."""

    row_labels: tuple
    col_labels: tuple
    numerators: np.ndarray
    denominator: int = 1

    def __post_init__(self):
        if self.numerators.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError("matrix shape does not match the label lists")

    @property
    def shape(self) -> tuple[int, int]:
        return self.numerators.shape

    @property
    def entries(self) -> np.ndarray:
        d = self.denominator
        return np.vectorize(lambda v: Fraction(int(v), d), otypes=[object])(self.numerators)

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.numerators[i, j]), self.denominator)

    @classmethod
    def from_entries(cls, row_labels, col_labels, entries) -> "PayoffMatrix":
        num, d = lp.to_integer_matrix(entries)
        return cls(tuple(row_labels), tuple(col_labels), num, d)


def _check_size(spec: GameSpec, limit: Optional[int]) -> None:
    limit = max_entries() if limit is None else limit
    rows = family_size(spec.hider, spec.n)
    cols = family_size(spec.searcher, spec.n)
    if rows * cols > limit:
        raise OracleLimitError(
            f"{rows} x {cols} payoff matrix exceeds the oracle limit of {limit} entries")


def _integer_weights(values) -> tuple[list[int], int]:
    fr = [as_rational(v) for v in values]
    d = lcm(*(v.denominator for v in fr)) if fr else 1
    return [int(v * d) for v in fr], d


def _bits(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def build_payoff_matrix(spec: GameSpec, limit: Optional[int] = None) -> PayoffMatrix:
    """Enumerate both families and tabulate ``c(S \\ H) + pi(H \\ S)``."""
    if spec.domain is not Domain.FINITE:
        raise ValueError("continuous games must be discretised first (discretize_continuous)")
    _check_size(spec, limit)
    n, prof = spec.n, spec.profile
    rows = enumerate_family(spec.hider, n)
    cols = enumerate_family(spec.searcher, n)
    weights, d = _integer_weights(prof.costs + prof.penalties)
    c, pi = weights[:n], weights[n:]
    H = _bits(np.array(rows, dtype=np.int64), n)
    S = _bits(np.array(cols, dtype=np.int64), n)
    dtype = np.int64 if max(weights, default=0) * n < 2 ** 62 else object
    cv = np.array(c, dtype=dtype)
    pv = np.array(pi, dtype=dtype)
    H, S = H.astype(dtype), S.astype(dtype)
    num = (1 - H).dot((S * cv).T) + (H * pv).dot((1 - S).T)
    return PayoffMatrix(tuple(rows), tuple(cols), num, d)


def solve_matrix_game(matrix: PayoffMatrix, mode: str = "auto"):
    """Value and optimal mixes ``(value, row_mix, col_mix)`` of a matrix game.

    ``mode="exact"`` (the default for the integer-backed matrices built
    here) returns rationals and checks the duality certificate
    ``min_j (x A)_j == value == max_i (A y)_i`` exactly; ``mode="float"`` is
    accurate to about ``1e-9``.
    """
    if matrix.numerators.size == 0:
        raise ValueError("empty payoff matrix")
    if mode == "float":
        sol = lp.solve_float(matrix.numerators.astype(float) / matrix.denominator)
        return sol.value, sol.row_mix, sol.col_mix
    if mode not in ("auto", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    sol = lp.solve_integer(matrix.numerators, matrix.denominator)
    num = matrix.numerators.astype(object)
    x = np.array(sol.row_mix, dtype=object)
    y = np.array(sol.col_mix, dtype=object)
    lower = min(x.dot(num)) / matrix.denominator
    upper = max(num.dot(y)) / matrix.denominator
    if not lower == sol.value == upper:
        raise lp.LPError("duality certificate failed")
    return sol.value, sol.row_mix, sol.col_mix


def oracle_solution(spec: GameSpec, limit: Optional[int] = None) -> Solution:
    """Solve a finite game (or a discretised continuous one) by linear programming."""
    matrix = build_payoff_matrix(spec, limit) if spec.domain is Domain.FINITE else None
    if matrix is None:
        raise ValueError("use discretize_continuous for continuous games")
    value, x, y = solve_matrix_game(matrix)
    hider = MixedStrategy(tuple((m, p) for m, p in zip(matrix.row_labels, x) if p > 0))
    searcher = MixedStrategy(tuple((m, p) for m, p in zip(matrix.col_labels, y) if p > 0))
    return Solution(hider, searcher, value, "oracle-lp")


# ---------------------------------------------------------------------------
# finite best responses

def response_payoffs(spec: GameSpec, opponent, side: Side, limit: Optional[int] = None):
    """Expected payoff of every pure strategy of ``side`` against ``opponent``.

    Returns ``(members, payoffs)`` in canonical enumeration order, with exact
    rational payoffs.
    """
    if spec.domain is not Domain.FINITE:
        raise ValueError("best responses over finite families only")
    n, prof = spec.n, spec.profile
    family = spec.family(side)
    limit = max_entries() if limit is None else limit
    if family_size(family, n) > limit:
        raise OracleLimitError(f"{side.value} family exceeds the oracle limit of {limit}")
    marg = inclusion_marginals(opponent, n)
    # the payoff is affine in the responder's indicator vector
    if side is Side.HIDER:
        base = sum((c * s for c, s in zip(prof.costs, marg)), Fraction(0))
        slope = [p * (1 - s) - c * s for c, p, s in zip(prof.costs, prof.penalties, marg)]
    else:
        base = sum((p * h for p, h in zip(prof.penalties, marg)), Fraction(0))
        slope = [c * (1 - h) - p * h for c, p, h in zip(prof.costs, prof.penalties, marg)]
    ints, d = _integer_weights([base] + slope)
    members = enumerate_family(family, n)
    bits = _bits(np.array(members, dtype=np.int64), n).astype(object)
    totals = ints[0] + bits.dot(np.array(ints[1:], dtype=object))
    return members, [Fraction(int(t), d) for t in totals]


def best_response(spec: GameSpec, opponent, side: Side, limit: Optional[int] = None):
    """Extremal pure response ``(mask, payoff)`` of ``side`` against ``opponent``.

    The Hider maximises and the Searcher minimises; ties go to the first
    member in canonical order.
    """
    members, pay = response_payoffs(spec, opponent, side, limit)
    best = max(pay) if side is Side.HIDER else min(pay)
    i = pay.index(best)
    return members[i], best


# ---------------------------------------------------------------------------
# continuous games

def _grid_points(step: Fraction, hi, include_hi: bool = True) -> list[Fraction]:
    """Multiples of ``step`` in ``[0, hi]`` (``[0, hi)`` if not ``include_hi``)."""
    step = as_rational(step)
    if step <= 0 or (1 / step).denominator != 1:
        raise ValueError(f"grid step {step} must divide 1 evenly")
    pts = []
    i = 0
    while i * step < hi or (include_hi and i * step == hi):
        pts.append(i * step)
        i += 1
    if include_hi and (not pts or pts[-1] != hi):
        pts.append(as_rational(hi))
    return pts


def discretize_continuous(spec: GameSpec, step=Fraction(1, 100)) -> PayoffMatrix:
    """Matrix game over arc starts on a grid (both lengths fixed).

    Interval games also get the rightmost start ``1 - length`` when it is
    off the grid.  Row and column labels are :class:`Arc` objects and the
    entries are exact.
    """
    if not spec.is_continuous:
        raise ValueError("discretize_continuous needs a circle or interval game")
    if not (isinstance(spec.hider, FixedLength) and isinstance(spec.searcher, FixedLength)):
        raise ValueError("free lengths must be quantised by the caller before discretising")
    step = as_rational(step)
    alpha, beta = spec.hider.length, spec.searcher.length
    c, pi = spec.profile.cost, spec.profile.penalty
    if spec.domain is Domain.CIRCLE:
        rows = [Arc(a, alpha) for a in _grid_points(step, 1, include_hi=False)]
        cols = [Arc(b, beta) for b in _grid_points(step, 1, include_hi=False)]
    else:
        rows = [Arc(a, alpha) for a in _grid_points(step, 1 - alpha)]
        cols = [Arc(b, beta) for b in _grid_points(step, 1 - beta)]
    entries = [[arc_symmetric_difference(spec.domain, c, pi, h, s) for s in cols] for h in rows]
    return PayoffMatrix.from_entries(rows, cols, entries)


def _vs_uniform(c, pi, starts, lengths, L, cand_is_hider):
    """Exact expectation against a uniform-start arc of length ``L`` (trapezoid over kinks)."""
    s = starts[:, None]
    ell = lengths[:, None]
    kinks = np.concatenate([
        np.zeros_like(s), np.ones_like(s),
        s % 1.0, (s + ell) % 1.0, (s - L) % 1.0, (s + ell - L) % 1.0,
    ], axis=1)
    kinks.sort(axis=1)
    u = kinks % 1.0
    if cand_is_hider:
        f = arc_payoff_array(Domain.CIRCLE, c, pi, s, ell, u, L)
    else:
        f = arc_payoff_array(Domain.CIRCLE, c, pi, u, L, s, ell)
    widths = np.diff(kinks, axis=1)
    return np.sum(widths * (f[:, 1:] + f[:, :-1]) / 2.0, axis=1)


def _expected_against(spec, opponent, starts, lengths, cand_is_hider, chunk=200_000):
    c, pi = float(spec.profile.cost), float(spec.profile.penalty)
    out = np.empty(len(starts))
    for lo in range(0, len(starts), chunk):
        s = starts[lo:lo + chunk]
        ell = lengths[lo:lo + chunk]
        if isinstance(opponent, UniformStartArc):
            out[lo:lo + chunk] = _vs_uniform(c, pi, s, ell, float(opponent.length), cand_is_hider)
            continue
        acc = np.zeros(len(s))
        for arc, p in opponent.atoms:
            a0, al = float(arc.start), float(arc.length)
            if cand_is_hider:
                acc += float(p) * arc_payoff_array(spec.domain, c, pi, s, ell, a0, al)
            else:
                acc += float(p) * arc_payoff_array(spec.domain, c, pi, a0, al, s, ell)
        out[lo:lo + chunk] = acc
    return out


def _support_points(opponent) -> list:
    if isinstance(opponent, UniformStartArc):
        return []
    pts = []
    for arc, p in opponent.atoms:
        if p > 0:
            pts += [arc.start, arc.start + arc.length]
    return pts


def _candidate_arcs(spec: GameSpec, family, opponent, grid, length_grid):
    """Candidate pure arcs: grid starts plus starts aligned with the opponent's support."""
    grid = as_rational(grid)
    length_grid = as_rational(length_grid or grid)
    circle = spec.domain is Domain.CIRCLE
    support = [float(x) for x in _support_points(opponent)]
    if isinstance(family, FixedLength):
        lengths = [float(family.length)]
    else:
        lengths = sorted({float(x) for x in _grid_points(length_grid, 1)}
                         | {float(a.length) for a, p in getattr(opponent, "atoms", ()) if p > 0}
                         | ({float(opponent.length)} if isinstance(opponent, UniformStartArc) else set()))
    grid_starts = np.array([float(x) for x in _grid_points(grid, 1, include_hi=not circle)])
    starts_all, lengths_all = [], []
    if not circle and isinstance(family, FreeLength):
        # arcs between any two candidate endpoints
        ends = np.unique(np.concatenate([grid_starts, np.array(support, dtype=float)]))
        ends = ends[(ends >= 0) & (ends <= 1)]
        i, j = np.triu_indices(len(ends))
        return ends[i], ends[j] - ends[i]
    for L in lengths:
        extra = []
        for x in support:
            extra += [x, x - L]
        st = np.concatenate([grid_starts, np.array(extra, dtype=float)])
        if circle:
            st = st % 1.0
        else:
            st = np.concatenate([st[(st >= 0) & (st <= 1 - L)], [max(0.0, 1 - L)]])
        st = np.unique(st)
        starts_all.append(st)
        lengths_all.append(np.full(len(st), L))
    return np.concatenate(starts_all), np.concatenate(lengths_all)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking a claimed solution.

    ``hider_gap`` is the claimed value minus the worst payoff the Hider's
    strategy can be held to; ``searcher_gap`` is the best payoff any Hider
    response extracts from the Searcher's strategy minus the claimed value.
    Both are zero for an exact optimal pair.  ``oracle_value`` is the linear
    programming value for finite games and ``None`` for continuous ones,
    where the two guarantees bracket the value instead.
    """

    claimed_value: object
    oracle_value: object
    hider_gap: object
    searcher_gap: object
    hider_guarantee: object
    searcher_guarantee: object
    hider_response: object
    searcher_response: object
    tolerance: object
    passed: bool


def _check_membership(spec: GameSpec, strategy, side: Side) -> None:
    fam = spec.family(side)
    if isinstance(strategy, IndependentSubsets):
        from .model import PowerSet
        if not isinstance(fam, PowerSet) and any(0 < q < 1 for q in strategy.inclusion):
            raise ValueError(f"{side.value} strategy leaves its family")
        return
    for mask, p in strategy.atoms:
        if p > 0 and not family_contains(fam, mask, spec.n):
            raise ValueError(f"{side.value} atom {mask:#b} is not in the {side.value} family")


def verify_solution(spec: GameSpec, solution: Solution, tolerance=None, grid=DEFAULT_GRID,
                    length_grid=None, use_lp: bool = True,
                    limit: Optional[int] = None) -> VerificationReport:
    """Check that a claimed solution is optimal.

    Finite games: exact best responses on both sides plus the LP value,
    default tolerance 0.  Continuous games: best responses over grid arcs
    (step ``grid``, lengths on ``length_grid`` for free-length players) plus
    arcs aligned with the opponent's support endpoints, default tolerance
    ``1e-6``.
    """
    claimed = solution.value
    if spec.domain is Domain.FINITE:
        tol = 0 if tolerance is None else as_rational(tolerance)
        _check_membership(spec, solution.hider, Side.HIDER)
        _check_membership(spec, solution.searcher, Side.SEARCHER)
        if use_lp:
            _check_size(spec, limit)
        s_resp, lower = best_response(spec, solution.hider, Side.SEARCHER, limit)
        h_resp, upper = best_response(spec, solution.searcher, Side.HIDER, limit)
        oracle_value = None
        if use_lp:
            oracle_value, _, _ = solve_matrix_game(build_payoff_matrix(spec, limit))
        hider_gap = claimed - lower
        searcher_gap = upper - claimed
        passed = hider_gap <= tol and searcher_gap <= tol
        if oracle_value is not None:
            passed = passed and abs(claimed - oracle_value) <= tol
        return VerificationReport(claimed, oracle_value, hider_gap, searcher_gap, lower, upper,
                                  h_resp, s_resp, tol, bool(passed))

    tol = CONTINUOUS_TOL if tolerance is None else float(tolerance)
    s_starts, s_lengths = _candidate_arcs(spec, spec.searcher, solution.hider, grid, length_grid)
    h_starts, h_lengths = _candidate_arcs(spec, spec.hider, solution.searcher, grid, length_grid)
    vs_h = _expected_against(spec, solution.hider, s_starts, s_lengths, cand_is_hider=False)
    vs_s = _expected_against(spec, solution.searcher, h_starts, h_lengths, cand_is_hider=True)
    i, j = int(np.argmin(vs_h)), int(np.argmax(vs_s))
    lower, upper = float(vs_h[i]), float(vs_s[j])
    hider_gap = float(claimed) - lower
    searcher_gap = upper - float(claimed)
    passed = hider_gap <= tol and searcher_gap <= tol
    return VerificationReport(claimed, None, hider_gap, searcher_gap, lower, upper,
                              Arc(float(h_starts[j]), float(h_lengths[j])),
                              Arc(float(s_starts[i]), float(s_lengths[i])), tol, bool(passed))

