"""Simplex solver for finite zero-sum matrix games.

The game ``max_x min_y x^T A y`` is shifted to a strictly positive matrix ``B``
and solved as the linear program

    maximise  sum(y)  subject to  B y <= 1,  y >= 0,

whose dual carries the row player's strategy.  The slack basis is feasible,
so no phase one is needed.

Exact mode pivots a condensed (Tucker) tableau with integer-preserving
(Bareiss) updates: every entry stays an integer and the previous pivot
divides each update exactly, so no fractions are ever formed.  For large
matrices a float64 run of the same pivoting finds a candidate optimal basis,
which is then certified in exact arithmetic by solving the small square system
it induces and checking primal and dual feasibility against the whole matrix.
If certification fails the exact pivoting runs from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

# Dantzig's rule, switching to Bland's rule after this many degenerate pivots in a row
_DEGENERATE_STREAK = 50
_FLOAT_EPS = 1e-9
EXACT_PIVOT_MAX_ENTRIES = 1 << 16


class LPError(RuntimeError):
    pass


@dataclass(frozen=True)
class GameSolution:
    value: object
    row_mix: tuple
    col_mix: tuple


def to_integer_matrix(entries) -> tuple[np.ndarray, int]:
    """Scale a rational matrix to integers: returns ``(N, d)`` with ``entries == N / d``."""
    arr = np.asarray(entries, dtype=object)
    if arr.ndim != 2 or 0 in arr.shape:
        raise ValueError("payoff matrix must be a non-empty 2-d array")
    fr = np.vectorize(Fraction, otypes=[object])(arr)
    d = 1
    for x in fr.flat:
        d = lcm(d, x.denominator)
    num = np.vectorize(lambda x: x.numerator * (d // x.denominator), otypes=[object])(fr)
    return num, d


def _positive_shift(num: np.ndarray) -> tuple[np.ndarray, int]:
    shift = 1 - min(0, int(num.min()))
    return num + shift, shift


def _entering(obj, nonbasic, bland: bool):
    if bland:
        best = None
        for j in np.flatnonzero(obj < 0):
            if best is None or nonbasic[j] < nonbasic[best]:
                best = j
        return best
    j = int(np.argmin(obj))
    return j if obj[j] < 0 else None


def _leaving(rhs, col, basic, bland: bool, exact: bool):
    rows = np.flatnonzero(col > (0 if exact else _FLOAT_EPS))
    if rows.size == 0:
        raise LPError("unbounded program; the positive shift should prevent this")
    if exact:
        ratios = [Fraction(int(rhs[i]), int(col[i])) for i in rows]
        best = min(ratios)
        ties = [i for i, r in zip(rows, ratios) if r == best]
    else:
        ratios = rhs[rows] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + _FLOAT_EPS]
    if bland or len(ties) > 1:
        return min(ties, key=lambda i: basic[i])
    return ties[0]


def _pivot_loop(B: np.ndarray, exact: bool, max_pivots: int | None = None):
    """Run simplex on ``max 1^T y, B y <= 1``.  Returns the final tableau data."""
    m, n = B.shape
    T = np.empty((m + 1, n + 1), dtype=object if exact else float)
    T[0, 0] = 0
    T[0, 1:] = -1
    T[1:, 0] = 1
    T[1:, 1:] = B
    # labels: 0..n-1 are the column variables y_j, n..n+m-1 the row slacks
    basic = list(range(n, n + m))
    nonbasic = list(range(n))
    D = 1
    streak = 0
    pivots = 0
    while True:
        bland = streak >= _DEGENERATE_STREAK
        obj = T[0, 1:]
        if not exact:
            obj = np.where(np.abs(obj) < _FLOAT_EPS, 0.0, obj)
        s = _entering(obj, nonbasic, bland)
        if s is None:
            break
        r = _leaving(T[1:, 0], T[1:, s + 1], basic, bland, exact)
        s += 1
        r += 1
        p = T[r, s]
        streak = streak + 1 if T[r, 0] == 0 or (not exact and abs(T[r, 0]) < _FLOAT_EPS) else 0
        row = T[r].copy()
        col = T[:, s].copy()
        if exact:
            T = (p * T - np.outer(col, row)) // D
            T[r] = row
            T[:, s] = -col
            T[r, s] = D
            D = p
        else:
            T = T - np.outer(col, row) / p
            T[r] = row / p
            T[:, s] = -col / p
            T[r, s] = 1.0 / p
        basic[r - 1], nonbasic[s - 1] = nonbasic[s - 1], basic[r - 1]
        pivots += 1
        if max_pivots is not None and pivots > max_pivots:
            raise LPError("pivot limit exceeded")
    return T, D, basic, nonbasic


def _exact_solution(B: np.ndarray) -> tuple[Fraction, list, list]:
    m, n = B.shape
    T, D, basic, nonbasic = _pivot_loop(B, exact=True)
    z = int(T[0, 0])  # = D * sum(y) = D / value(B)
    x = [Fraction(0)] * m
    y = [Fraction(0)] * n
    for j, lab in enumerate(nonbasic):
        if lab >= n:
            x[lab - n] = Fraction(int(T[0, j + 1]), D)
    for i, lab in enumerate(basic):
        if lab < n:
            y[lab] = Fraction(int(T[i + 1, 0]), D)
    return Fraction(D, z), x, y


def _solve_square(M: list[list[Fraction]], rhs: list[Fraction]):
    """Gauss-Jordan over the rationals; ``None`` if singular."""
    k = len(M)
    A = [list(row) + [b] for row, b in zip(M, rhs)]
    for col in range(k):
        piv = next((r for r in range(col, k) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [v / pv for v in A[col]]
        for r in range(k):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[r][k] for r in range(k)]


def _certify_basis(B: np.ndarray, basic, nonbasic):
    """Exact solution for a candidate basis, or ``None`` if it is not optimal."""
    m, n = B.shape
    cols = [lab for lab in basic if lab < n]
    rows = [lab - n for lab in nonbasic if lab >= n]
    if len(cols) != len(rows) or not cols:
        return None
    sub = [[Fraction(int(B[i, j])) for j in cols] for i in rows]
    ones = [Fraction(1)] * len(cols)
    y = _solve_square(sub, ones)
    x = _solve_square([list(r) for r in zip(*sub)], ones)
    if y is None or x is None or min(y) < 0 or min(x) < 0:
        return None
    # common-denominator integer checks against the full matrix
    dy = lcm(*(v.denominator for v in y))
    yn = np.array([int(v * dy) for v in y], dtype=object)
    if np.any(B[:, cols].dot(yn) > dy):
        return None
    dx = lcm(*(v.denominator for v in x))
    xn = np.array([int(v * dx) for v in x], dtype=object)
    if np.any(xn.dot(B[rows, :]) < dx):
        return None
    total = sum(y)
    if total != sum(x):
        return None
    xf = [Fraction(0)] * m
    yf = [Fraction(0)] * n
    for i, v in zip(rows, x):
        xf[i] = v
    for j, v in zip(cols, y):
        yf[j] = v
    return 1 / total, xf, yf


def solve_exact(entries, strategy: str = "auto") -> GameSolution:
    """Exact value and optimal mixes of a rational matrix game.

    ``strategy`` is ``"pivot"`` (integer pivoting throughout), ``"certify"``
    (float basis plus exact certificate, pivoting only on failure) or
    ``"auto"`` which picks by matrix size.
    """
    num, scale = to_integer_matrix(entries)
    return solve_integer(num, scale, strategy)


def solve_integer(num: np.ndarray, scale: int = 1, strategy: str = "auto") -> GameSolution:
    """As :func:`solve_exact` for the matrix ``num / scale`` with integer ``num``."""
    num = np.asarray(num).astype(object)
    B, shift = _positive_shift(num)
    if strategy == "auto":
        strategy = "pivot" if B.size <= EXACT_PIVOT_MAX_ENTRIES else "certify"
    if strategy not in ("pivot", "certify"):
        raise ValueError(f"unknown strategy {strategy!r}")
    result = None
    if strategy == "certify":
        try:
            _, _, basic, nonbasic = _pivot_loop(B.astype(float), exact=False,
                                                max_pivots=50 * sum(B.shape))
            result = _certify_basis(B, basic, nonbasic)
        except LPError:
            result = None
    if result is None:
        result = _exact_solution(B)
    vB, x, y = result
    value = (vB - shift) / scale
    row = tuple(v * vB for v in x)
    col = tuple(v * vB for v in y)
    return GameSolution(value, row, col)


def solve_float(entries) -> GameSolution:
    """Floating-point value and mixes; accurate to roughly 1e-9."""
    A = np.asarray(entries, dtype=float)
    if A.ndim != 2 or 0 in A.shape:
        raise ValueError("payoff matrix must be a non-empty 2-d array")
    shift = 1.0 - min(0.0, float(A.min()))
    B = A + shift
    m, n = B.shape
    T, _, basic, nonbasic = _pivot_loop(B, exact=False, max_pivots=200 * (m + n))
    z = T[0, 0]
    x = np.zeros(m)
    y = np.zeros(n)
    for j, lab in enumerate(nonbasic):
        if lab >= n:
            x[lab - n] = T[0, j + 1]
    for i, lab in enumerate(basic):
        if lab < n:
            y[lab] = T[i + 1, 0]
    row = np.clip(x / z, 0, None)
    col = np.clip(y / z, 0, None)
    return GameSolution(1.0 / z - shift, tuple(row / row.sum()), tuple(col / col.sum()))
