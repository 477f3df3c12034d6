"""Seeded Monte-Carlo estimates of expected payoffs.

Trials are grouped in fixed blocks of ``BLOCK`` draws.  Block ``b`` takes its
random numbers from ``PCG64(SeedSequence(seed, spawn_key=(b,)))``, drawing the
Hider's uniforms first and then the Searcher's, so any schedule that
evaluates the same blocks reproduces the result bit for bit.  Mixed
strategies are sampled by inverse CDF over their atoms in listed order.

Finite-game payoffs are accumulated as exact integers (the payoff table is
scaled to a common denominator), so the mean and standard error of a
degenerate pair are exact.  Continuous payoffs are combined block by block
with Chan's pairwise update.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (
    Arc,
    Domain,
    GameSpec,
    IndependentSubsets,
    MixedStrategy,
    UniformStartArc,
    arc_payoff_array,
)

BLOCK = 1 << 16
_SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    mean: float
    std_error: float
    seed: int
    spec_digest: str


def spec_digest(spec: GameSpec) -> str:
    """Short stable identifier of a game configuration."""
    return hashlib.sha256(repr(spec).encode()).hexdigest()[:16]


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _atom_sampler(strategy: MixedStrategy):
    cum = np.cumsum([float(p) for _, p in strategy.atoms])
    cum[-1] = np.inf  # absorbs rounding in the last step

    def draw(rng, size):
        return np.searchsorted(cum, rng.random(size), side="right")
    return draw


def _as_pure_strategy(x, finite: bool):
    if finite and isinstance(x, int) and not isinstance(x, bool):
        return MixedStrategy.point(x)
    if not finite and isinstance(x, Arc):
        return MixedStrategy.point(x)
    return x


# ---------------------------------------------------------------------------
# finite games

def _subset_sampler(strategy, n: int):
    """Return ``draw(rng, size) -> bool array (size, n)`` of chosen locations."""
    if isinstance(strategy, IndependentSubsets):
        if strategy.n != n:
            raise ValueError("strategy and game disagree on the number of locations")
        q = np.array([float(v) for v in strategy.inclusion])
        return lambda rng, size: rng.random((size, n)) < q
    if not isinstance(strategy, MixedStrategy) or not strategy.is_subset_strategy:
        raise TypeError("finite games need subset strategies")
    masks = np.array([m for m, _ in strategy.atoms], dtype=np.int64)
    if np.any(masks >> n):
        raise ValueError("atom reaches beyond the ground set")
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    pick = _atom_sampler(strategy)
    return lambda rng, size: bits[pick(rng, size)]


def _finite_sums(spec: GameSpec, h, s, trials: int, seed: int):
    n, prof = spec.n, spec.profile
    vals = list(prof.costs) + list(prof.penalties)
    d = math.lcm(*(v.denominator for v in vals))
    c = np.array([int(v * d) for v in prof.costs], dtype=np.int64)
    pi = np.array([int(v * d) for v in prof.penalties], dtype=np.int64)
    if int(c.sum() + pi.sum()) ** 2 * BLOCK >= 1 << 63:
        raise OverflowError("cost scale too large for exact integer accumulation")
    draw_h, draw_s = _subset_sampler(h, n), _subset_sampler(s, n)
    total = 0
    total_sq = 0
    for b, size in _blocks(trials):
        rng = _block_rng(seed, b)
        H = draw_h(rng, size)
        S = draw_s(rng, size)
        pay = (S & ~H).astype(np.int64) @ c + (H & ~S).astype(np.int64) @ pi
        total += int(pay.sum())
        total_sq += int((pay * pay).sum())
    mean = Fraction(total, trials * d)
    if trials > 1:
        var = Fraction(total_sq * trials - total * total, trials * (trials - 1) * d * d)
    else:
        var = Fraction(0)
    return float(mean), math.sqrt(var / trials)


# ---------------------------------------------------------------------------
# continuous games

def _arc_sampler(strategy, domain: Domain):
    if isinstance(strategy, UniformStartArc):
        if domain is not Domain.CIRCLE:
            raise ValueError("uniform-start arcs are only defined on the circle")
        length = float(strategy.length)
        return lambda rng, size: (rng.random(size), np.full(size, length))
    if not isinstance(strategy, MixedStrategy) or strategy.is_subset_strategy:
        raise TypeError("continuous games need arc strategies")
    starts = np.array([float(a.start) for a, _ in strategy.atoms])
    lengths = np.array([float(a.length) for a, _ in strategy.atoms])
    pick = _atom_sampler(strategy)

    def draw(rng, size):
        idx = pick(rng, size)
        return starts[idx], lengths[idx]
    return draw


def _continuous_sums(spec: GameSpec, h, s, trials: int, seed: int):
    draw_h, draw_s = _arc_sampler(h, spec.domain), _arc_sampler(s, spec.domain)
    c, pi = spec.profile.cost, spec.profile.penalty
    count, mean, m2 = 0, 0.0, 0.0
    for b, size in _blocks(trials):
        rng = _block_rng(seed, b)
        hs, hl = draw_h(rng, size)
        ss, sl = draw_s(rng, size)
        pay = arc_payoff_array(spec.domain, c, pi, hs, hl, ss, sl)
        bmean = float(pay.mean())
        bm2 = float(((pay - bmean) ** 2).sum())
        new = count + size
        delta = bmean - mean
        mean += delta * size / new
        m2 += bm2 + delta * delta * count * size / new
        count = new
    var = m2 / (trials - 1) if trials > 1 else 0.0
    return mean, math.sqrt(var / trials)


def _blocks(trials: int):
    b = 0
    done = 0
    while done < trials:
        size = min(BLOCK, trials - done)
        yield b, size
        done += size
        b += 1


def estimate_payoff(spec: GameSpec, h, s, trials: int, seed: int) -> SimulationResult:
    """Estimate the expected payoff of ``h`` against ``s`` from ``trials`` seeded draws.

    ``std_error`` is the sample standard deviation over ``sqrt(trials)``.
    """
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    trials, seed = int(trials), int(seed)
    finite = spec.domain is Domain.FINITE
    h = _as_pure_strategy(h, finite)
    s = _as_pure_strategy(s, finite)
    if finite:
        mean, se = _finite_sums(spec, h, s, trials, seed)
    else:
        mean, se = _continuous_sums(spec, h, s, trials, seed)
    return SimulationResult(trials, mean, se, seed, spec_digest(spec))
