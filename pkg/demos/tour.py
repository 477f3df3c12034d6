"""A short walk through the library: closed forms, the LP oracle and simulation."""
from fractions import Fraction as F

from alignment_games import (
    FixedCardinality, FixedLength, GameSpec, MixedStrategy, Arc, Solution,
    estimate_payoff, solve, verify_solution,
)
from alignment_games.continuous import solve_interval_both_fixed


def show(title, spec):
    sol = solve(spec)
    rep = verify_solution(spec, sol)
    print(f"{title}: value {sol.value} ({sol.provenance}); verified={rep.passed}")
    return sol


show("circle, c=1, pi=3, free lengths", GameSpec.circle(1, 3))
show("power set, c=(2,1), pi=(1,1)", GameSpec.finite([2, 1], [1, 1]))
show("hider picks 2 of (4,3,2,1)", GameSpec.finite([4, 3, 2, 1], hider=FixedCardinality(2)))
show("single picks, (10,5,2,1)",
     GameSpec.finite([10, 5, 2, 1], hider=FixedCardinality(1), searcher=FixedCardinality(1)))

# Interval, both arcs of length 2/5.  Mixing the evenly spaced covering
# arcs is not enough for the hider; the returned chain mix is.
alpha = F(2, 5)
spec = GameSpec.interval(hider=FixedLength(alpha), searcher=FixedLength(alpha))
sol, data = solve_interval_both_fixed(alpha)
cover = MixedStrategy.uniform([Arc(x, alpha) for x in data.cover_points])
naive = verify_solution(spec, Solution(cover, sol.searcher, sol.value, "cover"))
good = verify_solution(spec, sol)
print(f"interval alpha=2/5: value {sol.value}")
print(f"  covering mix {[str(x) for x in data.cover_points]}: hider gap {float(naive.hider_gap):.4f}")
print(f"  chain mix {[(str(a.start), str(p)) for a, p in sol.hider.atoms]}: "
      f"hider gap {float(good.hider_gap):.1e}")

res = estimate_payoff(spec, sol.hider, sol.searcher, 1_000_000, seed=1)
print(f"  simulated mean {res.mean:.5f} +- {res.std_error:.5f}")
