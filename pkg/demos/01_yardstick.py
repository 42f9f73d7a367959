"""Counting to a tower of twos with a stack.

A counter program that may count up to 2⇑n is simulated by an SVAS, which
has no zero tests. The trick is a family of gadgets Dec_k that decrement a
counter s.k exactly 2⇑k times. This script builds the stand-alone harness
for each Dec_k, runs it along its canonical (annotated) path, and then
checks exhaustively that no other accepting run can cheat.
"""

from svasreach.execution import SearchLimits, accepting_tallies, count_events, run_policy
from svasreach.yardstick import PairInvariant, emit_dec_harness, tetration

print("2⇑k for k = 0..4:", [tetration(2, k).value for k in range(5)])
print()

for k in (1, 2, 3):
    unit = emit_dec_harness(k)
    s = unit.levelmap[k].scratch[0]
    inv = PairInvariant(unit)
    t = run_policy(unit.program, unit.annotations, 1_000_000, observe=inv)
    print(f"Dec_{k} harness: {len(unit.program)} commands, honest run {t.outcome.value} "
          f"after {t.length} steps, {s} decremented {count_events(t, s)[1]} times, "
          f"{len(inv.violations)} pair-sum violations")

print()
print("Where the commands of the level-2 harness come from (first lines of the source map):")
unit = emit_dec_harness(2)
print("\n".join(unit.sourcemap_text().splitlines()[:12]))
print("...")
print()

# Every accepting run, not just the honest one: product of the configuration
# graph with a tally of decrements of s.k inside the Dec_k body.
for k in (1, 2):
    unit = emit_dec_harness(k)
    s = unit.levelmap[k].scratch[0]
    limits = SearchLimits(max_counter=tetration(2, k).value + 1)
    ex = accepting_tallies(unit.program, s, unit.body(k), limits)
    print(f"Dec_{k}: explored {ex.stats.explored} configurations (closed={ex.closed}); "
          f"decrement counts over all accepting runs: {sorted(ex.tallies)}")
