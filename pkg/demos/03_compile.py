"""From counter programs to SVAS, checked against a direct simulation.

Each bundled counter program is compiled at levels n = 1, 2, 3. The compiled
SVAS should have an accepting run exactly when the original halts without
any counter exceeding 2⇑n. Levels 1 and 2 are decided by exhaustive search;
level 3 is checked along the honest path given by the choice annotations.
"""

from svasreach.corpus import counter_programs
from svasreach.counterprog import bounded_halting, halts
from svasreach.execution import Reachable, SearchLimits, run_policy, search_reach
from svasreach.yardstick import compile_program, tetration

print(f"{'program':16s} " + " ".join(f"{'n=' + str(n):>25s}" for n in (1, 2, 3)))
for name, cp in counter_programs().items():
    cells = []
    for n in (1, 2, 3):
        oracle = bounded_halting(cp, tetration(2, n).value)
        unit = compile_program(cp, n)
        if n < 3:
            res = search_reach(unit.program, SearchLimits(max_counter=tetration(2, n).value + 1))
            got = isinstance(res, Reachable)
        else:
            got = run_policy(unit.program, unit.annotations, 500_000, record=False).accepted
        mark = "ok" if got == halts(oracle) else "MISMATCH"
        cells.append(f"{type(oracle).__name__:>17s} {mark:>7s}")
    print(f"{name:16s} " + " ".join(cells))

print()
cp = counter_programs()["transfer"]
sizes = [len(compile_program(cp, n).program) for n in range(1, 11)]
print("compiled sizes of 'transfer' for n = 1..10:", sizes)
print("differences:", sorted({b - a for a, b in zip(sizes, sizes[1:])}))
