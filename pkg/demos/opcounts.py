"""Counted additions and comparisons per SC decode for both engines.

The efficient engine follows 20 n log2 n - 76.5 n + 216 exactly.  For the
straightforward engine the measured count is shown next to the reference
closed form, which it does not match.

Run: python3 demos/opcounts.py
"""
from cvpolar import sim

for mode in ("eff", "sf"):
    print(f"engine {mode}")
    print(f"{'n':>6} {'measured':>10} {'closed form':>12} {'ops/(n log n)':>14}  note")
    for row in sim.opcount_report(16, 4096, mode):
        print(f"{row['n']:>6} {row['measured']:>10} {row['closed_form']:>12} {row['ratio']:>14}  {row['note']}")
    print()
