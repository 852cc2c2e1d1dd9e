"""Why the unamended two-time rule gets retrodiction wrong.

A particle that fired the first detector goes on to fire the second one
with certainty, yet the unamended rule assigns that inference a small
probability. Conditioning on the physically occupied subspace repairs
both the forward and the backward statement.
"""

from physborn.scenarios import intro_inconsistency_demo

report = intro_inconsistency_demo()

print("unamended retrodiction P(I at t0 | F_up at t1) =",
      f"{report.textbook_retrodiction:.6f}")
print("amended   retrodiction P(I at t0 | F_up at t1) =",
      f"{report.amended_retrodiction:.6f}")
print("amended   forward      P(F_up at t1 | I at t0) =",
      f"{report.amended_forward:.6f}")
print()

print("microstates compatible with record I at t0:")
for m in report.microstates:
    print(f"  weight {m.weight:.4f}  ->  P(F_up) = {m.probability:.4f}")
print()

if report.both_relations_restored:
    print("amended rule restores certainty backward and 1/2 forward")
else:
    print("inconsistency persists (unexpected)")
