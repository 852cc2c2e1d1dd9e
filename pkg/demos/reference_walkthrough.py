"""Walk through the built-in double Stern-Gerlach model step by step.

The apparatus keeps a record register (ready, blocked, I, F_up, F_down)
entangled with a spin-1/2 particle moving through five cells. We
condition on records at different times and read off probabilities.
"""

from physborn.born import OutcomeSet, prob_approx, prob_forward
from physborn.measurement import MeasurementProcess, outcome_probability
from physborn.scenarios import RECORD_NAMES, build_reference_experiment

exp = build_reference_experiment()
print("system sizes: d1 =", exp.model.d1, " d2 =", exp.model.d2)
print("grid indices: t_s =", exp.T_S, " t0 =", exp.T0, " t1 =", exp.T1)
print()

# forward: given the first detector fired, the second fires half the time
cond_i = exp.condition("I", exp.T0)
p = prob_forward(cond_i, exp.predicate("Fup"), exp.T1)
print("P(F_up at t1 | I at t0)  =", f"{p.value:.6f}")

# backward: given the second detector fired, the first certainly did
cond_f = exp.condition("Fup", exp.T1)
q = prob_approx(cond_f, exp.predicate("I"), exp.T0)
print("P(I at t0 | F_up at t1)  =", f"{q.value:.6f}")
print()

# a complete measurement starting from the ready record at the source
outcomes = OutcomeSet(
    tuple(exp.predicate(n) for n in RECORD_NAMES), exp.T1, complete=True
)
proc = MeasurementProcess(exp.model, exp.fam, exp.predicate("ready"),
                          exp.T_S, outcomes)
print("record distribution at t1, starting from ready at t_s:")
for i, name in enumerate(RECORD_NAMES):
    print(f"  {name:8s} {outcome_probability(proc, i):.4f}")
