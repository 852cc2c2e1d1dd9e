"""Follow the particle between two record events.

Given a start record and a set of final records, each outcome carries a
normalized particle state at every intermediate index. We print where
the particle sits on the cell axis, then show that two final records
which always fire together collapse into a single refined outcome.
"""

import numpy as np

from physborn.born import OutcomeSet
from physborn.measurement import (
    MeasurementProcess,
    kappa_path,
    position_distribution,
    refine_outcomes,
    rho_path,
)
from physborn.scenarios import (
    CELL_NAMES,
    build_redundant_record_experiment,
    build_reference_experiment,
)

exp = build_reference_experiment()
outcomes = OutcomeSet((exp.predicate("Fup"), exp.predicate("Fdown")), exp.T1)
proc = MeasurementProcess(exp.model, exp.fam, exp.predicate("I"), exp.T0,
                          outcomes)

path = kappa_path(proc, 0)
dist = position_distribution(path, exp.position_cells)
print("cell occupation for the F_up outcome:")
header = "  ".join(f"{n:>8s}" for n in CELL_NAMES)
print("        " + header)
for row, t in zip(dist, ("t0", "t1")):
    print(f"  {t}  " + "  ".join(f"{x:8.4f}" for x in row))
print()

rho = rho_path(path)
print("trace of rho at each index:",
      [round(float(np.trace(rho.at(k)).real), 6)
       for k in range(proc.k1, proc.k2 + 1)])
print()

# two redundant final records: identical particle histories, one class
rr = build_redundant_record_experiment()
rproc = MeasurementProcess(
    rr.model, rr.fam, rr.predicates["I"], 1,
    OutcomeSet((rr.predicates["Fab"], rr.predicates["Fdown"]), 2),
)
refined = refine_outcomes(rproc)
print("refined outcome classes (record labels grouped by history):")
for i, classes in enumerate(refined.classes):
    print(f"  outcome {i}: {[sorted(c) for c in classes]}")
