"""
Clarke payments and why misreporting does not pay
=================================================

Runs the payment rule on a small random instance, then lets one advertiser
shade its bid over a grid and compares its utility with the truthful one.
The fatigue-blind assignment is rejected: it is not monotone in the bids.
"""

import numpy as np

from geoad import SolveOptions, named_fixture, random_small_instance, run_mechanism, utility
from geoad.mechanism import NotTruthfulError

############################################################
# Both ads shown at lambda = 1: ad 1 pays what ad 0 loses by its presence

out = run_mechanism(named_fixture("table1a", lam=1.0))
print(out.plan, out.transfers)

############################################################
# Misreports by advertiser 0 on a random instance

inst = random_small_instance(7, 4, 4)
truth = inst.rewards
honest = utility(run_mechanism(inst), 0, truth[0])
gains = []
for lie in np.linspace(0, 2 * truth[0], 25):
    reports = truth.copy()
    reports[0] = lie
    gains.append(utility(run_mechanism(inst, reports, ads=[0]), 0, truth[0]) - honest)
print("truthful utility", round(honest, 4))
print("largest gain from lying", max(gains))

############################################################
# The same rule on a capped allocator, and the one that is refused

print(run_mechanism(inst, algorithm="fa", opts=SolveOptions(mbar=2)).transfers)
try:
    run_mechanism(inst, algorithm="fa2")
except NotTruthfulError as exc:
    print("refused:", exc)
