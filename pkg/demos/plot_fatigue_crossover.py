"""
When is a second ad worth showing?
==================================

Two ads, two nodes.  Ad 1 is worth 1 at the first node and 2 at the second,
ad 2 is worth 2 and 4.  Showing both costs the second one a factor lambda
of attention, so below some lambda the best plan shows only ad 2.
"""

import numpy as np

from geoad import f_e, named_fixture, social_welfare

############################################################
# Sweep lambda and record the optimal plan and its welfare

lams = np.round(np.linspace(0.5, 1.0, 11), 2)
for lam in lams:
    inst = named_fixture("table1a", lam=float(lam))
    plan = f_e(inst)
    print(f"lambda={lam:.2f}  plan={plan.as_dict()}  SW={social_welfare(inst, plan):.3f}")

############################################################
# Both ads pay off once 1 + 4*lambda beats 4 alone, i.e. above 0.75

for lam in (0.74, 0.76):
    print(lam, f_e(named_fixture("table1a", lam=lam)).as_dict())
