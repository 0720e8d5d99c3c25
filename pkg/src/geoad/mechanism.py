"""VCG payments with the Clarke pivot over any truthful allocation function.

Advertiser ``a`` pays the welfare the others would get if ``a`` were
removed from the catalog, minus the welfare the others actually get:

    t_a = SW(f(reports without a)) - (SW(plan) - VTR_a(plan) * r_a)

For exact allocators and for maximal-in-range ones (whose range does not
depend on the catalog) this is truthful, individually rational and never
pays advertisers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GeoAdError, PreconditionError
from .model import Instance, Plan, social_welfare, vtrs
from .solvers import FALLBACK, SolveOptions, get_solver

# transfers this close below zero are rounding noise
_TOL = 1e-9


class NotTruthfulError(GeoAdError, ValueError):
    """The allocation function admits no truthful payments."""


@dataclass(frozen=True)
class MechanismOutcome:
    plan: Plan
    transfers: dict[int, float]
    vtrs: dict[int, float]
    sw: float
    algorithm: str

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "plan": {str(n): a for n, a in self.plan.items()},
            "sw": self.sw,
            "vtrs": {str(a): v for a, v in sorted(self.vtrs.items())},
            "transfers": {str(a): t for a, t in sorted(self.transfers.items())},
        }


def _marginal(instance: Instance, algorithm: str, opts: SolveOptions) -> Plan:
    solver = get_solver(algorithm)
    try:
        return solver.run(instance, opts)
    except PreconditionError:
        # dropping an ad can break a restricted solver's precondition; on its
        # domain the restricted solver is exact, so the exact one stands in
        if algorithm not in FALLBACK:
            raise
        return get_solver(FALLBACK[algorithm]).run(instance, opts)


def run_mechanism(instance: Instance, reports=None, algorithm: str = "fe", *,
                  opts: SolveOptions | None = None, fast: bool = False,
                  ads=None) -> MechanismOutcome:
    """Allocate by ``algorithm`` under the reported rewards and charge
    Clarke-pivot transfers.

    ``fast`` skips the marginal solve for advertisers the plan does not use
    (their transfer is 0: removing them leaves the maximum over the same
    range unchanged).  ``ads`` limits the transfers computed to those
    advertisers.
    """
    solver = get_solver(algorithm)
    if not solver.truthful:
        raise NotTruthfulError(
            f"{algorithm} is not monotone in the reports, so no payment rule makes it truthful"
        )
    opts = opts or SolveOptions()
    if reports is not None:
        reports = np.asarray(reports, dtype=float)
        if reports.shape != (instance.num_ads,):
            raise ValueError(f"expected {instance.num_ads} reports, got shape {reports.shape}")
        instance = instance.with_rewards(reports)
    plan = solver.run(instance, opts)
    sw = social_welfare(instance, plan)
    shares = vtrs(instance, plan)
    used = plan.ads()
    transfers = {}
    for a in (range(instance.num_ads) if ads is None else ads):
        if fast and a not in used:
            transfers[a] = 0.0
            continue
        reduced = instance.without_ad(a)
        others_alone = social_welfare(reduced, _marginal(reduced, algorithm, opts))
        t = others_alone - (sw - shares[a] * instance.rewards[a])
        if -_TOL * max(1.0, sw) < t < 0.0:
            t = 0.0
        transfers[a] = float(t)
    return MechanismOutcome(plan, transfers, shares, sw, algorithm)


def utility(outcome: MechanismOutcome, a: int, true_reward: float) -> float:
    """``VTR_a * true_reward - t_a``."""
    if a not in outcome.transfers:
        raise KeyError(f"unknown ad {a}")
    return outcome.vtrs[a] * true_reward - outcome.transfers[a]
