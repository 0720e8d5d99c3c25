"""Property suites for the payment rule and the allocators.

Each check returns a list of violations (empty means the property held)
so the CLI and the tests can count them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import PreconditionError
from .instances import random_small_instance
from .mechanism import run_mechanism, utility
from .model import Instance, social_welfare
from .oracle import brute_force_optimal
from .solvers import SolveOptions, get_solver

TOL = 1e-9
PROPERTIES = ("dsic", "ir", "wbb", "ae")
DEFAULT_ALGORITHMS = {
    "dsic": ("fe", "fa"),
    "ir": ("fe", "fa"),
    "wbb": ("fe", "fa"),
    "ae": ("fe", "fem", "dpgen"),
}


@dataclass
class Violation:
    prop: str
    algorithm: str
    seed: int | None
    detail: str


@dataclass
class SuiteReport:
    prop: str
    checked: int = 0
    skipped: int = 0  # instances outside a restricted solver's domain
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def suite_instance(seed: int, tree: bool = False) -> Instance:
    """Four advertisers on two to four nodes; ``tree`` gives a random tree shape."""
    return random_small_instance(seed, 4, 2 + seed % 3, tree=tree, zero_prob=0.2 * (seed % 2))


def check_dsic(instance: Instance, algorithm: str, opts: SolveOptions | None = None,
               grid: int = 25) -> list[str]:
    """Compare each advertiser's truthful utility with its utility under
    ``grid`` misreports spread over ``[0, 2 r_a]``."""
    out = []
    truth = instance.rewards
    for a in range(instance.num_ads):
        honest = utility(run_mechanism(instance, truth, algorithm, opts=opts, ads=[a]), a, truth[a])
        for lie in np.linspace(0.0, 2.0 * truth[a], grid):
            reports = truth.copy()
            reports[a] = lie
            u = utility(run_mechanism(instance, reports, algorithm, opts=opts, ads=[a]), a, truth[a])
            if u > honest + TOL * max(1.0, abs(honest)):
                out.append(f"ad {a}: reporting {lie:.6g} instead of {truth[a]:.6g} "
                           f"gains {u - honest:.3g}")
    return out


def check_ir(instance: Instance, algorithm: str, opts: SolveOptions | None = None) -> list[str]:
    outcome = run_mechanism(instance, None, algorithm, opts=opts)
    return [f"ad {a}: utility {utility(outcome, a, r):.6g}"
            for a, r in enumerate(instance.rewards) if utility(outcome, a, r) < -TOL]


def check_wbb(instance: Instance, algorithm: str, opts: SolveOptions | None = None) -> list[str]:
    outcome = run_mechanism(instance, None, algorithm, opts=opts)
    return [f"ad {a}: transfer {t:.6g}" for a, t in outcome.transfers.items() if t < -TOL]


def check_ae(instance: Instance, algorithm: str, opts: SolveOptions | None = None) -> list[str]:
    solver = get_solver(algorithm)
    sw = social_welfare(instance, solver.run(instance, opts or SolveOptions()))
    _, best = brute_force_optimal(instance)
    if sw < best - TOL * max(1.0, best):
        return [f"welfare {sw:.9g} below the optimum {best:.9g}"]
    return []


_CHECKS = {"dsic": check_dsic, "ir": check_ir, "wbb": check_wbb, "ae": check_ae}


def run_suite(prop: str, seeds, algorithms=None, mbar: int = 2) -> SuiteReport:
    """Run one property over seeded small instances and every algorithm."""
    if prop not in _CHECKS:
        raise KeyError(f"unknown property {prop!r}; choose from {PROPERTIES}")
    check = _CHECKS[prop]
    algorithms = DEFAULT_ALGORITHMS[prop] if algorithms is None else algorithms
    opts = SolveOptions(mbar=mbar)
    report = SuiteReport(prop)
    for seed in seeds:
        for alg in algorithms:
            inst = suite_instance(seed, tree=not get_solver(alg).single_path)
            try:
                found = check(inst, alg, opts)
            except PreconditionError:
                report.skipped += 1
                continue
            report.checked += 1
            for detail in found:
                report.violations.append(Violation(prop, alg, seed, detail))
    return report
