"""Exhaustive enumeration of valid plans, the ground truth for small instances."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .exceptions import EnumerationLimitExceeded
from .model import Instance, Plan, social_welfare


@dataclass(frozen=True)
class EnumerationGuard:
    max_nodes: int = 10
    max_ads: int = 8
    max_plans: int = 2_000_000

    def check(self, instance: Instance) -> None:
        n, a = instance.num_nodes, instance.num_ads
        if n > self.max_nodes or a > self.max_ads or (a + 1) ** n > self.max_plans:
            raise EnumerationLimitExceeded(
                f"refusing to enumerate (|A|+1)^|N| = {a + 1}^{n} plans "
                f"(limits: {self.max_nodes} nodes, {self.max_ads} ads, {self.max_plans} plans)"
            )


DEFAULT_GUARD = EnumerationGuard()


def iter_valid_plans(instance: Instance, guard: EnumerationGuard = DEFAULT_GUARD) -> Iterator[Plan]:
    """Every map from nodes to ads (or nothing) that never repeats an ad on a path."""
    guard.check(instance)
    tree = instance.tree
    n_nodes, n_ads = instance.num_nodes, instance.num_ads
    chosen: dict[int, int] = {}

    def on_ancestors(n):
        return {chosen[m] for m in tree.ancestors(n) if m in chosen}

    # node ids are breadth-first, so ancestors are decided before descendants
    def rec(n):
        if n == n_nodes:
            yield Plan(chosen)
            return
        yield from rec(n + 1)
        taken = on_ancestors(n)
        for a in range(n_ads):
            if a in taken:
                continue
            chosen[n] = a
            yield from rec(n + 1)
            del chosen[n]

    yield from rec(0)


def brute_force_restricted(instance: Instance, predicate: Callable[[Plan], bool],
                           guard: EnumerationGuard = DEFAULT_GUARD) -> tuple[Plan, float]:
    """Welfare argmax over the valid plans accepted by ``predicate``.

    Ties go to the smaller ``Plan.tie_key``.  If nothing is accepted the
    empty plan is returned with welfare 0.
    """
    best, best_sw = Plan(), 0.0
    found = False
    for plan in iter_valid_plans(instance, guard):
        if not predicate(plan):
            continue
        sw = social_welfare(instance, plan, check=False)
        if not found or sw > best_sw or (sw == best_sw and plan.tie_key() < best.tie_key()):
            best, best_sw, found = plan, sw, True
    return best, best_sw


def brute_force_optimal(instance: Instance, guard: EnumerationGuard = DEFAULT_GUARD) -> tuple[Plan, float]:
    return brute_force_restricted(instance, lambda plan: True, guard)
