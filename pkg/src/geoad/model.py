"""Domain types and the welfare formulas every solver shares.

Ads are identified by their 0-based index in ``Instance.advertisers``.
A plan maps tree nodes to ad indices; a node absent from the plan carries
the empty ad.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .exceptions import InvalidPlanError
from .tree import PathTree

EMPTY_AD = -1


@dataclass(frozen=True)
class Advertiser:
    reward: float
    qualities: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.reward) and self.reward >= 0):
            raise ValueError(f"reward must be finite and nonnegative, got {self.reward}")
        for n, q in self.qualities.items():
            if not 0.0 <= q <= 1.0:
                raise ValueError(f"quality at node {n} outside [0, 1]: {q}")

    def quality(self, n: int) -> float:
        return self.qualities.get(n, 0.0)


@dataclass(frozen=True)
class FatigueModel:
    lambdas: tuple[float, ...]

    def __init__(self, lambdas: Iterable[float]):
        object.__setattr__(self, "lambdas", tuple(float(x) for x in lambdas))
        for lam in self.lambdas:
            if not 0.0 <= lam <= 1.0:
                raise ValueError(f"continuation probability outside [0, 1]: {lam}")

    @classmethod
    def constant(cls, lam: float, length: int) -> "FatigueModel":
        return cls([lam] * length)

    def __len__(self) -> int:
        return len(self.lambdas)

    @cached_property
    def cumulative(self) -> np.ndarray:
        """Array ``[Λ_0, Λ_1, ..., Λ_L]`` of aggregated continuation probabilities."""
        out = np.ones(len(self.lambdas) + 1)
        acc = 1.0
        for i, lam in enumerate(self.lambdas, start=1):
            acc *= lam
            out[i] = acc
        return out


def aggregated_continuation(fatigue: FatigueModel, c: int) -> float:
    """Probability the user still pays attention after ``c`` earlier ads."""
    if not 0 <= c <= len(fatigue):
        raise ValueError(f"ad count {c} outside [0, {len(fatigue)}]")
    return float(fatigue.cumulative[c])


class Plan:
    """Immutable sparse map from tree node to ad index."""

    __slots__ = ("_items", "_map")

    def __init__(self, assignment: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        pairs = assignment.items() if isinstance(assignment, Mapping) else assignment
        m = {}
        for n, a in pairs:
            n, a = int(n), int(a)
            if a == EMPTY_AD:
                continue
            m[n] = a
        self._map = m
        self._items = tuple(sorted(m.items()))

    def __getitem__(self, n: int) -> int:
        return self._map[n]

    def get(self, n: int, default: int = EMPTY_AD) -> int:
        return self._map.get(n, default)

    def __contains__(self, n) -> bool:
        return n in self._map

    def __len__(self) -> int:
        return len(self._map)

    def __iter__(self) -> Iterator[int]:
        return iter(n for n, _ in self._items)

    def items(self) -> tuple[tuple[int, int], ...]:
        return self._items

    def nodes(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self._items)

    def ads(self) -> set[int]:
        return set(self._map.values())

    def as_dict(self) -> dict[int, int]:
        return dict(self._items)

    def tie_key(self) -> tuple:
        """Report-independent ordering used to break welfare ties: fewer ads,
        then the lexicographically smallest node set, then smallest ads."""
        return (len(self._items), self.nodes(), tuple(a for _, a in self._items))

    def __eq__(self, other) -> bool:
        return isinstance(other, Plan) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        return f"Plan({dict(self._items)})"


@dataclass(frozen=True)
class Instance:
    advertisers: tuple[Advertiser, ...]
    fatigue: FatigueModel
    tree: PathTree

    def __post_init__(self):
        object.__setattr__(self, "advertisers", tuple(self.advertisers))
        if len(self.fatigue) < self.tree.max_depth:
            raise ValueError(
                f"fatigue model has {len(self.fatigue)} entries but the longest "
                f"path has {self.tree.max_depth} nodes"
            )

    @property
    def num_ads(self) -> int:
        return len(self.advertisers)

    @property
    def num_nodes(self) -> int:
        return len(self.tree)

    @cached_property
    def rewards(self) -> np.ndarray:
        return np.array([adv.reward for adv in self.advertisers], dtype=float)

    @cached_property
    def qualities(self) -> np.ndarray:
        """Dense ``(num_ads, num_nodes)`` quality matrix; missing entries are 0."""
        q = np.zeros((self.num_ads, self.num_nodes))
        for a, adv in enumerate(self.advertisers):
            for n, val in adv.qualities.items():
                if 0 <= n < self.num_nodes:
                    q[a, n] = val
        return q

    @cached_property
    def values(self) -> np.ndarray:
        """Expected value ``r_a * q_{a,n}`` of ad ``a`` at node ``n`` as first ad."""
        return self.rewards[:, None] * self.qualities

    @cached_property
    def alphas(self) -> np.ndarray:
        return np.array(self.tree.alphas)

    @property
    def continuation(self) -> np.ndarray:
        return self.fatigue.cumulative

    def with_rewards(self, rewards: Sequence[float]) -> "Instance":
        if len(rewards) != self.num_ads:
            raise ValueError(f"expected {self.num_ads} rewards, got {len(rewards)}")
        advs = tuple(Advertiser(float(r), adv.qualities) for r, adv in zip(rewards, self.advertisers))
        return Instance(advs, self.fatigue, self.tree)

    def without_ad(self, a: int) -> "Instance":
        """Catalog with advertiser ``a`` removed; later ads shift down by one."""
        if not 0 <= a < self.num_ads:
            raise KeyError(f"unknown ad {a}")
        advs = self.advertisers[:a] + self.advertisers[a + 1:]
        return Instance(advs, self.fatigue, self.tree)


def prefix_count(plan: Plan, tree: PathTree, n: int) -> int:
    """Number of non-empty ads on the strict ancestors of ``n``."""
    return sum(1 for m in tree.ancestors(n) if m in plan)


class Violation(NamedTuple):
    kind: str  # "repeat", "unknown-node" or "unknown-ad"
    path: int | None
    ad: int | None
    nodes: tuple[int, ...]


def validate_plan(instance: Instance, plan: Plan) -> list[Violation]:
    out = []
    for n, a in plan.items():
        if not 0 <= n < instance.num_nodes:
            out.append(Violation("unknown-node", None, a, (n,)))
        if not 0 <= a < instance.num_ads:
            out.append(Violation("unknown-ad", None, a, (n,)))
    for p, (_, seq) in enumerate(instance.tree.paths):
        seen: dict[int, list[int]] = {}
        for n in seq:
            a = plan.get(n)
            if a != EMPTY_AD:
                seen.setdefault(a, []).append(n)
        for a, where in seen.items():
            if len(where) > 1:
                out.append(Violation("repeat", p, a, tuple(where)))
    return out


def _check(instance: Instance, plan: Plan) -> None:
    bad = validate_plan(instance, plan)
    if bad:
        raise InvalidPlanError(bad)


def vtr(instance: Instance, plan: Plan, a: int, check: bool = True) -> float:
    """Visit-through rate of ad ``a`` under ``plan``."""
    if check:
        _check(instance, plan)
    tree = instance.tree
    total = 0.0
    for n, ad in plan.items():
        if ad == a:
            c = prefix_count(plan, tree, n)
            total += tree.alpha(n) * aggregated_continuation(instance.fatigue, c) * instance.advertisers[a].quality(n)
    return total


def social_welfare(instance: Instance, plan: Plan, check: bool = True) -> float:
    """Expected total reward, evaluated node by node."""
    if check:
        _check(instance, plan)
    tree = instance.tree
    total = 0.0
    for n, a in plan.items():
        c = prefix_count(plan, tree, n)
        adv = instance.advertisers[a]
        total += tree.alpha(n) * aggregated_continuation(instance.fatigue, c) * adv.quality(n) * adv.reward
    return total


def vtrs(instance: Instance, plan: Plan, check: bool = True) -> dict[int, float]:
    if check:
        _check(instance, plan)
    return {a: vtr(instance, plan, a, check=False) for a in range(instance.num_ads)}
