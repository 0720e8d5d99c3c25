"""Allocation functions by name, with a uniform calling convention.

Every entry takes ``(instance, opts)`` and returns a ``Plan``.  ``opts``
carries the knobs some solvers need (``mbar``, ``deadline``, ``budget``,
``force``); the others ignore them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import multi_path, oracle, single_path
from .model import Instance, Plan


@dataclass(frozen=True)
class SolveOptions:
    mbar: int | None = None
    deadline: float | None = None
    budget: int | None = None
    force: bool = False
    max_space_log10: float | None = None


@dataclass(frozen=True)
class Solver:
    name: str
    run: Callable[[Instance, SolveOptions], Plan]
    exact: bool           # returns a welfare maximum
    truthful: bool        # exact or maximal in range: VCG payments apply
    restricted: bool      # only defined on part of the instance space
    needs_mbar: bool = False
    single_path: bool = False
    summary: str = ""


def _need_mbar(opts: SolveOptions) -> int:
    if opts.mbar is None:
        raise ValueError("this algorithm needs --mbar")
    return opts.mbar


def _brute(instance, opts):
    return oracle.brute_force_optimal(instance)[0]


SOLVERS: dict[str, Solver] = {s.name: s for s in (
    Solver("fe", lambda i, o: single_path.f_e(i, o.deadline), True, True, False,
           single_path=True, summary="exact single-path subset search"),
    Solver("dp", lambda i, o: single_path.f_dp_distinct_maximal(i), True, True, True,
           single_path=True, summary="single-path DP, distinct maximal ads only"),
    Solver("dpgen", lambda i, o: single_path.f_dp_general(i), True, True, False,
           single_path=True, summary="single-path DP with conflict enumeration"),
    Solver("fa", lambda i, o: single_path.f_a(i, _need_mbar(o), o.deadline), False, True, False,
           needs_mbar=True, single_path=True, summary="best single-path plan with at most mbar ads"),
    Solver("fa2", lambda i, o: single_path.f_a2(i), False, False, False,
           single_path=True, summary="fatigue-blind assignment (not truthful)"),
    Solver("fem", lambda i, o: multi_path.f_em(i, budget=o.budget, deadline=o.deadline,
                                              max_space_log10=o.max_space_log10, force=o.force),
           True, True, False, summary="exact branch-and-bound over the tree"),
    Solver("fmp", lambda i, o: multi_path.f_mp_plan(i), True, True, True,
           summary="tree DP, no ad maximal twice on a path"),
    Solver("fam", lambda i, o: multi_path.f_am(i, _need_mbar(o), deadline=o.deadline), False, True, False,
           needs_mbar=True, summary="best single path, at most mbar ads"),
    Solver("fam-star", lambda i, o: multi_path.f_am(i, exact_per_path=True, deadline=o.deadline),
           False, True, False, summary="best single path, each solved exactly"),
    Solver("brute", _brute, True, True, False, summary="exhaustive enumeration (tiny instances)"),
)}

# exact solver used when a restricted one does not apply
FALLBACK = {"dp": "fe", "fmp": "fem"}


def get_solver(name: str) -> Solver:
    try:
        return SOLVERS[name]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; choose from {sorted(SOLVERS)}") from None


def solve(instance: Instance, name: str, opts: SolveOptions | None = None) -> Plan:
    return get_solver(name).run(instance, opts or SolveOptions())
