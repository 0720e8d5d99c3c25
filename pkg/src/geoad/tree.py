"""Prefix-merged tree of user paths.

Paths that share a starting sequence of vertices share tree nodes up to
their longest common prefix.  Every node carries the probability ``alpha``
that a user starting at the root reaches it, i.e. the summed ``gamma`` of
the paths running through it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

GAMMA_TOL = 1e-9


@dataclass(frozen=True)
class Path:
    gamma: float
    vertices: tuple

    def __init__(self, gamma: float, vertices: Iterable[Hashable]):
        object.__setattr__(self, "gamma", float(gamma))
        object.__setattr__(self, "vertices", tuple(vertices))
        if not self.vertices:
            raise ValueError("a path needs at least one vertex")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass(frozen=True)
class TreeNode:
    id: int
    vertex: Hashable
    alpha: float
    children: tuple[int, ...]
    depth: int
    parent: int | None


@dataclass(frozen=True)
class PathTree:
    nodes: tuple[TreeNode, ...]
    paths: tuple[tuple[float, tuple[int, ...]], ...]
    root: int = 0

    def __len__(self) -> int:
        return len(self.nodes)

    def _node(self, n: int) -> TreeNode:
        if not 0 <= n < len(self.nodes):
            raise KeyError(f"unknown tree node {n}")
        return self.nodes[n]

    def children(self, n: int) -> tuple[int, ...]:
        return self._node(n).children

    def depth(self, n: int) -> int:
        """Number of nodes from the root to ``n``, both included."""
        return self._node(n).depth

    def parent(self, n: int) -> int | None:
        return self._node(n).parent

    def alpha(self, n: int) -> float:
        return self._node(n).alpha

    def nodes_of_path(self, p: int) -> tuple[int, ...]:
        if not 0 <= p < len(self.paths):
            raise KeyError(f"unknown path {p}")
        return self.paths[p][1]

    def ancestors(self, n: int) -> list[int]:
        """Strict ancestors of ``n``, nearest first."""
        out = []
        cur = self._node(n).parent
        while cur is not None:
            out.append(cur)
            cur = self.nodes[cur].parent
        return out

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(nd.alpha for nd in self.nodes)

    @property
    def max_depth(self) -> int:
        return max(nd.depth for nd in self.nodes)

    @property
    def num_paths(self) -> int:
        return len(self.paths)

    def is_chain(self) -> bool:
        return all(len(nd.children) <= 1 for nd in self.nodes)

    def leaves(self) -> list[int]:
        return [nd.id for nd in self.nodes if not nd.children]

    def vertex_paths(self) -> list[Path]:
        """The (gamma, vertex sequence) listing this tree was built from."""
        return [Path(g, [self.nodes[n].vertex for n in seq]) for g, seq in self.paths]


def normalize_gammas(paths: Sequence[Path], k: int) -> list[Path]:
    """Keep the ``k`` most probable paths and rescale their gammas to sum to 1.

    Ties in gamma keep the input order.
    """
    if not paths:
        raise ValueError("no paths given")
    if k < 1:
        raise ValueError("k must be at least 1")
    order = sorted(range(len(paths)), key=lambda i: -paths[i].gamma)[:k]
    order.sort()
    kept = [paths[i] for i in order]
    total = sum(p.gamma for p in kept)
    if total <= 0.0:
        raise ValueError("all retained paths have zero probability")
    return [Path(p.gamma / total, p.vertices) for p in kept]


def build_tree(paths: Sequence[Path]) -> PathTree:
    """Merge ``paths`` into a prefix tree, numbering nodes breadth-first.

    Paths must share their first vertex and have gammas summing to 1.
    Identical vertex sequences are merged and their gammas added.  A path
    may be a strict prefix of another; it then terminates at an internal
    node.
    """
    if not paths:
        raise ValueError("no paths given")
    start = paths[0].vertices[0]
    if any(p.vertices[0] != start for p in paths):
        raise ValueError("all paths must start at the same vertex")
    total = sum(p.gamma for p in paths)
    if abs(total - 1.0) > GAMMA_TOL:
        raise ValueError(f"path gammas must sum to 1, got {total!r}")

    merged: dict[tuple, float] = {}
    for p in paths:
        merged[p.vertices] = merged.get(p.vertices, 0.0) + p.gamma

    # trie keyed by vertex prefix; children kept in first-seen order
    kids: dict[tuple, list[tuple]] = {(start,): []}
    alpha: dict[tuple, float] = {(start,): 0.0}
    for verts, g in merged.items():
        for d in range(1, len(verts) + 1):
            pre = verts[:d]
            if pre not in alpha:
                alpha[pre] = 0.0
                kids[pre] = []
                kids[verts[: d - 1]].append(pre)
            alpha[pre] += g

    ids: dict[tuple, int] = {}
    order: list[tuple] = []
    queue = deque([(start,)])
    while queue:
        pre = queue.popleft()
        ids[pre] = len(order)
        order.append(pre)
        queue.extend(kids[pre])

    nodes = tuple(
        TreeNode(
            id=ids[pre],
            vertex=pre[-1],
            alpha=alpha[pre],
            children=tuple(ids[c] for c in kids[pre]),
            depth=len(pre),
            parent=ids[pre[:-1]] if len(pre) > 1 else None,
        )
        for pre in order
    )
    listing = tuple(
        (g, tuple(ids[verts[:d]] for d in range(1, len(verts) + 1)))
        for verts, g in merged.items()
    )
    return PathTree(nodes=nodes, paths=listing, root=0)


def chain_tree(num_nodes: int) -> PathTree:
    """A single path over vertices ``1..num_nodes``."""
    return build_tree([Path(1.0, range(1, num_nodes + 1))])
