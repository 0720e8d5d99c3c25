"""Instance generators: the 10x10 grid-world experiments, small random
instances for oracle comparisons, and hand-built fixtures from the worked
examples.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence(seed)``,
split into independent child streams per entity: shops, advertiser draws
(reward, base quality, decay), random walks, and path probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .model import Advertiser, FatigueModel, Instance
from .tree import Path, build_tree, chain_tree

MAX_WALK_LENGTH = 20


@dataclass(frozen=True)
class GridWorld:
    width: int
    height: int
    shops: tuple[tuple[int, int], ...]
    decay: tuple[float, ...]
    base_quality: tuple[float, ...]

    @property
    def max_distance(self) -> int:
        return (self.width - 1) + (self.height - 1)

    def cell(self, vertex: int) -> tuple[int, int]:
        return vertex % self.width, vertex // self.width

    def vertex(self, x: int, y: int) -> int:
        return y * self.width + x

    def distance(self, a: int, vertex: int) -> float:
        """Manhattan distance from ad ``a``'s shop, scaled to [0, 1]."""
        x, y = self.cell(vertex)
        sx, sy = self.shops[a]
        return (abs(x - sx) + abs(y - sy)) / self.max_distance

    def quality(self, a: int, vertex: int) -> float:
        if self.cell(vertex) == self.shops[a]:
            return self.base_quality[a]
        return max(0.0, self.base_quality[a] - self.decay[a] * self.distance(a, vertex))

    def neighbours(self, vertex: int) -> list[int]:
        x, y = self.cell(vertex)
        out = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < self.width and 0 <= ny < self.height:
                out.append(self.vertex(nx, ny))
        return out


@dataclass(frozen=True)
class GenConfig:
    """Parameters of one grid-world instance.

    With ``num_paths == 1`` the user follows a single walk of ``num_nodes``
    cells.  Otherwise ``num_paths`` walks leave the same start cell, each
    with a length drawn uniformly from ``1..max_path_length``, and path
    probabilities drawn uniformly and then normalized.
    """
    seed: int
    num_ads: int = 30
    lam: float = 0.5
    num_nodes: int = 20
    num_paths: int = 1
    max_path_length: int = MAX_WALK_LENGTH
    width: int = 10
    height: int = 10

    def __post_init__(self):
        if min(self.num_ads, self.num_nodes, self.num_paths, self.max_path_length,
               self.width, self.height) < 1:
            raise ValueError("all counts must be at least 1")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")


def _streams(seed: int):
    shops, ads, walks, gammas = np.random.SeedSequence(seed).spawn(4)
    return (np.random.Generator(np.random.PCG64(s)) for s in (shops, ads, walks, gammas))


def generate_world(cfg: GenConfig) -> GridWorld:
    shop_rng, ad_rng, _, _ = _streams(cfg.seed)
    cells = shop_rng.integers(0, cfg.width * cfg.height, size=cfg.num_ads)
    draws = ad_rng.random((cfg.num_ads, 3))
    return GridWorld(
        width=cfg.width,
        height=cfg.height,
        shops=tuple((int(c) % cfg.width, int(c) // cfg.width) for c in cells),
        base_quality=tuple(float(x) for x in draws[:, 1]),
        decay=tuple(float(x) for x in draws[:, 2]),
    )


def _rewards(cfg: GenConfig) -> np.ndarray:
    _, ad_rng, _, _ = _streams(cfg.seed)
    return ad_rng.random((cfg.num_ads, 3))[:, 0] * 100.0


def _walk(world: GridWorld, start: int, length: int, rng) -> list[int]:
    out = [start]
    while len(out) < length:
        nbrs = world.neighbours(out[-1])
        out.append(nbrs[int(rng.integers(len(nbrs)))])
    return out


def generate_instance(cfg: GenConfig, world: GridWorld | None = None) -> Instance:
    """Grid-world instance; a pure function of ``cfg``."""
    world = world or generate_world(cfg)
    _, _, walk_rng, gamma_rng = _streams(cfg.seed)
    start = int(walk_rng.integers(cfg.width * cfg.height))
    if cfg.num_paths == 1:
        paths = [Path(1.0, _walk(world, start, cfg.num_nodes, walk_rng))]
    else:
        lengths = walk_rng.integers(1, cfg.max_path_length + 1, size=cfg.num_paths)
        walks = [_walk(world, start, int(n), walk_rng) for n in lengths]
        g = 1.0 - gamma_rng.random(cfg.num_paths)
        g = g / g.sum()
        paths = [Path(float(x), w) for x, w in zip(g, walks)]
    tree = build_tree(_renormalized(paths))
    rewards = _rewards(cfg)
    advs = []
    for a in range(cfg.num_ads):
        qs = {}
        for nd in tree.nodes:
            q = world.quality(a, nd.vertex)
            if q > 0.0:
                qs[nd.id] = q
        advs.append(Advertiser(float(rewards[a]), qs))
    fatigue = FatigueModel.constant(cfg.lam, max(len(tree), tree.max_depth))
    return Instance(tuple(advs), fatigue, tree)


def _renormalized(paths: list[Path]) -> list[Path]:
    # float division can leave the sum a few ulps off 1
    total = sum(p.gamma for p in paths)
    return [Path(p.gamma / total, p.vertices) for p in paths]


def random_tree_paths(rng, num_nodes: int) -> list[Path]:
    """Random rooted tree on ``num_nodes`` vertices, listed as root-to-leaf
    paths with random normalized probabilities."""
    parent = [None] + [int(rng.integers(0, i)) for i in range(1, num_nodes)]
    has_child = {p for p in parent if p is not None}
    leaves = [v for v in range(num_nodes) if v not in has_child]
    seqs = []
    for leaf in leaves:
        seq = [leaf]
        while parent[seq[-1]] is not None:
            seq.append(parent[seq[-1]])
        seqs.append(seq[::-1])
    g = 1.0 - rng.random(len(seqs))
    g = g / g.sum()
    return _renormalized([Path(float(x), s) for x, s in zip(g, seqs)])


def random_small_instance(seed: int, num_ads: int, num_nodes: int, *, tree: bool = False,
                          lam: float | None = None, zero_prob: float = 0.0) -> Instance:
    """Uniform random instance for exhaustive cross-checks.

    Rewards are U[0, 100], qualities U[0, 1] (each zeroed with probability
    ``zero_prob``), and continuation probabilities U[0, 1] per position
    unless ``lam`` fixes them.  ``tree=True`` draws a random tree shape
    instead of a single path.
    """
    rng = np.random.default_rng(seed)
    if tree:
        t = build_tree(random_tree_paths(rng, num_nodes))
    else:
        t = chain_tree(num_nodes)
    rewards = rng.random(num_ads) * 100.0
    q = rng.random((num_ads, num_nodes))
    q[rng.random((num_ads, num_nodes)) < zero_prob] = 0.0
    lambdas = rng.random(num_nodes) if lam is None else [lam] * num_nodes
    advs = tuple(
        Advertiser(float(rewards[a]), {n: float(q[a, n]) for n in range(num_nodes)})
        for a in range(num_ads)
    )
    return Instance(advs, FatigueModel(lambdas), t)


def _chain_instance(rewards, qualities, lam: float) -> Instance:
    k = len(qualities[0])
    advs = tuple(Advertiser(float(r), dict(enumerate(map(float, q)))) for r, q in zip(rewards, qualities))
    return Instance(advs, FatigueModel.constant(lam, k), chain_tree(k))


FIXTURE_NAMES = ("table1a", "table1a-nonmono", "table1b", "example2")


def named_fixture(name: str, lam: float | None = None) -> Instance:
    """Two-node and three-node worked examples.

    ``table1a``: values r*q of (1, 2) for ad 0 and (2, 4) for ad 1, realized
    as reward 2 / 4 with qualities (0.5, 1.0); default lambda 0.7.
    ``table1a-nonmono`` is the same at lambda 0.2.  ``table1b`` raises ad 0's
    reward to 6, giving values (3, 6).  ``example2`` is the three-node
    instance whose best plan shows only ad 0 at the last node (welfare 100),
    lambda 0.2.
    """
    if name == "table1a":
        return _chain_instance([2.0, 4.0], [[0.5, 1.0], [0.5, 1.0]], 0.7 if lam is None else lam)
    if name == "table1a-nonmono":
        return _chain_instance([2.0, 4.0], [[0.5, 1.0], [0.5, 1.0]], 0.2 if lam is None else lam)
    if name == "table1b":
        return _chain_instance([6.0, 4.0], [[0.5, 1.0], [0.5, 1.0]], 0.2 if lam is None else lam)
    if name == "example2":
        return _chain_instance(
            [100.0, 79.0, 70.0],
            [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
            0.2 if lam is None else lam,
        )
    raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")


def fixture_path(name: str):
    """Location of the shipped JSON copy of a fixture."""
    return resources.files("geoad") / "fixtures" / f"{name}.json"
