"""Finite site graphs with a cached graph metric.

Sites are dense integers ``0..N-1``. For lattice graphs the ids enumerate the
lattice coordinates in row-major order, so site ``i`` of an ``L x L`` box has
coordinates ``divmod(i, L)``.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SiteGraph",
    "build_graph",
    "graph_from_edges",
    "set_distance",
    "diameter",
    "neighborhood",
    "shell_sizes",
    "surface_regularity_constant",
]

GRAPH_KINDS = ("chain", "box", "torus")


@dataclass(frozen=True, eq=False)
class SiteGraph:
    """Connected finite graph with uniform local dimension ``q``.

    ``dist`` is the all-pairs shortest-path table, computed once at
    construction. Instances are treated as immutable.
    """

    n_sites: int
    edges: frozenset
    dist: np.ndarray = field(repr=False)
    q: int = 2
    dim: int = 1
    kappa: float | None = None
    coords: tuple | None = field(default=None, repr=False)
    label: str = ""

    @property
    def sites(self) -> range:
        return range(self.n_sites)

    @property
    def diam(self) -> int:
        return int(self.dist.max()) if self.n_sites else 0

    def neighbors(self, x: int) -> list[int]:
        return [int(y) for y in np.flatnonzero(self.dist[x] == 1)]

    def d(self, x: int, y: int) -> int:
        return int(self.dist[x, y])


def _bfs_distances(n: int, adj: Sequence[Sequence[int]]) -> np.ndarray:
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if row[v] < 0:
                    row[v] = row[u] + 1
                    queue.append(v)
    return dist


def graph_from_edges(
    n_sites: int,
    edges: Iterable[tuple[int, int]],
    q: int = 2,
    dim: int = 1,
    kappa: float | None = None,
    coords=None,
    label: str = "",
) -> SiteGraph:
    """Build a :class:`SiteGraph` from an explicit edge list.

    Raises:
        ValueError: on self loops, out-of-range endpoints, ``q < 2`` or a
            disconnected graph.
    """
    if n_sites < 1:
        raise ValueError("graph needs at least one site")
    if q < 2:
        raise ValueError(f"local dimension q must be >= 2, got {q}")
    edge_set = set()
    adj: list[set[int]] = [set() for _ in range(n_sites)]
    for a, b in edges:
        a, b = int(a), int(b)
        if not (0 <= a < n_sites and 0 <= b < n_sites):
            raise ValueError(f"edge ({a}, {b}) has an endpoint outside 0..{n_sites - 1}")
        if a == b:
            raise ValueError(f"self loop at site {a}")
        edge_set.add((min(a, b), max(a, b)))
        adj[a].add(b)
        adj[b].add(a)
    dist = _bfs_distances(n_sites, [sorted(s) for s in adj])
    if (dist < 0).any():
        raise ValueError("graph is not connected")
    dist.setflags(write=False)
    return SiteGraph(
        n_sites=n_sites,
        edges=frozenset(edge_set),
        dist=dist,
        q=q,
        dim=dim,
        kappa=kappa,
        coords=tuple(coords) if coords is not None else None,
        label=label,
    )


def build_graph(kind: str, D: int = 1, L: int = 2, q: int = 2) -> SiteGraph:
    """Hypercubic chain, open box or periodic torus with ``L**D`` sites.

    ``chain`` is an alias for a one-dimensional box.
    """
    if kind not in GRAPH_KINDS:
        raise ValueError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    if q < 2:
        raise ValueError(f"local dimension q must be >= 2, got {q}")
    if kind == "chain" and D != 1:
        raise ValueError(f"a chain has D=1, got D={D}")
    periodic = kind == "torus"

    coords = list(itertools.product(range(L), repeat=D))
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for c in coords:
        for axis in range(D):
            nxt = list(c)
            nxt[axis] += 1
            if nxt[axis] == L:
                if not periodic:
                    continue
                nxt[axis] = 0
            j = index[tuple(nxt)]
            if j != index[c]:
                edges.append((index[c], j))
    return graph_from_edges(
        len(coords), edges, q=q, dim=D, coords=coords, label=f"{kind}(D={D},L={L})"
    )


def _as_sites(g: SiteGraph, X: Iterable[int], name: str = "X") -> np.ndarray:
    arr = np.asarray(sorted(set(int(x) for x in X)), dtype=np.int64)
    if arr.size and (arr[0] < 0 or arr[-1] >= g.n_sites):
        raise ValueError(f"{name} contains sites outside 0..{g.n_sites - 1}")
    return arr


def set_distance(g: SiteGraph, X: Iterable[int], Y: Iterable[int]) -> int:
    """``min`` of ``d(x, y)`` over ``x`` in X and ``y`` in Y."""
    xs, ys = _as_sites(g, X, "X"), _as_sites(g, Y, "Y")
    if xs.size == 0 or ys.size == 0:
        raise ValueError("set_distance needs non-empty sets")
    return int(g.dist[np.ix_(xs, ys)].min())


def diameter(g: SiteGraph, Z: Iterable[int]) -> int:
    zs = _as_sites(g, Z, "Z")
    if zs.size == 0:
        raise ValueError("diameter of an empty set is undefined")
    return int(g.dist[np.ix_(zs, zs)].max())


def neighborhood(g: SiteGraph, X: Iterable[int], ell: int) -> frozenset[int]:
    """The set of sites within distance ``ell`` of ``X``."""
    xs = _as_sites(g, X, "X")
    if xs.size == 0:
        return frozenset()
    if ell < 0:
        raise ValueError("neighborhood radius must be non-negative")
    close = (g.dist[xs] <= ell).any(axis=0)
    return frozenset(int(i) for i in np.flatnonzero(close))


@functools.lru_cache(maxsize=64)
def shell_sizes(g: SiteGraph) -> np.ndarray:
    """``counts[x, r] = |{y : d(x, y) = r}|`` for ``r = 0..diam``."""
    counts = np.zeros((g.n_sites, g.diam + 1), dtype=np.int64)
    for x in range(g.n_sites):
        counts[x] = np.bincount(g.dist[x], minlength=g.diam + 1)
    counts.setflags(write=False)
    return counts


def surface_regularity_constant(g: SiteGraph, D: int | None = None) -> float:
    """Smallest ``kappa`` with ``|sphere_x(r)| <= kappa * r**(D-1)`` on ``g``.

    The maximum runs over every center and every radius ``r >= 1`` realized
    on the finite graph.
    """
    D = g.dim if D is None else D
    if D < 1:
        raise ValueError("D must be >= 1")
    counts = shell_sizes(g)
    if counts.shape[1] < 2:
        return 0.0
    radii = np.arange(1, counts.shape[1], dtype=float)
    return float((counts[:, 1:] / radii ** (D - 1)).max())
