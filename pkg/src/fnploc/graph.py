"""
Discrete location spaces: paths, trees, cycles, hypergrids and arbitrary
connected graphs, with all-pairs hop distances and distance-preserving
embedding search.

Vertices are dense integer ids ``0..n-1``. Subsets of vertices are plain
``int`` bitmasks throughout the package (bit ``i`` set means vertex ``i``
is a member).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from fnploc.errors import (
    BadDimension,
    CycleTooShort,
    CyclicTreeInput,
    DisconnectedInput,
    GraphTooLarge,
    SpecError,
)

MAX_VERTICES = 64


@dataclass(frozen=True)
class Graph:
    """Finite undirected connected graph with its hop-distance matrix."""

    n: int
    edges: frozenset[tuple[int, int]]
    dist: tuple[tuple[int, ...], ...] = field(repr=False)
    labels: tuple[str, ...] = field(repr=False)
    kind: str = "custom"
    params: tuple = ()

    @property
    def full(self) -> int:
        """Bitmask of the whole vertex set."""
        return (1 << self.n) - 1

    @property
    def name(self) -> str:
        if self.kind == "cycle":
            return f"C{self.n}"
        if self.kind == "hypergrid":
            return "grid" + "x".join(str(d) for d in self.params)
        if self.kind == "path":
            return f"path{self.n}"
        if self.kind == "star":
            return f"star{self.n}"
        return f"{self.kind}{self.n}"

    def neighbors(self, v: int) -> list[int]:
        row = self.dist[v]
        return [w for w in range(self.n) if row[w] == 1]

    def degree(self, v: int) -> int:
        return sum(1 for x in self.dist[v] if x == 1)

    def diameter(self) -> int:
        return max(max(row) for row in self.dist)

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def label(self, v: int) -> str:
        return self.labels[v]

    def format_set(self, mask: int) -> str:
        return "{" + ",".join(self.labels[v] for v in members(mask)) + "}"

    def vertex(self, token: str) -> int:
        """Resolve a user-facing vertex token to an id.

        Cycles accept ``3`` or ``v3`` (1-based); hypergrids accept 1-based
        coordinates such as ``(1,2)``; everything else takes the raw id.
        """
        tok = token.strip().replace(" ", "")
        if tok in self.labels:
            return self.labels.index(tok)
        if self.kind == "cycle" and tok.isdigit() and f"v{tok}" in self.labels:
            return self.labels.index(f"v{tok}")
        if self.kind == "hypergrid":
            wrapped = f"({tok.strip('()')})"
            if wrapped in self.labels:
                return self.labels.index(wrapped)
        if self.kind not in ("cycle", "hypergrid") and tok.isdigit() and int(tok) < self.n:
            return int(tok)
        raise SpecError(f"unknown vertex {token!r} for graph {self.name}")


def members(mask: int) -> list[int]:
    """Vertex ids in a bitmask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def nonempty_subsets(n: int) -> range:
    """All non-empty subsets of ``n`` vertices, in bitmask order."""
    return range(1, 1 << n)


def supersets(base: int, full: int) -> Iterator[int]:
    """Every non-empty set ``S`` with ``base <= S <= full``."""
    free = full & ~base
    sub = free
    while True:
        s = base | sub
        if s:
            yield s
        if sub == 0:
            break
        sub = (sub - 1) & free


def _bfs_distances(n: int, adj: Sequence[Sequence[int]]) -> list[list[int]]:
    dist = []
    for src in range(n):
        row = [-1] * n
        row[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if row[w] < 0:
                    row[w] = row[u] + 1
                    queue.append(w)
        dist.append(row)
    return dist


def _make(n: int, edge_list: Iterable[Sequence[int]], labels=None, kind="custom", params=()) -> Graph:
    if n < 1:
        raise SpecError("graph needs at least one vertex")
    if n > MAX_VERTICES:
        raise GraphTooLarge(f"{n} vertices exceeds the cap of {MAX_VERTICES}")
    edges = set()
    adj: list[list[int]] = [[] for _ in range(n)]
    for e in edge_list:
        if len(e) != 2:
            raise SpecError(f"edge {e!r} must have two endpoints")
        a, b = int(e[0]), int(e[1])
        if not (0 <= a < n and 0 <= b < n) or a == b:
            raise SpecError(f"bad edge {e!r}")
        key = (min(a, b), max(a, b))
        if key in edges:
            continue
        edges.add(key)
        adj[a].append(b)
        adj[b].append(a)
    dist = _bfs_distances(n, adj)
    if any(x < 0 for x in dist[0]):
        raise DisconnectedInput(f"graph on {n} vertices is not connected")
    if labels is None:
        labels = [str(i) for i in range(n)]
    return Graph(
        n=n,
        edges=frozenset(edges),
        dist=tuple(tuple(r) for r in dist),
        labels=tuple(labels),
        kind=kind,
        params=tuple(params),
    )


def _vertex_count(edge_list: Sequence[Sequence[int]]) -> int:
    if not edge_list:
        return 1
    return 1 + max(max(int(a), int(b)) for a, b in edge_list)


def path(m: int) -> Graph:
    if m < 1:
        raise SpecError("path needs at least one vertex")
    return _make(m, [(i, i + 1) for i in range(m - 1)], kind="path", params=(m,))


def cycle(k: int) -> Graph:
    """Cycle ``C_k``; vertex ``v_i`` has id ``i-1``, labels run counter-clockwise."""
    if k < 3:
        raise CycleTooShort(f"cycle needs k >= 3, got {k}")
    edges = [(i, (i + 1) % k) for i in range(k)]
    return _make(k, edges, labels=[f"v{i + 1}" for i in range(k)], kind="cycle", params=(k,))


def tree(edge_list: Sequence[Sequence[int]], n: int | None = None) -> Graph:
    if n is None:
        n = _vertex_count(edge_list)
    distinct = {(min(a, b), max(a, b)) for a, b in edge_list}
    if len(distinct) != len(edge_list):
        raise CyclicTreeInput("duplicate edge in tree")
    if len(distinct) > n - 1:
        raise CyclicTreeInput(f"{len(distinct)} edges on {n} vertices cannot be a tree")
    g = _make(n, edge_list, kind="tree")
    # connected with n-1 edges is acyclic
    return g


def star(n: int) -> Graph:
    """Star on ``n`` vertices: center 0, leaves ``1..n-1``."""
    g = tree([(0, i) for i in range(1, n)], n=n)
    return Graph(g.n, g.edges, g.dist, g.labels, "star", (n,))


def hypergrid(dims: Sequence[int]) -> Graph:
    """Product of paths; ids are row-major, labels are 1-based coordinates."""
    dims = [int(d) for d in dims]
    if len(dims) < 2 or any(d < 2 for d in dims):
        raise BadDimension(f"hypergrid needs >= 2 dimensions each >= 2, got {dims}")
    coords = list(itertools.product(*(range(d) for d in dims)))
    if len(coords) > MAX_VERTICES:
        raise GraphTooLarge(f"{len(coords)} vertices exceeds the cap of {MAX_VERTICES}")
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for c, i in index.items():
        for axis in range(len(dims)):
            if c[axis] + 1 < dims[axis]:
                nb = c[:axis] + (c[axis] + 1,) + c[axis + 1:]
                edges.append((i, index[nb]))
    labels = ["(" + ",".join(str(x + 1) for x in c) + ")" for c in coords]
    return _make(len(coords), edges, labels=labels, kind="hypergrid", params=tuple(dims))


def custom(edge_list: Sequence[Sequence[int]], n: int | None = None) -> Graph:
    if n is None:
        n = _vertex_count(edge_list)
    return _make(n, edge_list, kind="custom")


def caterpillar_tree() -> Graph:
    """Eight-vertex tree whose unique longest path runs from id 0 to id 7."""
    edges = [(0, 1), (1, 2), (2, 3), (2, 4), (4, 5), (4, 6), (6, 7)]
    g = tree(edges)
    return Graph(g.n, g.edges, g.dist, g.labels, "caterpillar", ())


def from_spec(spec: dict) -> Graph:
    """Build a graph from its JSON spec, e.g. ``{"kind": "cycle", "k": 6}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecError(f"graph spec must be an object with a 'kind': {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "cycle":
            return cycle(int(spec["k"]))
        if kind == "hypergrid":
            return hypergrid(spec["dims"])
        if kind == "path":
            return path(int(spec["m"]))
        if kind == "star":
            return star(int(spec["n"]))
        if kind == "tree":
            return tree(spec["edges"], spec.get("n"))
        if kind == "custom":
            return custom(spec["edges"], spec.get("n"))
        if kind == "caterpillar":
            return caterpillar_tree()
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed {kind} spec {spec!r}: {exc}") from exc
    raise SpecError(f"unknown graph kind {kind!r}")


def to_spec(g: Graph) -> dict:
    if g.kind == "cycle":
        return {"kind": "cycle", "k": g.n}
    if g.kind == "hypergrid":
        return {"kind": "hypergrid", "dims": list(g.params)}
    if g.kind == "path":
        return {"kind": "path", "m": g.n}
    if g.kind == "star":
        return {"kind": "star", "n": g.n}
    if g.kind == "caterpillar":
        return {"kind": "caterpillar"}
    return {"kind": g.kind, "n": g.n, "edges": sorted(list(e) for e in g.edges)}


# Embeddings


@dataclass(frozen=True)
class Embedding:
    """Injective, distance-preserving map from pattern ids to host ids."""

    pattern: Graph = field(repr=False)
    host: Graph = field(repr=False)
    map: tuple[int, ...]

    def check(self) -> bool:
        m = self.map
        if len(set(m)) != len(m):
            return False
        pd, hd = self.pattern.dist, self.host.dist
        return all(
            hd[m[u]][m[w]] == pd[u][w]
            for u in range(self.pattern.n)
            for w in range(self.pattern.n)
        )

    def describe(self) -> list[str]:
        return [self.host.labels[h] for h in self.map]


def _search_order(pattern: Graph) -> list[int]:
    # BFS order keeps each new vertex adjacent to an already-placed one
    seen = [0]
    for v in seen:
        for w in pattern.neighbors(v):
            if w not in seen:
                seen.append(w)
    return seen


def iter_dp_embeddings(pattern: Graph, host: Graph) -> Iterator[Embedding]:
    """Every distance-preserving embedding, lowest host ids first."""
    if pattern.n > host.n:
        return
    order = _search_order(pattern)
    pd, hd = pattern.dist, host.dist
    image = [-1] * pattern.n
    used = [False] * host.n

    def extend(depth: int) -> Iterator[Embedding]:
        if depth == len(order):
            yield Embedding(pattern, host, tuple(image))
            return
        u = order[depth]
        placed = order[:depth]
        for h in range(host.n):
            if used[h]:
                continue
            if all(hd[h][image[p]] == pd[u][p] for p in placed):
                image[u] = h
                used[h] = True
                yield from extend(depth + 1)
                used[h] = False
                image[u] = -1

    yield from extend(0)


def find_dp_embedding(pattern: Graph, host: Graph) -> Embedding | None:
    """First embedding found by exhaustive backtracking, or ``None`` if none exists."""
    return next(iter_dp_embeddings(pattern, host), None)


def automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """All distance-preserving permutations of ``g``."""
    return [e.map for e in iter_dp_embeddings(g, g)]
