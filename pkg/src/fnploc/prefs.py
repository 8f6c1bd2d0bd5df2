"""
Single-peaked and single-dipped preferences over graph vertices, Pareto
dominance and Pareto-efficient sets.

Every query depends only on which vertices are occupied, never on how many
agents sit on each, so profiles collapse to bitmasks before any work.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from fnploc.graph import Graph, mask_of, members
from fnploc.errors import SpecError


class Kind(enum.Enum):
    PEAKED = "peaked"
    DIPPED = "dipped"

    @classmethod
    def parse(cls, text: str) -> "Kind":
        try:
            return cls(text.lower())
        except ValueError:
            raise SpecError(f"preference kind must be 'peaked' or 'dipped', got {text!r}") from None


PEAKED = Kind.PEAKED
DIPPED = Kind.DIPPED


class Cmp(enum.Enum):
    BETTER = 1
    INDIFFERENT = 0
    WORSE = -1


def utility(kind: Kind, g: Graph, v: int, w: int) -> int:
    """Ordinal score of outcome ``w`` for an agent at ``v``; larger is better."""
    d = g.dist[v][w]
    return -d if kind is Kind.PEAKED else d


def compare(kind: Kind, g: Graph, v: int, w: int, x: int) -> Cmp:
    """How an agent at ``v`` ranks outcome ``w`` against outcome ``x``."""
    a, b = utility(kind, g, v, w), utility(kind, g, v, x)
    if a > b:
        return Cmp.BETTER
    if a < b:
        return Cmp.WORSE
    return Cmp.INDIFFERENT


def pareto_dominates(g: Graph, occ: int, kind: Kind, v: int, w: int) -> bool:
    strict = False
    for u in members(occ):
        a, b = utility(kind, g, u, v), utility(kind, g, u, w)
        if a < b:
            return False
        if a > b:
            strict = True
    return strict


def pe_set(g: Graph, occ: int, kind: Kind) -> int:
    """Bitmask of vertices not Pareto dominated by any vertex under ``occ``."""
    if not occ:
        raise ValueError("occupied set must be non-empty")
    occupied = members(occ)
    # score[w] = utilities of each occupied vertex for outcome w
    scores = [[utility(kind, g, u, w) for u in occupied] for w in range(g.n)]
    out = 0
    for w in range(g.n):
        sw = scores[w]
        dominated = False
        for v in range(g.n):
            sv = scores[v]
            if all(a >= b for a, b in zip(sv, sw)) and sv != sw:
                dominated = True
                break
        if not dominated:
            out |= 1 << w
    return out


@dataclass(frozen=True)
class Profile:
    """Agent counts per vertex together with the preference kind."""

    counts: tuple[tuple[int, int], ...]
    kind: Kind

    @classmethod
    def from_locations(cls, locations: Iterable[int], kind: Kind) -> "Profile":
        c = Counter(locations)
        if not c:
            raise ValueError("a profile needs at least one agent")
        return cls(tuple(sorted(c.items())), kind)

    def locations(self) -> list[int]:
        return [v for v, k in self.counts for _ in range(k)]

    def occupied(self) -> int:
        return mask_of(v for v, _ in self.counts)

    def __len__(self) -> int:
        return sum(k for _, k in self.counts)


def antipodal(k: int, v: int) -> int:
    """Antipode of ``v`` on the even cycle ``C_k``."""
    return (v + k // 2) % k


def antipodal_mask(k: int, mask: int) -> int:
    return mask_of(antipodal(k, v) for v in members(mask))
