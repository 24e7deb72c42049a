"""Highly coordinating communities via edge-weight threshold and connected components."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .network import CoordinationNetwork, EdgeEvidence

STAR_MIN_COEFFICIENT = 0.9


@dataclass
class Hcc:
    id: int
    accounts: frozenset[str]
    edges: dict[tuple[str, str], EdgeEvidence]
    total_weight: float
    star_hub: str | None
    star_coefficient: float

    @property
    def size(self) -> int:
        return len(self.accounts)


def filter_edges(cn: CoordinationNetwork, theta: float) -> CoordinationNetwork:
    """Keep edges with weight strictly greater than ``theta`` and their endpoints."""
    if theta < 0:
        raise ValueError("theta must be non-negative")
    out = CoordinationNetwork()
    for (a, b), ev in cn.edges.items():
        if ev.weight > theta:
            out.add_evidence(a, b, ev)
    return out


def connected_components(cn: CoordinationNetwork) -> list[set[str]]:
    """Node sets of the connected components, largest first then by smallest member."""
    adj = cn.adjacency()
    seen: set[str] = set()
    components = []
    for start in sorted(adj):
        if start in seen:
            continue
        seen.add(start)
        comp, stack = {start}, [start]
        while stack:
            for nbr in adj[stack.pop()]:
                if nbr not in seen:
                    seen.add(nbr)
                    comp.add(nbr)
                    stack.append(nbr)
        components.append(comp)
    components.sort(key=lambda c: (-len(c), min(c)))
    return components


def star_shape(accounts: frozenset[str], edges: dict[tuple[str, str], EdgeEvidence]) -> tuple[str | None, float]:
    """Return ``(hub, coefficient)``; coefficient is max degree over ``n - 1``.

    No hub is reported when the coefficient is under 0.9 or when several
    accounts share the maximum degree.
    """
    if len(accounts) < 2:
        return None, 0.0
    deg = dict.fromkeys(accounts, 0)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    top = max(deg.values())
    coefficient = top / (len(accounts) - 1)
    leaders = [n for n, d in deg.items() if d == top]
    hub = leaders[0] if len(leaders) == 1 and coefficient >= STAR_MIN_COEFFICIENT else None
    return hub, coefficient


ComponentFinder = Callable[[CoordinationNetwork], list[set[str]]]


def extract_hccs(cn: CoordinationNetwork, theta: float = 10.0, min_size: int = 2,
                 components: ComponentFinder = connected_components) -> list[Hcc]:
    """Filter by ``theta`` then split into communities of at least ``min_size`` accounts.

    Communities are numbered from 0 in order of descending total weight.
    """
    if min_size < 2:
        raise ValueError("min_size must be at least 2")
    filtered = filter_edges(cn, theta)
    found = []
    for members in components(filtered):
        if len(members) < min_size:
            continue
        accounts = frozenset(members)
        edges = {k: v for k, v in sorted(filtered.edges.items()) if k[0] in accounts}
        hub, coefficient = star_shape(accounts, edges)
        total = sum(ev.weight for ev in edges.values())
        found.append((accounts, edges, total, hub, coefficient))
    found.sort(key=lambda h: (-h[2], sorted(h[0])))
    return [Hcc(i, *h) for i, h in enumerate(found)]


def removed_bridges(cn: CoordinationNetwork, theta: float) -> list[str]:
    """Accounts dropped by filtering although they linked two or more others beforehand."""
    kept = filter_edges(cn, theta).nodes
    return sorted(n for n, d in cn.degree().items() if d >= 2 and n not in kept)
