"""Coordination networks: per-window construction, aggregation and temporal strengthening.

Strengthening looks at every two co-action pairs that share exactly one
account ``B`` (``A``-``B`` and ``B``-``C``) and may add an inferred ``A``-``C``
contribution whose weight depends on whether the two pairs share a reason
and how far apart in time they are:

====  ==============  ==========================================================
 id   reason          timing
====  ==============  ==========================================================
 a    same            A and C within gamma of each other (direct co-action)
 b    same            A and C gamma or more apart, B's actions within gamma
 c    different       each of B's actions within gamma of both A and C
 d    different       B's actions within gamma of each other, but not (c)
 e    same            B's actions gamma or more apart
 f    different       B's actions gamma or more apart
====  ==============  ==========================================================

Scenario ``a`` is the direct edge the detector already produces, so it never
adds inferred weight.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .coaction import CoActionPair
from .ingestion import ActionType
from .windowing import WindowConfig

logger = logging.getLogger(__name__)

Reason = tuple[ActionType, str]


@dataclass
class EdgeEvidence:
    weight: float = 0.0
    pair_count: int = 0
    reasons: Counter = field(default_factory=Counter)
    inferred: bool = False

    def copy(self) -> EdgeEvidence:
        return EdgeEvidence(self.weight, self.pair_count, Counter(self.reasons), self.inferred)

    def merged(self, other: EdgeEvidence) -> EdgeEvidence:
        return EdgeEvidence(
            weight=self.weight + other.weight,
            pair_count=self.pair_count + other.pair_count,
            reasons=self.reasons + other.reasons,
            inferred=self.inferred and other.inferred,
        )


def edge_key(a: str, b: str) -> tuple[str, str]:
    if a == b:
        raise ValueError(f"self-loop on {a!r}")
    return (a, b) if a < b else (b, a)


class CoordinationNetwork:
    """Undirected weighted account graph keyed by canonical ``(a, b)`` pairs."""

    def __init__(self) -> None:
        self.nodes: set[str] = set()
        self.edges: dict[tuple[str, str], EdgeEvidence] = {}

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoordinationNetwork):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __repr__(self) -> str:
        return f"CoordinationNetwork(nodes={len(self.nodes)}, edges={len(self.edges)})"

    def edge(self, a: str, b: str) -> EdgeEvidence | None:
        return self.edges.get(edge_key(a, b))

    def weight(self, a: str, b: str) -> float:
        ev = self.edge(a, b)
        return ev.weight if ev else 0.0

    def add_evidence(self, a: str, b: str, evidence: EdgeEvidence) -> None:
        key = edge_key(a, b)
        self.nodes.update(key)
        current = self.edges.get(key)
        self.edges[key] = evidence.copy() if current is None else current.merged(evidence)

    def copy(self) -> CoordinationNetwork:
        net = CoordinationNetwork()
        net.nodes = set(self.nodes)
        net.edges = {k: v.copy() for k, v in self.edges.items()}
        return net

    def degree(self) -> dict[str, int]:
        deg = {n: 0 for n in self.nodes}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def sorted_edges(self) -> list[tuple[tuple[str, str], EdgeEvidence]]:
        return sorted(self.edges.items())

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(sorted(self.nodes))
        for (a, b), ev in self.sorted_edges():
            g.add_edge(a, b, weight=float(ev.weight), pair_count=ev.pair_count, inferred=ev.inferred)
        return g


def build_window_cn(pairs: Iterable[CoActionPair]) -> CoordinationNetwork:
    """Network for one window: edge weight counts distinct (type, reason) links."""
    net = CoordinationNetwork()
    window = None
    per_edge: dict[tuple[str, str], set[Reason]] = defaultdict(set)
    for pair in pairs:
        if window is None:
            window = pair.window_index
        elif pair.window_index != window:
            raise ValueError("pairs span more than one window")
        per_edge[pair.accounts].add((pair.action_type, pair.reason))
    for (a, b), reasons in per_edge.items():
        net.add_evidence(a, b, EdgeEvidence(float(len(reasons)), len(reasons), Counter(reasons)))
    return net


def aggregate(networks: Iterable[CoordinationNetwork]) -> CoordinationNetwork:
    """Sum edge weights and pair counts; union node sets and reason multisets."""
    out = CoordinationNetwork()
    for net in networks:
        out.nodes |= net.nodes
        for (a, b), ev in net.edges.items():
            out.add_evidence(a, b, ev)
    return out


def build_network(pairs: Iterable[CoActionPair]) -> CoordinationNetwork:
    by_window: dict[int, list[CoActionPair]] = defaultdict(list)
    for pair in pairs:
        by_window[pair.window_index].append(pair)
    return aggregate(build_window_cn(by_window[i]) for i in sorted(by_window))


class Scenario(str, Enum):
    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    F = "f"


class WeightOrderError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioWeights:
    w1: float = 0.8
    w2: float = 0.6
    w3: float = 0.5
    w4: float = 0.4
    w5: float = 0.0
    decay_lambda: float = 1.0
    k_horizon: int = 6

    def __post_init__(self) -> None:
        ws = (1.0, self.w1, self.w2, self.w3, self.w4, self.w5, 0.0)
        if any(not math.isfinite(w) for w in ws) or any(hi < lo for hi, lo in zip(ws, ws[1:])):
            raise WeightOrderError(
                f"scenario weights must satisfy 1 >= w1 >= w2 >= w3 >= w4 >= w5 >= 0, got {ws[1:-1]}"
            )
        if not math.isfinite(self.decay_lambda) or self.decay_lambda < 0:
            raise WeightOrderError(f"decay_lambda must be non-negative, got {self.decay_lambda}")
        if isinstance(self.k_horizon, bool) or not isinstance(self.k_horizon, int) or self.k_horizon < 1:
            raise WeightOrderError(f"k_horizon must be a positive integer, got {self.k_horizon!r}")

    @classmethod
    def zero(cls, **kw) -> ScenarioWeights:
        return cls(w1=0.0, w2=0.0, w3=0.0, w4=0.0, w5=0.0, **kw)

    @classmethod
    def from_text(cls, text: str) -> ScenarioWeights:
        """Parse flat ``key = value`` lines; ``#`` starts a comment."""
        values: dict[str, float | int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in cls.__dataclass_fields__:
                raise WeightOrderError(f"line {lineno}: unrecognised setting {raw.strip()!r}")
            try:
                values[key] = int(value) if key == "k_horizon" else float(value)
            except ValueError:
                raise WeightOrderError(f"line {lineno}: bad value for {key}: {value!r}") from None
        return cls(**values)

    def to_text(self) -> str:
        return "".join(f"{name} = {getattr(self, name)!r}\n" for name in self.__dataclass_fields__)


class ScenarioError(ValueError):
    pass


def _bridge(p1: CoActionPair, p2: CoActionPair) -> str:
    shared = set(p1.accounts) & set(p2.accounts)
    if len(shared) != 1:
        raise ScenarioError(f"pairs share {len(shared)} accounts; exactly one is required")
    return shared.pop()


def classify_scenario(p1: CoActionPair, p2: CoActionPair, cfg: WindowConfig) -> Scenario:
    """Classify the A-B / B-C pair-of-pairs into one of the six scenarios."""
    b = _bridge(p1, p2)
    a, c = p1.other(b), p2.other(b)
    t_a, t_b1, t_b2, t_c = p1.time_of(a), p1.time_of(b), p2.time_of(b), p2.time_of(c)
    gamma = cfg.gamma
    b_gap = abs(t_b1 - t_b2)
    if (p1.action_type, p1.reason) == (p2.action_type, p2.reason):
        if abs(t_a - t_c) < gamma:
            return Scenario.A
        return Scenario.B if b_gap < gamma else Scenario.E
    if all(abs(tb - t) < gamma for tb in (t_b1, t_b2) for t in (t_a, t_c)):
        return Scenario.C
    return Scenario.D if b_gap < gamma else Scenario.F


def transitive_weight(scenario: Scenario, delta_t: float, sw: ScenarioWeights, gamma: int) -> float:
    """Weight of an inferred A-C link; decays with ``delta_t`` in scenarios e and f."""
    scenario = Scenario(scenario)
    if scenario is Scenario.A:
        w = 1.0
    elif scenario is Scenario.B:
        w = sw.w1
    elif scenario is Scenario.C:
        w = sw.w2
    elif scenario is Scenario.D:
        w = sw.w3
    else:
        base = sw.w4 if scenario is Scenario.E else sw.w5
        w = base * math.exp(-sw.decay_lambda * max(delta_t, 0.0) / gamma)
    return min(1.0, max(0.0, w))


def _pair_span(p1: CoActionPair, p2: CoActionPair) -> int:
    times = (p1.t_a, p1.t_b, p2.t_a, p2.t_b)
    return max(times) - min(times)


def inferred_contributions(pairs: Iterable[CoActionPair], sw: ScenarioWeights,
                           cfg: WindowConfig) -> dict[tuple[str, str], float]:
    """Summed inferred weight per A-C edge over all bridged pair-of-pairs.

    Pair-of-pairs whose four action times span ``k_horizon * gamma`` or more
    never interact. Zero-weight inferences are dropped.
    """
    horizon = sw.k_horizon * cfg.gamma
    by_account: dict[str, list[CoActionPair]] = defaultdict(list)
    for pair in pairs:
        by_account[pair.account_a].append(pair)
        by_account[pair.account_b].append(pair)

    totals: dict[tuple[str, str], float] = defaultdict(float)
    recurring_retweets = 0
    for b in sorted(by_account):
        mine = sorted(by_account[b], key=lambda p: (p.time_of(b), p))
        for i, p1 in enumerate(mine):
            a = p1.other(b)
            t_b1 = p1.time_of(b)
            for p2 in mine[i + 1:]:
                if p2.time_of(b) - t_b1 >= horizon:
                    break
                c = p2.other(b)
                if c == a or _pair_span(p1, p2) >= horizon:
                    continue
                scenario = classify_scenario(p1, p2, cfg)
                if scenario is Scenario.A:
                    continue
                if scenario is Scenario.E and p1.action_type is ActionType.RETWEET:
                    recurring_retweets += 1
                w = transitive_weight(scenario, abs(p1.time_of(a) - p2.time_of(c)), sw, cfg.gamma)
                if w > 0.0:
                    totals[edge_key(a, c)] += w
    if recurring_retweets:
        logger.info("%d same-tweet co-retweet pair-of-pairs recur across windows", recurring_retweets)
    return dict(totals)


def strengthen(cn: CoordinationNetwork, pairs: Iterable[CoActionPair], sw: ScenarioWeights,
               cfg: WindowConfig) -> CoordinationNetwork:
    """Add inferred transitive weight to ``cn``; direct weights never decrease."""
    return apply_contributions(cn, inferred_contributions(pairs, sw, cfg))


def apply_contributions(cn: CoordinationNetwork,
                        contributions: Mapping[tuple[str, str], float]) -> CoordinationNetwork:
    out = cn.copy()
    for (a, c), w in sorted(contributions.items()):
        ev = out.edges.get(edge_key(a, c))
        if ev is None:
            out.add_evidence(a, c, EdgeEvidence(weight=w, inferred=True))
        else:
            ev.weight += w
    return out
