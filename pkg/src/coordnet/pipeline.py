"""End-to-end run: detect, aggregate, strengthen, extract communities, forensics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import artifacts
from .coaction import CoActionPair, detect_coactions
from .forensics import (
    WEEK_SECONDS,
    AccountMeta,
    AccountProfile,
    ActivityTimeline,
    CheerleaderReport,
    FirstPosterGrid,
    activity_timeline,
    cheerleader_scores,
    profile_account,
    timing_grid,
)
from .hcc import Hcc, extract_hccs, removed_bridges
from .ingestion import ActionType, Post
from .network import CoordinationNetwork, ScenarioWeights, build_network, strengthen
from .windowing import WindowConfig, default_anchor

logger = logging.getLogger(__name__)


@dataclass
class Settings:
    gamma: int = 10
    stride: int | None = None
    anchor: int | None = None  # None: derived from the first post
    theta: float = 10.0
    min_size: int = 2
    types: frozenset[ActionType] = frozenset({ActionType.RETWEET})
    weights: ScenarioWeights = field(default_factory=ScenarioWeights)
    strengthen: bool = True
    own_actions_only: bool = False
    min_pairs: int = 10
    cheer_threshold: float = 0.9
    bucket_seconds: int = WEEK_SECONDS

    def window_config(self, posts: Sequence[Post]) -> WindowConfig:
        anchor = default_anchor(posts, self.gamma) if self.anchor is None else self.anchor
        return WindowConfig(self.gamma, self.stride, anchor)


@dataclass
class CommunityForensics:
    grid: FirstPosterGrid
    cheerleaders: list[CheerleaderReport]
    timelines: list[ActivityTimeline]
    profiles: list[AccountProfile]


@dataclass
class PipelineResult:
    window: WindowConfig
    pairs: list[CoActionPair]
    network: CoordinationNetwork
    strengthened: CoordinationNetwork
    hccs: list[Hcc]
    forensics: dict[int, CommunityForensics]
    removed_bridges: list[str]

    def counts(self) -> dict[str, int]:
        return {
            "pairs": len(self.pairs),
            "edges": len(self.network.edges),
            "edges_strengthened": len(self.strengthened.edges),
            "inferred_edges": sum(ev.inferred for ev in self.strengthened.edges.values()),
            "hccs": len(self.hccs),
        }


def community_forensics(members: Sequence[str], pairs: Sequence[CoActionPair], posts: Sequence[Post],
                        settings: Settings,
                        metadata: Mapping[str, AccountMeta] | None = None) -> CommunityForensics:
    grid = timing_grid(members, pairs)
    reports = cheerleader_scores(grid, settings.min_pairs, settings.cheer_threshold)
    start = posts[0].timestamp if posts else 0
    end = posts[-1].timestamp if posts else 0
    timelines = [activity_timeline(a, posts, settings.bucket_seconds, start, end) for a in sorted(members)]
    profiles = []
    if metadata:
        profiles = [profile_account(metadata[a], dataset_end=end) for a in sorted(members) if a in metadata]
    return CommunityForensics(grid, reports, timelines, profiles)


def run(posts: Sequence[Post], settings: Settings,
        metadata: Mapping[str, AccountMeta] | None = None) -> PipelineResult:
    """Run every stage in memory on time-ordered ``posts``."""
    cfg = settings.window_config(posts)
    pairs = detect_coactions(posts, cfg, settings.types, settings.own_actions_only)
    network = build_network(pairs)
    strong = strengthen(network, pairs, settings.weights, cfg) if settings.strengthen else network.copy()
    hccs = extract_hccs(strong, settings.theta, settings.min_size)
    member_pairs: dict[int, list[CoActionPair]] = {}
    owner = {a: h.id for h in hccs for a in h.accounts}
    for p in pairs:
        hid = owner.get(p.account_a)
        if hid is not None and owner.get(p.account_b) == hid:
            member_pairs.setdefault(hid, []).append(p)
    forensics = {
        h.id: community_forensics(sorted(h.accounts), member_pairs.get(h.id, []), posts, settings, metadata)
        for h in hccs
    }
    logger.info("gamma=%d: %d pairs, %d edges, %d communities",
                cfg.gamma, len(pairs), len(strong.edges), len(hccs))
    return PipelineResult(cfg, pairs, network, strong, hccs, forensics,
                          removed_bridges(strong, settings.theta))


def write_forensics(out_dir: Path, results: Mapping[int, CommunityForensics]) -> None:
    cheer, profiles, timelines = [], {}, []
    for hid, f in sorted(results.items()):
        artifacts.write_grid(out_dir / "grids" / f"hcc_{hid}.csv", f.grid)
        cheer.extend(artifacts.cheer_rows(hid, f.cheerleaders))
        timelines.extend(artifacts.timeline_rows(hid, f.timelines))
        for p in f.profiles:
            profiles[p.account] = p
    artifacts.write_csv(out_dir / "cheerleaders.csv", artifacts.CHEER_COLUMNS, cheer)
    artifacts.write_csv(out_dir / "timelines.csv", artifacts.TIMELINE_COLUMNS, timelines)
    artifacts.write_csv(out_dir / "profiles.csv", artifacts.PROFILE_COLUMNS,
                        artifacts.profile_rows(profiles.values()))


def write_result(result: PipelineResult, out_dir: str | Path, graphml: bool = False) -> None:
    out_dir = Path(out_dir)
    artifacts.write_pairs(out_dir / "pairs.csv", result.pairs)
    artifacts.write_edges(out_dir / "network.csv", result.network)
    artifacts.write_edges(out_dir / "edges.csv", result.strengthened)
    if graphml:
        artifacts.write_graphml(out_dir / "edges.graphml", result.strengthened)
    artifacts.write_hccs(out_dir, result.hccs)
    artifacts.write_lines(out_dir / "removed_bridges.txt", result.removed_bridges)
    write_forensics(out_dir, result.forensics)
