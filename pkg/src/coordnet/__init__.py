"""Detect temporally coordinated behaviour in social media post streams."""

from .coaction import CoActionPair, coaction_stream, detect_coactions, find_coactions
from .forensics import (
    AccountMeta,
    AccountProfile,
    ActivityTimeline,
    CheerleaderReport,
    FirstPosterGrid,
    activity_timeline,
    cheerleader_scores,
    profile_account,
    reputation,
    timing_grid,
)
from .hcc import Hcc, connected_components, extract_hccs, filter_edges
from .ingestion import ActionInstance, ActionType, Post, extract_actions, normalize_reason, parse_posts
from .network import (
    CoordinationNetwork,
    EdgeEvidence,
    Scenario,
    ScenarioWeights,
    aggregate,
    build_network,
    build_window_cn,
    classify_scenario,
    strengthen,
    transitive_weight,
)
from .windowing import Window, WindowConfig, partition, window_indices

__version__ = "0.1.0"
