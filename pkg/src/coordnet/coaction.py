"""Co-action pairs: two accounts sharing an (action type, reason) in one window.

Two equivalent routes are provided. :func:`find_coactions` and
:func:`coaction_stream` follow the windows produced by
:func:`~coordnet.windowing.partition`. :func:`detect_coactions` hash-joins
the whole stream on ``(type, reason)`` first and only expands windows for
groups with at least two accounts, which keeps small strides affordable on
large streams where most reasons are never shared.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .ingestion import ALL_TYPES, ActionInstance, ActionType, Post, extract_actions
from .windowing import Window, WindowConfig, window_indices


@dataclass(frozen=True, order=True)
class CoActionPair:
    window_index: int
    account_a: str
    account_b: str
    action_type: ActionType
    reason: str
    t_a: int
    t_b: int

    def __post_init__(self) -> None:
        if not self.account_a < self.account_b:
            raise ValueError(f"pair accounts not in canonical order: {self.account_a!r}, {self.account_b!r}")

    @classmethod
    def make(cls, window_index: int, action_type: ActionType, reason: str,
             acc1: str, t1: int, acc2: str, t2: int) -> CoActionPair:
        if acc2 < acc1:
            acc1, t1, acc2, t2 = acc2, t2, acc1, t1
        return cls(window_index, acc1, acc2, action_type, reason, t1, t2)

    @property
    def key(self) -> tuple:
        """Identity of the underlying pair of actions, independent of window."""
        return (self.account_a, self.account_b, self.action_type, self.reason, self.t_a, self.t_b)

    @property
    def accounts(self) -> tuple[str, str]:
        return self.account_a, self.account_b

    def time_of(self, account: str) -> int:
        if account == self.account_a:
            return self.t_a
        if account == self.account_b:
            return self.t_b
        raise KeyError(account)

    def other(self, account: str) -> str:
        if account == self.account_a:
            return self.account_b
        if account == self.account_b:
            return self.account_a
        raise KeyError(account)


def _pairs_from_earliest(window_index: int, action_type: ActionType, reason: str,
                         earliest: dict[str, int]) -> list[CoActionPair]:
    accounts = sorted(earliest)
    return [
        CoActionPair(window_index, a, b, action_type, reason, earliest[a], earliest[b])
        for a, b in combinations(accounts, 2)
    ]


def _earliest(actions: Iterable[tuple[int, str]]) -> dict[str, int]:
    earliest: dict[str, int] = {}
    for t, account in actions:
        if account not in earliest or t < earliest[account]:
            earliest[account] = t
    return earliest


def _window_actions(window: Window, types: frozenset[ActionType],
                    own_actions_only: bool) -> dict[tuple[ActionType, str], list[tuple[int, str]]]:
    groups: dict[tuple[ActionType, str], list[tuple[int, str]]] = defaultdict(list)
    for post in window.posts:
        for act in extract_actions(post, own_actions_only):
            if act.action_type in types:
                groups[act.action_type, act.reason].append((act.timestamp, act.account_id))
    return groups


def find_coactions(window: Window, types: Iterable[ActionType] = ALL_TYPES,
                   own_actions_only: bool = False) -> list[CoActionPair]:
    """Co-action pairs inside one window.

    Each account contributes its earliest action per ``(type, reason)`` in
    the window, so an account repeating a reason does not multiply pairs.
    """
    types = frozenset(types)
    pairs: list[CoActionPair] = []
    for (action_type, reason), acts in _window_actions(window, types, own_actions_only).items():
        earliest = _earliest(acts)
        if len(earliest) >= 2:
            pairs.extend(_pairs_from_earliest(window.index, action_type, reason, earliest))
    pairs.sort()
    return pairs


def _collapse(pairs: Iterable[CoActionPair]) -> list[CoActionPair]:
    # Keep the first window in which each underlying action pair was seen.
    best: dict[tuple, CoActionPair] = {}
    for pair in pairs:
        current = best.get(pair.key)
        if current is None or pair.window_index < current.window_index:
            best[pair.key] = pair
    return sorted(best.values())


def coaction_stream(windows: Iterable[Window], types: Iterable[ActionType] = ALL_TYPES,
                    own_actions_only: bool = False) -> list[CoActionPair]:
    """Concatenate per-window pairs, collapsing repeats from overlapping windows."""
    types = frozenset(types)
    return _collapse(p for w in windows for p in find_coactions(w, types, own_actions_only))


def group_actions(posts: Sequence[Post], types: Iterable[ActionType] = ALL_TYPES,
                  own_actions_only: bool = False) -> dict[tuple[ActionType, str], list[ActionInstance]]:
    types = frozenset(types)
    groups: dict[tuple[ActionType, str], list[ActionInstance]] = defaultdict(list)
    for post in posts:
        for act in extract_actions(post, own_actions_only):
            if act.action_type in types:
                groups[act.action_type, act.reason].append(act)
    return groups


def detect_coactions(posts: Sequence[Post], cfg: WindowConfig,
                     types: Iterable[ActionType] = ALL_TYPES,
                     own_actions_only: bool = False) -> list[CoActionPair]:
    """Same result as ``coaction_stream(partition(posts, cfg), types)``."""
    found: list[CoActionPair] = []
    for (action_type, reason), acts in group_actions(posts, types, own_actions_only).items():
        if len(acts) < 2 or len({a.account_id for a in acts}) < 2:
            continue
        per_window: dict[int, list[tuple[int, str]]] = defaultdict(list)
        for act in acts:
            for i in window_indices(act.timestamp, cfg):
                per_window[i].append((act.timestamp, act.account_id))
        for i, window_acts in per_window.items():
            earliest = _earliest(window_acts)
            if len(earliest) >= 2:
                found.extend(_pairs_from_earliest(i, action_type, reason, earliest))
    return _collapse(found)
