"""Fixed-duration time windows over a post stream.

A window ``i`` covers the half-open interval
``[anchor + i*stride, anchor + i*stride + gamma)``. ``stride == gamma``
gives adjacent windows; a smaller stride gives overlapping ones, and
``stride == 1`` is the finest slide representable at one-second resolution.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .ingestion import Post

logger = logging.getLogger(__name__)

# Window sizes (seconds) for the four-window election study: 15, 60, 360, 1440 minutes.
DS1_GAMMAS = (900, 3600, 21600, 86400)
RNC_GAMMA = 10
RNC_THETA = 10.0


@dataclass(frozen=True)
class WindowConfig:
    gamma: int
    stride: int | None = None
    anchor: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.gamma, bool) or not isinstance(self.gamma, int) or self.gamma < 1:
            raise ValueError(f"gamma must be a positive integer, got {self.gamma!r}")
        if self.stride is None:
            object.__setattr__(self, "stride", self.gamma)
        if not isinstance(self.stride, int) or not 1 <= self.stride <= self.gamma:
            raise ValueError(f"stride must be an integer in [1, gamma], got {self.stride!r}")

    @property
    def adjacent(self) -> bool:
        return self.stride == self.gamma

    @property
    def max_windows_per_post(self) -> int:
        return -(-self.gamma // self.stride)

    def bounds(self, index: int) -> tuple[int, int]:
        start = self.anchor + index * self.stride
        return start, start + self.gamma


def default_anchor(posts: Sequence[Post], gamma: int) -> int:
    """First post's timestamp floored to a multiple of ``gamma`` (0 when empty)."""
    if not posts:
        return 0
    first = min(p.timestamp for p in posts)
    return first - first % gamma


@dataclass(frozen=True)
class Window:
    index: int
    start: int
    end: int
    posts: tuple[Post, ...]


def window_indices(t: int, cfg: WindowConfig) -> list[int]:
    """All window indices whose interval contains ``t``, ascending."""
    offset = t - cfg.anchor
    if offset < 0:
        logger.warning("timestamp %d precedes window anchor %d", t, cfg.anchor)
        return []
    hi = offset // cfg.stride
    lo = max(0, (offset - cfg.gamma) // cfg.stride + 1)
    return list(range(lo, hi + 1))


def partition(posts: Sequence[Post], cfg: WindowConfig) -> list[Window]:
    """Assign time-ordered posts to windows; empty windows are omitted."""
    buckets: dict[int, list[Post]] = defaultdict(list)
    for post in posts:
        for i in window_indices(post.timestamp, cfg):
            buckets[i].append(post)
    windows = []
    for i in sorted(buckets):
        start, end = cfg.bounds(i)
        windows.append(Window(i, start, end, tuple(buckets[i])))
    return windows
