"""Temporal forensics on extracted communities.

First-poster grids count, for each pair of members, how often they co-acted
and how often each went first. An account that almost always acts second
to a partner is a cheerleader candidate. Account profiles combine posting
rate and the ``followers / (friends + followers)`` reputation heuristic.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .coaction import CoActionPair
from .ingestion import MalformedRecord, Post, parse_timestamp

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400
DAYS_PER_YEAR = 365.25
WEEK_SECONDS = 7 * SECONDS_PER_DAY


@dataclass(frozen=True)
class GridCell:
    total: int
    row_first: int


@dataclass
class FirstPosterGrid:
    accounts: list[str]
    cells: dict[tuple[str, str], GridCell] = field(default_factory=dict)

    def cell(self, row: str, column: str) -> GridCell:
        return self.cells.get((row, column), GridCell(0, 0))

    def ties(self, a: str, b: str) -> int:
        ab, ba = self.cell(a, b), self.cell(b, a)
        return ab.total - ab.row_first - ba.row_first

    def rows(self) -> list[tuple[str, str, int, int, int]]:
        """``(row, column, total, row_first, ties)`` in canonical order."""
        return [
            (r, c, cell.total, cell.row_first, self.ties(r, c))
            for (r, c), cell in sorted(self.cells.items())
        ]


def timing_grid(accounts: Iterable[str], pairs: Iterable[CoActionPair]) -> FirstPosterGrid:
    """Count co-actions and first movers for every pair of ``accounts``.

    ``accounts`` may be an :class:`~coordnet.hcc.Hcc`'s member set; pairs
    involving non-members are ignored. Equal timestamps are ties.
    """
    members = set(getattr(accounts, "accounts", accounts))
    total: dict[tuple[str, str], int] = defaultdict(int)
    first: dict[tuple[str, str], int] = defaultdict(int)
    for p in pairs:
        if p.account_a not in members or p.account_b not in members:
            continue
        a, b = p.account_a, p.account_b
        total[a, b] += 1
        if p.t_a < p.t_b:
            first[a, b] += 1
        elif p.t_b < p.t_a:
            first[b, a] += 1
    cells = {}
    for (a, b), n in total.items():
        cells[a, b] = GridCell(n, first[a, b])
        cells[b, a] = GridCell(n, first[b, a])
    return FirstPosterGrid(sorted(members), cells)


@dataclass(frozen=True)
class CheerleaderReport:
    account: str
    partner: str
    total: int
    follower_fraction: float
    flagged: bool


def cheerleader_scores(grid: FirstPosterGrid, min_pairs: int = 10,
                       threshold: float = 0.9) -> list[CheerleaderReport]:
    """One report per ordered pair with at least ``min_pairs`` co-actions.

    ``follower_fraction`` is the share of co-actions in which ``account``
    acted strictly after ``partner``.
    """
    if min_pairs < 1:
        raise ValueError("min_pairs must be >= 1")
    if not 0.5 < threshold <= 1.0:
        raise ValueError("threshold must be in (0.5, 1]")
    reports = []
    for (row, col), cell in sorted(grid.cells.items()):
        if cell.total < min_pairs:
            continue
        second = cell.total - cell.row_first - grid.ties(row, col)
        fraction = second / cell.total
        reports.append(CheerleaderReport(row, col, cell.total, fraction, fraction >= threshold))
    return reports


def reputation(friends: int, followers: int) -> float:
    if friends < 0 or followers < 0:
        raise ValueError("friend and follower counts must be non-negative")
    denom = friends + followers
    return followers / denom if denom else 0.0


@dataclass(frozen=True)
class AccountMeta:
    user_id: str
    statuses_count: int
    friends_count: int
    followers_count: int
    created_at: int | None = None
    bot_rating: float | None = None


@dataclass(frozen=True)
class AccountProfile:
    account: str
    tweets: int
    age_days: float | None
    tweets_per_day: float | None
    friends: int
    followers: int
    reputation: float
    bot_rating: float | None = None

    @property
    def age_years(self) -> float | None:
        return None if self.age_days is None else self.age_days / DAYS_PER_YEAR


def _count(record: dict, key: str) -> int:
    value = record.get(key, 0)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
        raise MalformedRecord(f"{key} must be a non-negative number")
    return int(value)


def parse_metadata(lines: Iterable[str]) -> tuple[dict[str, AccountMeta], int]:
    """Parse the account sidecar; returns ``(by user_id, skipped count)``."""
    out: dict[str, AccountMeta] = {}
    skipped = 0
    for line in lines:
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            if not isinstance(rec, dict) or rec.get("user_id") in (None, ""):
                raise MalformedRecord("missing user_id")
            created = rec.get("created_at")
            rating = rec.get("bot_rating")
            if rating is not None and (isinstance(rating, bool) or not isinstance(rating, (int, float))):
                raise MalformedRecord("bot_rating must be numeric")
            meta = AccountMeta(
                user_id=str(rec["user_id"]),
                statuses_count=_count(rec, "statuses_count"),
                friends_count=_count(rec, "friends_count"),
                followers_count=_count(rec, "followers_count"),
                created_at=None if created is None else parse_timestamp(created),
                bot_rating=None if rating is None else float(rating),
            )
        except (json.JSONDecodeError, MalformedRecord) as exc:
            skipped += 1
            logger.debug("metadata record skipped: %s", exc)
            continue
        out[meta.user_id] = meta
    return out, skipped


def profile_account(meta: AccountMeta, posts: Sequence[Post] = (),
                    dataset_end: int | None = None) -> AccountProfile:
    """Profile an account as of ``dataset_end`` (default: last post timestamp).

    Age and rate are ``None`` without a creation time or a reference end.
    """
    if dataset_end is None and posts:
        dataset_end = max(p.timestamp for p in posts)
    age_days = rate = None
    if meta.created_at is not None and dataset_end is not None:
        age_days = max(dataset_end - meta.created_at, 0) / SECONDS_PER_DAY
        if meta.statuses_count == 0:
            rate = 0.0
        elif age_days > 0:
            rate = meta.statuses_count / age_days
    return AccountProfile(
        account=meta.user_id,
        tweets=meta.statuses_count,
        age_days=age_days,
        tweets_per_day=rate,
        friends=meta.friends_count,
        followers=meta.followers_count,
        reputation=reputation(meta.friends_count, meta.followers_count),
        bot_rating=meta.bot_rating,
    )


@dataclass(frozen=True)
class ActivityTimeline:
    account: str
    bucket_seconds: int
    counts: list[tuple[int, int]]

    @property
    def total(self) -> int:
        return sum(n for _, n in self.counts)


def activity_timeline(account: str, posts: Sequence[Post], bucket_seconds: int = WEEK_SECONDS,
                      start: int | None = None, end: int | None = None) -> ActivityTimeline:
    """Per-bucket post counts for ``account`` across the whole dataset range.

    Buckets are aligned to multiples of ``bucket_seconds`` and empty ones are
    kept so series from several accounts line up.
    """
    if bucket_seconds < 1:
        raise ValueError("bucket_seconds must be >= 1")
    if start is None:
        start = min((p.timestamp for p in posts), default=0)
    if end is None:
        end = max((p.timestamp for p in posts), default=start)
    first = start - start % bucket_seconds
    last = end - end % bucket_seconds
    counts = dict.fromkeys(range(first, last + 1, bucket_seconds), 0)
    for p in posts:
        if p.account_id == account and start <= p.timestamp <= end:
            counts[p.timestamp - p.timestamp % bucket_seconds] += 1
    return ActivityTimeline(account, bucket_seconds, sorted(counts.items()))
