"""Parsing, validation and normalisation of the input post stream.

Input is newline-delimited JSON, one post per line::

    {"id": "p1", "user_id": "u1", "created_at": 1598000000,
     "retweeted_status_id": "t9", "hashtags": ["MAGA"], "urls": [],
     "mentions": [], "conversation_id": null}

Malformed lines are skipped and tallied rather than aborting the parse.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable
from urllib.parse import urlsplit, urlunsplit

logger = logging.getLogger(__name__)


class ActionType(str, Enum):
    RETWEET = "retweet"
    HASHTAG = "hashtag"
    URL = "url"
    MENTION = "mention"
    CONVERSATION = "conversation"

    @classmethod
    def parse_list(cls, text: str) -> frozenset[ActionType]:
        """Parse a comma-separated list such as ``"retweet,hashtag"``."""
        names = [part.strip().lower() for part in text.split(",") if part.strip()]
        if not names:
            raise ValueError("at least one action type is required")
        return frozenset(cls(name) for name in names)


ALL_TYPES = frozenset(ActionType)


@dataclass(frozen=True)
class Post:
    post_id: str
    account_id: str
    timestamp: int
    retweet_of: str | None = None
    hashtags: tuple[str, ...] = ()
    urls: tuple[str, ...] = ()
    mentions: tuple[str, ...] = ()
    conversation_id: str | None = None

    @property
    def is_reply(self) -> bool:
        # A conversation root carries its own id as conversation_id.
        return self.conversation_id is not None and self.conversation_id != self.post_id


@dataclass(frozen=True)
class ActionInstance:
    action_type: ActionType
    reason: str
    account_id: str
    timestamp: int
    post_id: str


@dataclass
class ParseResult:
    posts: list[Post] = field(default_factory=list)
    skipped: int = 0
    duplicates: int = 0

    def __len__(self) -> int:
        return len(self.posts)


class MalformedRecord(ValueError):
    pass


def _opt_id(value: object, key: str) -> str | None:
    if value is None or value == "":
        return None
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise MalformedRecord(f"{key} must be a string or integer id")
    return str(value)


def _str_list(value: object, key: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list):
        raise MalformedRecord(f"{key} must be an array")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (str, int)):
            raise MalformedRecord(f"{key} items must be strings")
        out.append(str(item))
    return tuple(out)


def parse_timestamp(value: object) -> int:
    if isinstance(value, bool):
        raise MalformedRecord("created_at is not a number")
    if isinstance(value, str):
        try:
            value = float(value.strip())
        except ValueError:
            raise MalformedRecord(f"unparseable created_at {value!r}") from None
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedRecord("created_at is not a finite number")
    ts = math.floor(value)  # sub-second resolution is truncated
    if ts < 0:
        raise MalformedRecord("created_at is negative")
    return int(ts)


def post_from_record(record: dict) -> Post:
    """Build a :class:`Post` from one decoded record, raising :class:`MalformedRecord`."""
    if not isinstance(record, dict):
        raise MalformedRecord("record is not an object")
    post_id = _opt_id(record.get("id"), "id")
    account_id = _opt_id(record.get("user_id"), "user_id")
    if post_id is None:
        raise MalformedRecord("missing id")
    if account_id is None:
        raise MalformedRecord("missing user_id")
    if "created_at" not in record:
        raise MalformedRecord("missing created_at")
    return Post(
        post_id=post_id,
        account_id=account_id,
        timestamp=parse_timestamp(record["created_at"]),
        retweet_of=_opt_id(record.get("retweeted_status_id"), "retweeted_status_id"),
        hashtags=_str_list(record.get("hashtags"), "hashtags"),
        urls=_str_list(record.get("urls"), "urls"),
        mentions=_str_list(record.get("mentions"), "mentions"),
        conversation_id=_opt_id(record.get("conversation_id"), "conversation_id"),
    )


def parse_posts(lines: Iterable[str]) -> ParseResult:
    """Parse JSON-lines records into posts ordered by ``(timestamp, post_id)``.

    Blank lines are ignored. Malformed records and repeated post ids are
    skipped and counted in the result instead of raising.
    """
    result = ParseResult()
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            post = post_from_record(json.loads(line))
        except (json.JSONDecodeError, MalformedRecord) as exc:
            result.skipped += 1
            logger.debug("line %d skipped: %s", lineno, exc)
            continue
        if post.post_id in seen:
            result.skipped += 1
            result.duplicates += 1
            logger.debug("line %d skipped: duplicate id %s", lineno, post.post_id)
            continue
        seen.add(post.post_id)
        result.posts.append(post)
    if not result.posts:
        logger.warning("no valid posts parsed (%d records skipped)", result.skipped)
    elif result.skipped:
        logger.warning("%d malformed records skipped", result.skipped)
    result.posts.sort(key=lambda p: (p.timestamp, p.post_id))
    return result


def post_to_record(post: Post) -> dict:
    record: dict = {"id": post.post_id, "user_id": post.account_id, "created_at": post.timestamp}
    if post.retweet_of is not None:
        record["retweeted_status_id"] = post.retweet_of
    record["hashtags"] = list(post.hashtags)
    record["urls"] = list(post.urls)
    record["mentions"] = list(post.mentions)
    if post.conversation_id is not None:
        record["conversation_id"] = post.conversation_id
    return record


def serialize_posts(posts: Iterable[Post]) -> list[str]:
    return [json.dumps(post_to_record(p), ensure_ascii=False, sort_keys=True) for p in posts]


def _canonical_url(raw: str) -> str:
    parts = urlsplit(raw.strip())
    netloc = parts.netloc
    if "@" in netloc:
        userinfo, _, hostport = netloc.rpartition("@")
        netloc = f"{userinfo}@{hostport.lower()}"
    else:
        netloc = netloc.lower()
    path = parts.path.rstrip("/")
    return urlunsplit((parts.scheme.lower(), netloc, path, parts.query, "")).rstrip("/")


def normalize_reason(action_type: ActionType, raw: str) -> str:
    """Return the comparison key for a reason value.

    Hashtags are case-folded with leading ``#`` removed. URLs get a
    lowercase scheme and host, no fragment and no trailing slash; redirects
    are never resolved. Tweet, account and conversation ids pass through.
    An empty return value means the instance should be dropped.
    """
    if action_type is ActionType.HASHTAG:
        return raw.strip().lstrip("#").strip().casefold()
    if action_type is ActionType.URL:
        # Odd inputs such as "http:////Host" only expose their host after one pass.
        url = _canonical_url(raw)
        for _ in range(4):
            again = _canonical_url(url)
            if again == url:
                break
            url = again
        return url
    return raw


def extract_actions(post: Post, own_actions_only: bool = False) -> list[ActionInstance]:
    """List the deduplicated co-action candidates carried by ``post``.

    With ``own_actions_only`` the hashtags, URLs and mentions of a retweet
    are treated as the original author's and ignored.
    """
    raw: list[tuple[ActionType, str]] = []
    if post.retweet_of is not None:
        raw.append((ActionType.RETWEET, post.retweet_of))
    if not (own_actions_only and post.retweet_of is not None):
        raw.extend((ActionType.HASHTAG, h) for h in post.hashtags)
        raw.extend((ActionType.URL, u) for u in post.urls)
        raw.extend((ActionType.MENTION, m) for m in post.mentions)
    if post.is_reply:
        raw.append((ActionType.CONVERSATION, post.conversation_id))

    out: list[ActionInstance] = []
    seen: set[tuple[ActionType, str]] = set()
    for action_type, value in raw:
        reason = normalize_reason(action_type, value)
        if not reason or (action_type, reason) in seen:
            continue
        seen.add((action_type, reason))
        out.append(ActionInstance(action_type, reason, post.account_id, post.timestamp, post.post_id))
    return out
