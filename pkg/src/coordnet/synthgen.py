"""Synthetic post streams with planted coordination and known ground truth.

By default background posts carry reasons that are never reused, so any
co-action the detector finds among them is a false positive. In realistic
mode background reasons are drawn from a Zipf-weighted pool instead, which
produces incidental co-actions similar to a real stream. Planted groups give every
member one action on a fresh shared reason per event. Planted cheerleader
pairs have the follower act strictly after the leader.

Randomness comes from :class:`random.Random` (MT19937) seeded from the
config, so a given seed always reproduces the same stream byte for byte.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Iterable

from .forensics import AccountMeta
from .ingestion import ActionType, Post

RNG_ALGORITHM = "python-random-mt19937"
BACKGROUND_PREFIX = "bg"


class SynthConfigError(ValueError):
    pass


@dataclass
class PlantedGroup:
    accounts: list[str]
    action_type: ActionType = ActionType.RETWEET
    n_coordination_events: int = 20
    spread_seconds: int = 5


@dataclass
class PlantedCheerleader:
    leader: str
    follower: str
    reaction_delay_max: int = 5
    n_events: int = 50
    action_type: ActionType = ActionType.RETWEET
    alternating: bool = False  # swap who goes first on every other event


@dataclass
class SynthConfig:
    seed: int = 0
    n_background_accounts: int = 1000
    n_background_posts: int = 10_000
    duration_seconds: int = 4 * 86400
    start: int = 1_598_000_000
    groups: list[PlantedGroup] = field(default_factory=list)
    cheerleaders: list[PlantedCheerleader] = field(default_factory=list)
    realistic: bool = False
    reason_pool: int = 200

    def validate(self) -> None:
        if self.n_background_posts < 0 or self.n_background_accounts < 0:
            raise SynthConfigError("background sizes must be non-negative")
        if self.n_background_posts and not self.n_background_accounts:
            raise SynthConfigError("background posts need at least one background account")
        if self.duration_seconds < 1:
            raise SynthConfigError("duration_seconds must be positive")
        if self.realistic and self.reason_pool < 1:
            raise SynthConfigError("reason_pool must be positive in realistic mode")
        planted: list[str] = []
        for g in self.groups:
            if len(g.accounts) < 2 or len(set(g.accounts)) != len(g.accounts):
                raise SynthConfigError(f"group needs >= 2 distinct accounts: {g.accounts}")
            if g.n_coordination_events < 1 or not 0 <= g.spread_seconds < self.duration_seconds:
                raise SynthConfigError(f"bad event settings for group {g.accounts}")
            planted.extend(g.accounts)
        for c in self.cheerleaders:
            if c.leader == c.follower:
                raise SynthConfigError("cheerleader leader and follower must differ")
            if c.reaction_delay_max < 1 or c.n_events < 1 or c.reaction_delay_max >= self.duration_seconds:
                raise SynthConfigError(f"bad event settings for cheerleader pair {c.leader}/{c.follower}")
            planted.extend((c.leader, c.follower))
        clashes = sorted({a for a in planted if a.startswith(BACKGROUND_PREFIX)})
        if clashes:
            raise SynthConfigError(f"planted accounts collide with background namespace: {clashes}")

    @classmethod
    def from_dict(cls, data: dict) -> SynthConfig:
        data = dict(data)
        groups = [
            PlantedGroup(**{**g, "action_type": ActionType(g.get("action_type", "retweet"))})
            for g in data.pop("groups", [])
        ]
        cheer = [
            PlantedCheerleader(**{**c, "action_type": ActionType(c.get("action_type", "retweet"))})
            for c in data.pop("cheerleaders", [])
        ]
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise SynthConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(groups=groups, cheerleaders=cheer, **data)

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self)))


@dataclass(frozen=True)
class PlantedEdge:
    account_a: str
    account_b: str
    expected_pair_count: int
    source: str


@dataclass
class GroundTruth:
    seed: int
    rng: str
    edges: list[PlantedEdge]
    groups: list[list[str]]
    cheerleaders: list[PlantedCheerleader]

    @property
    def planted_accounts(self) -> set[str]:
        out = {a for g in self.groups for a in g}
        for c in self.cheerleaders:
            out.update((c.leader, c.follower))
        return out

    def to_lines(self) -> list[str]:
        lines = [json.dumps({"kind": "meta", "seed": self.seed, "rng": self.rng}, sort_keys=True)]
        for i, g in enumerate(self.groups):
            lines.append(json.dumps({"kind": "group", "group": i, "accounts": g}, sort_keys=True))
        for e in self.edges:
            lines.append(json.dumps({"kind": "edge", **asdict(e)}, sort_keys=True))
        for c in self.cheerleaders:
            lines.append(json.dumps({"kind": "cheerleader", **asdict(c)}, sort_keys=True))
        return lines

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> GroundTruth:
        truth = cls(seed=0, rng="", edges=[], groups=[], cheerleaders=[])
        for line in lines:
            if not line.strip():
                continue
            rec = json.loads(line)
            kind = rec.pop("kind")
            if kind == "meta":
                truth.seed, truth.rng = rec["seed"], rec["rng"]
            elif kind == "group":
                truth.groups.append(rec["accounts"])
            elif kind == "edge":
                truth.edges.append(PlantedEdge(**rec))
            elif kind == "cheerleader":
                rec["action_type"] = ActionType(rec["action_type"])
                truth.cheerleaders.append(PlantedCheerleader(**rec))
        return truth


class _Reasons:
    """Hands out reason values that never repeat within one stream."""

    def __init__(self) -> None:
        self.n = 0

    def __call__(self, prefix: str) -> str:
        self.n += 1
        return f"{prefix}{self.n:07d}"


def _payload(action_type: ActionType, reason: str) -> dict:
    if action_type is ActionType.RETWEET:
        return {"retweet_of": reason}
    if action_type is ActionType.HASHTAG:
        return {"hashtags": (reason,)}
    if action_type is ActionType.URL:
        return {"urls": (f"https://example.org/{reason}",)}
    if action_type is ActionType.MENTION:
        return {"mentions": (reason,)}
    return {"conversation_id": reason}


def _zipf_weights(n: int, s: float = 1.1) -> list[float]:
    return [1.0 / (rank ** s) for rank in range(1, n + 1)]


def generate(cfg: SynthConfig) -> tuple[list[Post], GroundTruth]:
    """Generate a time-ordered stream and the ground truth it was built from."""
    cfg.validate()
    rng = random.Random(cfg.seed)
    fresh = _Reasons()
    drafts: list[tuple[int, str, dict]] = []  # (timestamp, account, payload)
    t0, t_end = cfg.start, cfg.start + cfg.duration_seconds - 1

    bg_accounts = [f"{BACKGROUND_PREFIX}{i:06d}" for i in range(cfg.n_background_accounts)]
    bg_types = [ActionType.RETWEET, ActionType.HASHTAG, ActionType.URL, ActionType.MENTION,
                ActionType.CONVERSATION, None]
    bg_probs = [0.5, 0.2, 0.12, 0.08, 0.05, 0.05]
    pool_weights = _zipf_weights(cfg.reason_pool) if cfg.realistic else None
    for _ in range(cfg.n_background_posts):
        account = rng.choice(bg_accounts)
        t = rng.randint(t0, t_end)
        kind = rng.choices(bg_types, bg_probs)[0]
        if kind is None:
            payload = {}
        elif cfg.realistic:
            rank = rng.choices(range(cfg.reason_pool), pool_weights)[0]
            payload = _payload(kind, f"pop-{kind.value}-{rank:04d}")
        else:
            payload = _payload(kind, fresh("b"))
        drafts.append((t, account, payload))

    edges: list[PlantedEdge] = []
    for gi, group in enumerate(cfg.groups):
        for _ in range(group.n_coordination_events):
            base = rng.randint(t0, t_end - group.spread_seconds)
            payload = _payload(group.action_type, fresh("g"))
            for account in group.accounts:
                drafts.append((base + rng.randint(0, group.spread_seconds), account, payload))
        for a, b in combinations(sorted(group.accounts), 2):
            edges.append(PlantedEdge(a, b, group.n_coordination_events, f"group:{gi}"))

    for ci, c in enumerate(cfg.cheerleaders):
        for event in range(c.n_events):
            base = rng.randint(t0, t_end - c.reaction_delay_max)
            payload = _payload(c.action_type, fresh("c"))
            first, second = (c.follower, c.leader) if c.alternating and event % 2 else (c.leader, c.follower)
            drafts.append((base, first, payload))
            drafts.append((base + rng.randint(1, c.reaction_delay_max), second, payload))
        a, b = sorted((c.leader, c.follower))
        edges.append(PlantedEdge(a, b, c.n_events, f"cheerleader:{ci}"))

    # Ids follow time order so (timestamp, post_id) sorting is stable.
    drafts = sorted(enumerate(drafts), key=lambda d: (d[1][0], d[0]))
    posts = []
    for n, (_, (t, account, payload)) in enumerate(drafts):
        posts.append(Post(post_id=f"p{n:08d}", account_id=account, timestamp=t, **payload))

    truth = GroundTruth(
        seed=cfg.seed,
        rng=RNG_ALGORITHM,
        edges=sorted(edges, key=lambda e: (e.account_a, e.account_b, e.source)),
        groups=[sorted(g.accounts) for g in cfg.groups],
        cheerleaders=list(cfg.cheerleaders),
    )
    return posts, truth


def generate_metadata(cfg: SynthConfig, posts: Iterable[Post]) -> list[AccountMeta]:
    """Plausible account metadata for every account appearing in ``posts``."""
    rng = random.Random(f"{cfg.seed}:metadata")
    out = []
    for account in sorted({p.account_id for p in posts}):
        age_days = rng.randint(30, 4000)
        rate = rng.uniform(0.5, 100.0)
        out.append(AccountMeta(
            user_id=account,
            statuses_count=int(age_days * rate),
            friends_count=rng.randint(0, 20_000),
            followers_count=rng.randint(0, 20_000),
            created_at=cfg.start - age_days * 86400,
            bot_rating=round(rng.random(), 2),
        ))
    return out


def metadata_to_lines(metas: Iterable[AccountMeta]) -> list[str]:
    lines = []
    for m in metas:
        rec = {
            "user_id": m.user_id,
            "statuses_count": m.statuses_count,
            "created_at": m.created_at,
            "friends_count": m.friends_count,
            "followers_count": m.followers_count,
        }
        if m.bot_rating is not None:
            rec["bot_rating"] = m.bot_rating
        lines.append(json.dumps(rec, sort_keys=True))
    return lines
