"""Plain-text artifact formats: CSV tables, JSON lines and GraphML.

Every writer emits rows in canonical sort order so identical inputs give
byte-identical files. Files are written to a temporary sibling and moved
into place, so readers never see a half-written artifact.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

from .coaction import CoActionPair
from .forensics import AccountProfile, ActivityTimeline, CheerleaderReport, FirstPosterGrid
from .hcc import Hcc
from .ingestion import ActionType
from .network import CoordinationNetwork, EdgeEvidence

PAIR_COLUMNS = ["window_index", "account_a", "account_b", "action_type", "reason", "t_a", "t_b"]
EDGE_COLUMNS = ["source", "target", "weight", "pair_count", "inferred", "reasons"]
HCC_COLUMNS = ["hcc_id", "size", "total_weight", "star_hub", "star_coefficient"]
GRID_COLUMNS = ["row", "column", "total", "row_first", "ties"]
CHEER_COLUMNS = ["hcc_id", "account", "partner", "total", "follower_fraction", "flagged"]
PROFILE_COLUMNS = ["account", "tweets", "age_years", "tweets_per_day", "bot_rating",
                   "friends", "followers", "reputation", "age_days"]
TIMELINE_COLUMNS = ["hcc_id", "account", "bucket_start", "count"]


class ArtifactFormatError(ValueError):
    pass


def fmt_num(x: float | int | None) -> str:
    """Shortest exact text for a number; integral floats print without ``.0``."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_num(v) if isinstance(v, (int, float)) or v is None else v for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    write_atomic(path, csv_text(header, rows))


def read_csv(path, expected: Sequence[str]) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames[:len(expected)]) != list(expected):
            raise ArtifactFormatError(f"{path}: expected columns {','.join(expected)}")
        return list(reader)


def write_lines(path, lines: Iterable[str]) -> None:
    write_atomic(path, "".join(f"{line}\n" for line in lines))


# pairs

def pair_rows(pairs: Iterable[CoActionPair]) -> list[list[object]]:
    return [[p.window_index, p.account_a, p.account_b, p.action_type.value, p.reason, p.t_a, p.t_b]
            for p in sorted(pairs)]


def write_pairs(path, pairs: Iterable[CoActionPair]) -> None:
    write_csv(path, PAIR_COLUMNS, pair_rows(pairs))


def read_pairs(path) -> list[CoActionPair]:
    try:
        return [
            CoActionPair(int(r["window_index"]), r["account_a"], r["account_b"],
                         ActionType(r["action_type"]), r["reason"], int(r["t_a"]), int(r["t_b"]))
            for r in read_csv(path, PAIR_COLUMNS)
        ]
    except (KeyError, ValueError) as exc:
        raise ArtifactFormatError(f"{path}: {exc}") from exc


# edges

def _escape(value: str) -> str:
    return value.replace("%", "%25").replace("|", "%7C")


def _unescape(value: str) -> str:
    return value.replace("%7C", "|").replace("%25", "%")


def format_reasons(reasons: Counter) -> str:
    items = sorted(reasons.elements(), key=lambda r: (r[0].value, r[1]))
    return "|".join(f"{t.value}:{_escape(v)}" for t, v in items)


def parse_reasons(text: str) -> Counter:
    out: Counter = Counter()
    if not text:
        return out
    for item in text.split("|"):
        type_name, sep, value = item.partition(":")
        if not sep:
            raise ArtifactFormatError(f"bad reason item {item!r}")
        out[ActionType(type_name), _unescape(value)] += 1
    return out


def edge_rows(edges: Iterable[tuple[tuple[str, str], EdgeEvidence]]) -> list[list[object]]:
    return [[a, b, float(ev.weight), ev.pair_count, "true" if ev.inferred else "false",
             format_reasons(ev.reasons)]
            for (a, b), ev in sorted(edges)]


def write_edges(path, cn: CoordinationNetwork) -> None:
    write_csv(path, EDGE_COLUMNS, edge_rows(cn.edges.items()))


def read_edges(path) -> CoordinationNetwork:
    net = CoordinationNetwork()
    try:
        for r in read_csv(path, EDGE_COLUMNS):
            ev = EdgeEvidence(
                weight=float(r["weight"]),
                pair_count=int(r["pair_count"]),
                reasons=parse_reasons(r["reasons"]),
                inferred=r["inferred"] == "true",
            )
            net.add_evidence(r["source"], r["target"], ev)
    except (KeyError, ValueError) as exc:
        raise ArtifactFormatError(f"{path}: {exc}") from exc
    return net


def write_graphml(path, cn: CoordinationNetwork) -> None:
    import networkx as nx

    buf = io.BytesIO()
    nx.write_graphml(cn.to_networkx(), buf)
    write_atomic(path, buf.getvalue().decode("utf-8"))


# communities and forensics

def write_hccs(out_dir, hccs: Sequence[Hcc]) -> None:
    out_dir = Path(out_dir)
    write_csv(out_dir / "hccs.csv", HCC_COLUMNS,
              [[h.id, h.size, float(h.total_weight), h.star_hub or "", float(h.star_coefficient)]
               for h in hccs])
    write_csv(out_dir / "hcc_members.csv", ["hcc_id", "account"],
              [[h.id, a] for h in hccs for a in sorted(h.accounts)])
    for h in hccs:
        write_csv(out_dir / "hcc_edges" / f"hcc_{h.id}.csv", EDGE_COLUMNS, edge_rows(h.edges.items()))


def read_hcc_members(path) -> dict[int, list[str]]:
    members: dict[int, list[str]] = {}
    for r in read_csv(path, ["hcc_id", "account"]):
        members.setdefault(int(r["hcc_id"]), []).append(r["account"])
    return {k: sorted(v) for k, v in sorted(members.items())}


def write_grid(path, grid: FirstPosterGrid) -> None:
    write_csv(path, GRID_COLUMNS, grid.rows())


def cheer_rows(hcc_id: int, reports: Iterable[CheerleaderReport]) -> list[list[object]]:
    return [[hcc_id, r.account, r.partner, r.total, float(r.follower_fraction),
             "true" if r.flagged else "false"] for r in reports]


def profile_rows(profiles: Iterable[AccountProfile]) -> list[list[object]]:
    return [[p.account, p.tweets, p.age_years, p.tweets_per_day, p.bot_rating,
             p.friends, p.followers, float(p.reputation), p.age_days]
            for p in sorted(profiles, key=lambda p: p.account)]


def timeline_rows(hcc_id: int, timelines: Iterable[ActivityTimeline]) -> list[list[object]]:
    return [[hcc_id, tl.account, start, n] for tl in timelines for start, n in tl.counts]
