"""``coordnet`` command line.

Exit codes: 0 success, 2 input/output problem, 3 invalid configuration,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__, artifacts, pipeline
from .coaction import detect_coactions
from .forensics import WEEK_SECONDS, parse_metadata
from .hcc import extract_hccs, removed_bridges
from .ingestion import ActionType, parse_posts, serialize_posts
from .network import ScenarioWeights, WeightOrderError, build_network, strengthen
from .synthgen import SynthConfig, generate, generate_metadata, metadata_to_lines
from .windowing import DS1_GAMMAS, RNC_GAMMA, RNC_THETA, WindowConfig

logger = logging.getLogger("coordnet")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_INTERNAL = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _require_file(path: str | None, what: str) -> Path:
    if path is None or not Path(path).is_file():
        raise CliError(f"{what} file not found: {path}", EXIT_IO)
    return Path(path)


def _read_lines(path: str | Path, what: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {what} file {path}: {exc}", EXIT_IO) from exc


class RunContext:
    """Collects the run manifest while a command executes."""

    def __init__(self, argv: Sequence[str]):
        self.started = time.perf_counter()
        self.manifest: dict = {
            "coordnet_version": __version__,
            "command": ["coordnet", *argv],
            "inputs": {},
            "config_hashes": {},
            "settings": {},
            "counts": {},
        }

    def track_input(self, path: Path, role: str) -> None:
        self.manifest["inputs"][role] = {"path": str(path), "sha256": _sha256(path)}

    def count(self, **counts) -> None:
        self.manifest["counts"].update(counts)

    def finish(self, out_dir: Path) -> None:
        self.manifest["wall_time_seconds"] = round(time.perf_counter() - self.started, 3)
        text = json.dumps(self.manifest, indent=2, sort_keys=True) + "\n"
        artifacts.write_atomic(Path(out_dir) / "manifest.json", text)


def _weights(args, ctx: RunContext) -> ScenarioWeights:
    if not args.weights:
        return ScenarioWeights()
    path = _require_file(args.weights, "weights")
    text = "\n".join(_read_lines(path, "weights"))
    ctx.manifest["config_hashes"]["weights"] = hashlib.sha256(text.encode()).hexdigest()
    try:
        return ScenarioWeights.from_text(text)
    except WeightOrderError as exc:
        raise CliError(f"invalid weights file {path}: {exc}", EXIT_CONFIG) from exc


def _settings(args, ctx: RunContext) -> tuple[pipeline.Settings, list[int]]:
    """Validate every flag; called before any input data is read."""
    weights = _weights(args, ctx)
    theta = args.theta
    if args.gamma_preset == "ds1":
        gammas = list(DS1_GAMMAS)
    elif args.gamma_preset == "rnc":
        gammas = [RNC_GAMMA]
        theta = RNC_THETA if theta is None else theta
    else:
        gammas = [args.gamma if args.gamma is not None else RNC_GAMMA]
    try:
        types = ActionType.parse_list(args.types)
    except ValueError as exc:
        raise CliError(f"invalid --types: {exc}", EXIT_CONFIG) from exc
    anchor = None
    if args.anchor not in (None, "auto"):
        try:
            anchor = int(args.anchor)
        except ValueError:
            raise CliError(f"invalid --anchor {args.anchor!r}", EXIT_CONFIG) from None

    problems = []
    for g in gammas:
        try:
            WindowConfig(g, args.stride)
        except ValueError as exc:
            problems.append(str(exc))
    theta = 10.0 if theta is None else theta
    if theta < 0:
        problems.append("theta must be non-negative")
    if args.min_size < 2:
        problems.append("min-size must be at least 2")
    if args.min_pairs < 1:
        problems.append("min-pairs must be at least 1")
    if not 0.5 < args.cheer_threshold <= 1:
        problems.append("cheer-threshold must be in (0.5, 1]")
    if args.bucket < 1:
        problems.append("bucket must be at least 1 second")
    if problems:
        raise CliError("; ".join(problems), EXIT_CONFIG)

    settings = pipeline.Settings(
        gamma=gammas[0], stride=args.stride, anchor=anchor, theta=theta, min_size=args.min_size,
        types=types, weights=weights, strengthen=not args.no_strengthen,
        own_actions_only=args.own_actions_only, min_pairs=args.min_pairs,
        cheer_threshold=args.cheer_threshold, bucket_seconds=args.bucket,
    )
    ctx.manifest["settings"] = {
        "gammas": gammas, "stride": args.stride, "anchor": args.anchor or "auto", "theta": theta,
        "min_size": args.min_size, "types": sorted(t.value for t in types),
        "weights": weights.to_text().splitlines(), "strengthen": settings.strengthen,
        "own_actions_only": args.own_actions_only, "min_pairs": args.min_pairs,
        "cheer_threshold": args.cheer_threshold, "bucket_seconds": args.bucket,
    }
    return settings, gammas


def _single_gamma(gammas: list[int]) -> int:
    if len(gammas) != 1:
        raise CliError("this command takes one gamma; presets with several apply to detect and pipeline",
                       EXIT_CONFIG)
    return gammas[0]


def _load_posts(path: str | None, ctx: RunContext):
    p = _require_file(path, "posts")
    ctx.track_input(p, "posts")
    parsed = parse_posts(_read_lines(p, "posts"))
    ctx.count(posts_parsed=len(parsed.posts), posts_skipped=parsed.skipped)
    return parsed.posts


def _load_metadata(path: str | None, ctx: RunContext):
    if not path:
        return None
    p = _require_file(path, "metadata")
    ctx.track_input(p, "metadata")
    metas, skipped = parse_metadata(_read_lines(p, "metadata"))
    ctx.count(metadata_accounts=len(metas), metadata_skipped=skipped)
    return metas


def _gamma_dirs(out_dir: Path, gammas: list[int]) -> list[tuple[int, Path]]:
    if len(gammas) == 1:
        return [(gammas[0], out_dir)]
    return [(g, out_dir / f"gamma_{g}") for g in gammas]


def cmd_detect(args, ctx: RunContext) -> Path:
    settings, gammas = _settings(args, ctx)
    posts = _load_posts(args.posts, ctx)
    out = Path(args.out_dir)
    for gamma, target in _gamma_dirs(out, gammas):
        cfg = replace(settings, gamma=gamma).window_config(posts)
        pairs = detect_coactions(posts, cfg, settings.types, settings.own_actions_only)
        artifacts.write_pairs(target / "pairs.csv", pairs)
        ctx.count(**{f"pairs_gamma_{gamma}": len(pairs)})
    return out


def cmd_network(args, ctx: RunContext) -> Path:
    _settings(args, ctx)
    ctx.track_input(_require_file(args.pairs, "pairs"), "pairs")
    pairs = artifacts.read_pairs(args.pairs)
    net = build_network(pairs)
    out = Path(args.out_dir)
    artifacts.write_edges(out / "network.csv", net)
    if args.graphml:
        artifacts.write_graphml(out / "network.graphml", net)
    ctx.count(pairs=len(pairs), edges=len(net.edges))
    return out


def cmd_strengthen(args, ctx: RunContext) -> Path:
    settings, gammas = _settings(args, ctx)
    gamma = _single_gamma(gammas)
    ctx.track_input(_require_file(args.pairs, "pairs"), "pairs")
    pairs = artifacts.read_pairs(args.pairs)
    if args.network:
        ctx.track_input(_require_file(args.network, "network"), "network")
        net = artifacts.read_edges(args.network)
    else:
        net = build_network(pairs)
    strong = strengthen(net, pairs, settings.weights, WindowConfig(gamma, settings.stride))
    out = Path(args.out_dir)
    artifacts.write_edges(out / "edges.csv", strong)
    if args.graphml:
        artifacts.write_graphml(out / "edges.graphml", strong)
    ctx.count(pairs=len(pairs), edges=len(strong.edges),
              inferred_edges=sum(ev.inferred for ev in strong.edges.values()))
    return out


def cmd_hcc(args, ctx: RunContext) -> Path:
    settings, _ = _settings(args, ctx)
    ctx.track_input(_require_file(args.edges, "edges"), "edges")
    net = artifacts.read_edges(args.edges)
    hccs = extract_hccs(net, settings.theta, settings.min_size)
    out = Path(args.out_dir)
    artifacts.write_hccs(out, hccs)
    artifacts.write_lines(out / "removed_bridges.txt", removed_bridges(net, settings.theta))
    ctx.count(edges=len(net.edges), hccs=len(hccs))
    return out


def cmd_forensics(args, ctx: RunContext) -> Path:
    settings, _ = _settings(args, ctx)
    ctx.track_input(_require_file(args.pairs, "pairs"), "pairs")
    ctx.track_input(_require_file(args.members, "members"), "members")
    metadata = _load_metadata(args.metadata, ctx)
    posts = _load_posts(args.posts, ctx)
    pairs = artifacts.read_pairs(args.pairs)
    members = artifacts.read_hcc_members(args.members)
    results = {
        hid: pipeline.community_forensics(accounts, pairs, posts, settings, metadata)
        for hid, accounts in members.items()
    }
    out = Path(args.out_dir)
    pipeline.write_forensics(out, results)
    ctx.count(hccs=len(members))
    return out


def cmd_pipeline(args, ctx: RunContext) -> Path:
    settings, gammas = _settings(args, ctx)
    metadata = _load_metadata(args.metadata, ctx)
    posts = _load_posts(args.posts, ctx)
    out = Path(args.out_dir)
    for gamma, target in _gamma_dirs(out, gammas):
        result = pipeline.run(posts, replace(settings, gamma=gamma), metadata)
        pipeline.write_result(result, target, graphml=args.graphml)
        ctx.count(**{f"gamma_{gamma}": result.counts()})
    return out


def cmd_synth(args, ctx: RunContext) -> Path:
    cfg_path = _require_file(args.config, "synth config")
    ctx.track_input(cfg_path, "config")
    try:
        cfg = SynthConfig.from_dict(json.loads("\n".join(_read_lines(cfg_path, "synth config"))))
        if args.seed is not None:
            cfg.seed = args.seed
        if args.realistic:
            cfg.realistic = True
        posts, truth = generate(cfg)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise CliError(f"invalid synth config {cfg_path}: {exc}", EXIT_CONFIG) from exc
    artifacts.write_lines(args.out, serialize_posts(posts))
    artifacts.write_lines(args.truth, truth.to_lines())
    if args.metadata_out:
        artifacts.write_lines(args.metadata_out, metadata_to_lines(generate_metadata(cfg, posts)))
    ctx.manifest["settings"] = {"synth": cfg.to_dict(), "rng": truth.rng}
    ctx.count(posts=len(posts), planted_edges=len(truth.edges))
    return Path(args.out_dir) if args.out_dir else Path(args.out).parent


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--gamma", type=int, help="window duration in seconds (default 10)")
    g.add_argument("--gamma-preset", choices=["ds1", "rnc"],
                   help="ds1: gamma in {900,3600,21600,86400}; rnc: gamma=10, theta=10")
    g.add_argument("--stride", type=int, help="window slide in seconds (default: gamma, i.e. adjacent)")
    g.add_argument("--anchor", default="auto", help="epoch seconds of window 0, or 'auto'")
    g.add_argument("--theta", type=float, help="keep edges with weight > theta (default 10)")
    g.add_argument("--min-size", type=int, default=2, help="smallest community reported")
    g.add_argument("--types", default="retweet",
                   help="comma list of retweet,hashtag,url,mention,conversation")
    g.add_argument("--own-actions-only", action="store_true",
                   help="ignore hashtags/URLs/mentions carried inside retweets")
    g.add_argument("--weights", help="scenario weight file (key = value lines)")
    g.add_argument("--no-strengthen", action="store_true", help="skip temporal strengthening")
    g.add_argument("--metadata", help="account metadata sidecar (JSON lines)")
    g.add_argument("--min-pairs", type=int, default=10, help="co-actions needed for a cheerleader report")
    g.add_argument("--cheer-threshold", type=float, default=0.9, help="follower fraction that flags")
    g.add_argument("--bucket", type=int, default=WEEK_SECONDS, help="timeline bucket in seconds")
    g.add_argument("--graphml", action="store_true", help="also write GraphML networks")
    g.add_argument("--out-dir", default=".", help="output directory")
    g.add_argument("-v", "--verbose", action="count", default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="coordnet", description="Temporal coordination network analysis.")
    parser.add_argument("--version", action="version", version=f"coordnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", parents=[common], help="find co-action pairs")
    p.add_argument("posts")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("network", parents=[common], help="aggregate pairs into a coordination network")
    p.add_argument("pairs")
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("strengthen", parents=[common], help="add inferred transitive edges")
    p.add_argument("pairs")
    p.add_argument("--network", help="network.csv from the network command (default: rebuilt from pairs)")
    p.set_defaults(func=cmd_strengthen)

    p = sub.add_parser("hcc", parents=[common], help="extract highly coordinating communities")
    p.add_argument("edges")
    p.set_defaults(func=cmd_hcc)

    p = sub.add_parser("forensics", parents=[common], help="first-poster grids, cheerleaders, profiles")
    p.add_argument("--pairs", required=True)
    p.add_argument("--members", required=True, help="hcc_members.csv from the hcc command")
    p.add_argument("--posts", required=True)
    p.set_defaults(func=cmd_forensics)

    p = sub.add_parser("pipeline", aliases=["report"], parents=[common], help="run every stage")
    p.add_argument("posts")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("synth", help="generate a synthetic stream with planted coordination")
    p.add_argument("--config", required=True, help="JSON synth config")
    p.add_argument("--out", required=True, help="posts JSON lines output")
    p.add_argument("--truth", required=True, help="ground truth JSON lines output")
    p.add_argument("--metadata-out", help="also write an account metadata sidecar")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--realistic", action="store_true", help="reuse popular reasons across background posts")
    p.add_argument("--out-dir", help="where manifest.json goes (default: next to --out)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    ctx = RunContext(argv)
    try:
        out_dir = args.func(args, ctx)
        ctx.finish(out_dir)
    except CliError as exc:
        logger.error("%s", exc)
        return exc.code
    except artifacts.ArtifactFormatError as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
    except (AssertionError, ValueError, KeyError) as exc:
        logger.exception("internal invariant breach: %s", exc)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
