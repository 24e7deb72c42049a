"""Exit criteria. Each test carries an ``acceptance`` marker and the terminal
summary prints one PASS/FAIL line per criterion."""

import filecmp
import itertools
import json
import random
import time
from pathlib import Path

import pytest

from coordnet import pipeline
from coordnet.cli import main
from coordnet.coaction import detect_coactions
from coordnet.forensics import DAYS_PER_YEAR, SECONDS_PER_DAY, AccountMeta, profile_account, reputation
from coordnet.ingestion import ALL_TYPES, ActionType, Post
from coordnet.network import (
    Scenario,
    ScenarioWeights,
    build_network,
    classify_scenario,
    strengthen,
    transitive_weight,
)
from coordnet.synthgen import PlantedCheerleader, PlantedGroup, SynthConfig, generate
from coordnet.windowing import WindowConfig, default_anchor
from conftest import rt_pair
from oracles import brute_force_pairs

# (account, tweets, age in years, tweets/day, friends, followers, reputation)
PUBLISHED_PROFILES = [
    ("2", 213_400, 6.4, 92.1, 1800, 3600, 0.67),
    ("9", 103_300, 8.8, 32.1, 2400, 1700, 0.42),
    ("10", 24_500, 0.9, 78.7, 24, 118, 0.83),
    ("11", 111_700, 8.5, 36.1, 12_300, 11_300, 0.48),
]

c1 = pytest.mark.acceptance(criterion=1, title="published account profiles: reputation and tweets/day")
c2 = pytest.mark.acceptance(criterion=2, title="stride-1 detection equals brute-force oracle")
c3 = pytest.mark.acceptance(criterion=3, title="adjacent <= overlapping <= oracle, with a straddle miss")
c4 = pytest.mark.acceptance(criterion=4, title="planted groups recovered in 100k background posts")
c5 = pytest.mark.acceptance(criterion=5, title="cheerleader flagged, alternating pair not flagged")
c6 = pytest.mark.acceptance(criterion=6, title="scenario classification and weight ordering over a grid")
c7 = pytest.mark.acceptance(criterion=7, title="zero-weight identity and spurious-bridge suppression")
c8 = pytest.mark.acceptance(criterion=8, title="byte-identical outputs on repeated runs")


# criterion 1


@c1
@pytest.mark.parametrize("row", PUBLISHED_PROFILES, ids=[r[0] for r in PUBLISHED_PROFILES])
def test_profile_reputation(row):
    _, _, _, _, friends, followers, expected = row
    assert reputation(friends, followers) == pytest.approx(expected, abs=0.005)


@c1
@pytest.mark.parametrize("row", PUBLISHED_PROFILES, ids=[r[0] for r in PUBLISHED_PROFILES])
def test_profile_tweets_per_day(row):
    account, tweets, age_years, expected, friends, followers, _ = row
    end = 1_598_918_400
    created = end - round(age_years * DAYS_PER_YEAR * SECONDS_PER_DAY)
    prof = profile_account(AccountMeta(account, tweets, friends, followers, created), dataset_end=end)
    assert prof.tweets_per_day == pytest.approx(expected, abs=1.5)


@c1
def test_profile_runtime():
    start = time.perf_counter()
    end = 1_598_918_400
    for account, tweets, age, _, friends, followers, _ in PUBLISHED_PROFILES:
        created = end - round(age * DAYS_PER_YEAR * SECONDS_PER_DAY)
        profile_account(AccountMeta(account, tweets, friends, followers, created), dataset_end=end)
        reputation(friends, followers)
    assert time.perf_counter() - start < 1.0


# criteria 2 and 3 share the same streams


def oracle_streams():
    rng = random.Random(2024)
    out = []
    for i in range(20):
        cfg = SynthConfig(
            seed=rng.randrange(1 << 30),
            n_background_accounts=rng.randint(20, 120),
            n_background_posts=rng.randint(300, 900),
            duration_seconds=rng.choice([1800, 3600, 7200]),
            realistic=True,
            reason_pool=rng.choice([30, 80, 150]),
            groups=[PlantedGroup(["ga", "gb", "gc"], rng.choice(list(ActionType)), 5, 8)],
            cheerleaders=[PlantedCheerleader("lead", "fan", 6, 10, ActionType.HASHTAG)],
        )
        posts, _ = generate(cfg)
        assert len(posts) <= 1000
        out.append((posts, rng.choice([10, 30, 60, 120])))
    return out


STREAMS = oracle_streams()


@c2
def test_stride_one_equals_oracle():
    start = time.perf_counter()
    total = 0
    for posts, gamma in STREAMS:
        cfg = WindowConfig(gamma, 1, default_anchor(posts, gamma))
        got = {p.key for p in detect_coactions(posts, cfg, ALL_TYPES)}
        assert got == brute_force_pairs(posts, cfg, ALL_TYPES)
        assert {k[2] for k in got} > {ActionType.RETWEET}
        total += len(got)
    assert total > 0
    assert time.perf_counter() - start < 30.0


@c3
def test_window_mode_subset_chain():
    for posts, gamma in STREAMS:
        anchor = default_anchor(posts, gamma)
        oracle = brute_force_pairs(posts, WindowConfig(gamma, 1, anchor), ALL_TYPES)
        adjacent = {p.key for p in detect_coactions(posts, WindowConfig(gamma, anchor=anchor), ALL_TYPES)}
        for stride in (d for d in (gamma // 2, gamma // 5, gamma // 10) if d and gamma % d == 0):
            overlapping = {p.key for p in detect_coactions(posts, WindowConfig(gamma, stride, anchor), ALL_TYPES)}
            assert adjacent <= overlapping <= oracle


@c3
def test_adjacent_misses_straddle():
    posts = [Post("p1", "A", 8, retweet_of="T1"), Post("p2", "B", 12, retweet_of="T1")]
    cfg = WindowConfig(10, 1, 0)
    assert detect_coactions(posts, WindowConfig(10, anchor=0), ALL_TYPES) == []
    assert brute_force_pairs(posts, cfg, ALL_TYPES) == {("A", "B", ActionType.RETWEET, "T1", 8, 12)}
    assert {p.key for p in detect_coactions(posts, cfg, ALL_TYPES)} == brute_force_pairs(posts, cfg, ALL_TYPES)


# criterion 4


@c4
def test_planted_group_recovery():
    groups = [PlantedGroup([f"g{size}_{i}" for i in range(size)], n_coordination_events=20, spread_seconds=5)
              for size in (3, 5, 8)]
    cfg = SynthConfig(seed=42, n_background_accounts=5000, n_background_posts=100_000, groups=groups)
    posts, truth = generate(cfg)
    start = time.perf_counter()
    result = pipeline.run(posts, pipeline.Settings(gamma=10, stride=1, theta=10))
    elapsed = time.perf_counter() - start
    found = {a for h in result.hccs for a in h.accounts}
    planted = truth.planted_accounts
    precision = len(found & planted) / len(found)
    recall = len(found & planted) / len(planted)
    assert precision == 1.0 and recall == 1.0
    assert {h.accounts for h in result.hccs} == {frozenset(g.accounts) for g in groups}
    assert not any(a.startswith("bg") for a in found)
    assert elapsed < 10.0


# criterion 5


@c5
def test_cheerleader_detection():
    cfg = SynthConfig(seed=7, n_background_accounts=300, n_background_posts=5000, cheerleaders=[
        PlantedCheerleader("leader", "follower", 5, 50),
        PlantedCheerleader("left", "right", 5, 50, alternating=True),
    ])
    posts, _ = generate(cfg)
    result = pipeline.run(posts, pipeline.Settings(gamma=10, stride=1, theta=10))
    reports = {(r.account, r.partner): r for f in result.forensics.values() for r in f.cheerleaders}
    follower = reports["follower", "leader"]
    assert follower.total == 50 and follower.follower_fraction == 1.0 and follower.flagged
    assert not reports["leader", "follower"].flagged
    assert reports["left", "right"].follower_fraction == 0.5
    assert not reports["left", "right"].flagged and not reports["right", "left"].flagged


# criterion 6


def expected_scenarios(same, ta, tb1, tb2, tc, g):
    """Each scenario written as a standalone predicate over the four times."""
    near = lambda x, y: abs(x - y) < g  # noqa: E731
    bridged = near(tb1, tb2)
    b_close_to_both = all(near(b, o) for b in (tb1, tb2) for o in (ta, tc))
    return {
        Scenario.A: same and near(ta, tc),
        Scenario.B: same and not near(ta, tc) and bridged,
        Scenario.C: not same and b_close_to_both,
        Scenario.D: not same and not b_close_to_both and bridged,
        Scenario.E: same and not near(ta, tc) and not bridged,
        Scenario.F: not same and not b_close_to_both and not bridged,
    }


@c6
def test_scenario_grid():
    gamma = 3
    cfg = WindowConfig(gamma)
    seen = set()
    grid = range(0, 3 * gamma + 1)
    for ta, tb1, tb2, tc in itertools.product(grid, repeat=4):
        if abs(ta - tb1) >= gamma or abs(tb2 - tc) >= gamma:
            continue  # not co-action pairs
        for same in (True, False):
            p1 = rt_pair("A", "B", ta, tb1, "r1")
            p2 = rt_pair("B", "C", tb2, tc, "r1" if same else "r2")
            truth = expected_scenarios(same, ta, tb1, tb2, tc, gamma)
            holding = [s for s, ok in truth.items() if ok]
            assert len(holding) == 1
            got = classify_scenario(p1, p2, cfg)
            assert got is holding[0]
            seen.add(got)
    assert seen == set(Scenario)


@c6
def test_weight_ordering_over_grid():
    rng = random.Random(3)
    configs = [ScenarioWeights(), ScenarioWeights(w5=0.3), ScenarioWeights.zero(),
               ScenarioWeights(1, 1, 1, 1, 1, 0.0)]
    for _ in range(20):
        ws = sorted((rng.random() for _ in range(5)), reverse=True)
        configs.append(ScenarioWeights(*ws, decay_lambda=rng.uniform(0, 3)))
    gamma = 3
    deltas = range(0, 3 * gamma + 1)
    for sw in configs:
        assert 1 >= sw.w1 >= sw.w2 >= sw.w3 >= sw.w4 >= sw.w5 >= 0
        for dt in deltas:
            values = [transitive_weight(s, dt, sw, gamma) for s in Scenario]
            assert values[0] == 1.0
            assert all(0 <= v <= 1 for v in values)
            assert all(hi >= lo for hi, lo in zip(values, values[1:]))
        for s in (Scenario.E, Scenario.F):
            series = [transitive_weight(s, dt, sw, gamma) for dt in deltas]
            assert all(hi >= lo for hi, lo in zip(series, series[1:]))


# criterion 7


@c7
def test_zero_weights_identity():
    for posts, gamma in STREAMS[:5]:
        cfg = WindowConfig(gamma, max(1, gamma // 2), default_anchor(posts, gamma))
        pairs = detect_coactions(posts, cfg, ALL_TYPES)
        cn = build_network(pairs)
        assert strengthen(cn, pairs, ScenarioWeights.zero(), cfg) == cn
        assert strengthen(cn, pairs, ScenarioWeights(), cfg) != cn


@c7
def test_distant_bridge_suppressed():
    cfg = WindowConfig(10)
    pairs = [rt_pair("A", "B", 1, 3, "r1", window=0), rt_pair("B", "C", 41, 44, "r2", window=4)]
    assert classify_scenario(*pairs, cfg) is Scenario.F
    out = strengthen(build_network(pairs), pairs, ScenarioWeights(), cfg)
    assert out.edge("A", "C") is None
    assert set(out.edges) == {("A", "B"), ("B", "C")}


# criterion 8


def run_all(tmp: Path, cfg_file: Path) -> Path:
    tmp.mkdir()
    posts, truth, meta = tmp / "posts.jsonl", tmp / "truth.jsonl", tmp / "meta.jsonl"
    assert main(["synth", "--config", str(cfg_file), "--out", str(posts), "--truth", str(truth),
                 "--metadata-out", str(meta)]) == 0
    assert main(["pipeline", str(posts), "--gamma", "30", "--stride", "5", "--theta", "5",
                 "--types", "retweet,hashtag,url", "--metadata", str(meta), "--graphml",
                 "--out-dir", str(tmp / "out")]) == 0
    return tmp


@c8
def test_determinism(tmp_path):
    cfg = SynthConfig(seed=99, n_background_accounts=200, n_background_posts=8000, realistic=True,
                      groups=[PlantedGroup(["a", "b", "c", "d"])],
                      cheerleaders=[PlantedCheerleader("lead", "fan")])
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(cfg.to_dict()))
    first = run_all(tmp_path / "one", cfg_file)
    second = run_all(tmp_path / "two", cfg_file)
    files = sorted(p.relative_to(first) for p in first.rglob("*") if p.is_file() and p.name != "manifest.json")
    assert len([f for f in files if f.suffix == ".csv"]) >= 8
    for rel in files:
        assert filecmp.cmp(first / rel, second / rel, shallow=False), rel
