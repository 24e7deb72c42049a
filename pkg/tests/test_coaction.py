import random
from dataclasses import replace

from hypothesis import given, settings
from hypothesis import strategies as st

from coordnet.coaction import CoActionPair, coaction_stream, detect_coactions, find_coactions
from coordnet.ingestion import ALL_TYPES, ActionType, Post
from coordnet.windowing import Window, WindowConfig, partition
from oracles import all_pairs_within_gamma, brute_force_pairs
from strategies import post_streams, window_configs

RT = {ActionType.RETWEET}


def test_shared_retweet_in_one_window(post):
    w = Window(0, 0, 10, [post("A", 1, rt="T1"), post("B", 4, rt="T1")])
    (pair,) = find_coactions(w)
    assert (pair.account_a, pair.account_b, pair.action_type, pair.reason) == ("A", "B", ActionType.RETWEET, "T1")
    assert (pair.t_a, pair.t_b) == (1, 4)


def test_three_accounts_give_three_pairs(post):
    w = Window(0, 0, 10, [post("A", 1, rt="T1"), post("B", 2, rt="T1"), post("C", 3, rt="T1")])
    assert [p.accounts for p in find_coactions(w)] == [("A", "B"), ("A", "C"), ("B", "C")]


def test_same_account_never_pairs_with_itself(post):
    w = Window(0, 0, 10, [post("A", 1, rt="T1"), post("A", 2, rt="T1")])
    assert find_coactions(w) == []


def test_repeat_uses_earliest_instance(post):
    w = Window(0, 0, 10, [post("A", 1, tags=["x"]), post("A", 5, tags=["x"]), post("B", 3, tags=["x"])])
    (pair,) = find_coactions(w)
    assert (pair.t_a, pair.t_b) == (1, 3)


def test_two_reasons_two_pairs(post):
    w = Window(0, 0, 10, [post("A", 1, rt="T1", tags=["x"]), post("B", 2, rt="T1", tags=["x"])])
    pairs = find_coactions(w)
    assert {(p.action_type, p.reason) for p in pairs} == {(ActionType.RETWEET, "T1"), (ActionType.HASHTAG, "x")}


def test_type_filter(post):
    w = Window(0, 0, 10, [post("A", 1, tags=["x"]), post("B", 2, tags=["x"])])
    assert find_coactions(w, RT) == []


def test_overlap_duplicate_collapsed_to_first_window(post):
    posts = [post("A", 6, rt="T1"), post("B", 8, rt="T1")]
    cfg = WindowConfig(10, 5)
    assert len(partition(posts, cfg)) == 2
    (pair,) = coaction_stream(partition(posts, cfg))
    assert pair.window_index == 0
    assert detect_coactions(posts, cfg) == [pair]


def test_canonical_order_enforced():
    import pytest

    with pytest.raises(ValueError):
        CoActionPair(0, "B", "A", ActionType.RETWEET, "T", 1, 2)
    p = CoActionPair.make(0, ActionType.RETWEET, "T", "B", 5, "A", 7)
    assert p.accounts == ("A", "B") and p.time_of("B") == 5 and p.other("A") == "B"


@given(post_streams(), window_configs())
@settings(max_examples=200, deadline=None)
def test_fast_path_matches_window_path(posts, cfg):
    slow = coaction_stream(partition(posts, cfg))
    assert detect_coactions(posts, cfg) == slow


@given(post_streams(), window_configs(), st.booleans())
@settings(max_examples=200, deadline=None)
def test_matches_brute_force(posts, cfg, own_only):
    got = detect_coactions(posts, cfg, ALL_TYPES, own_only)
    assert {p.key for p in got} == brute_force_pairs(posts, cfg, ALL_TYPES, own_only)
    for p in got:
        assert p.account_a < p.account_b
        assert abs(p.t_a - p.t_b) < cfg.gamma


@given(post_streams(), window_configs(), st.permutations(["A", "B", "C", "D", "E", "F"]))
@settings(max_examples=100, deadline=None)
def test_relabelling_accounts(posts, cfg, perm):
    mapping = dict(zip(["A", "B", "C", "D", "E", "F"], [f"z{x}" for x in perm]))
    renamed = [replace(p, account_id=mapping[p.account_id]) for p in posts]
    original = {
        CoActionPair.make(p.window_index, p.action_type, p.reason,
                          mapping[p.account_a], p.t_a, mapping[p.account_b], p.t_b)
        for p in detect_coactions(posts, cfg)
    }
    assert set(detect_coactions(renamed, cfg)) == original


@given(post_streams(max_posts=30, max_time=60), st.integers(1, 20))
@settings(max_examples=100, deadline=None)
def test_adjacent_subset_of_overlapping(posts, gamma):
    adj = {p.key for p in detect_coactions(posts, WindowConfig(gamma))}
    fine = {p.key for p in detect_coactions(posts, WindowConfig(gamma, 1))}
    assert adj <= fine


def test_stride_one_equals_plain_gamma_pairing_without_repeats():
    rng = random.Random(7)
    posts = []
    used = set()
    while len(posts) < 500:
        acc, tweet = f"u{rng.randrange(60)}", f"T{rng.randrange(120)}"
        if (acc, tweet) in used:
            continue
        used.add((acc, tweet))
        posts.append(Post(f"p{len(posts):04d}", acc, rng.randrange(5000), retweet_of=tweet))
    posts.sort(key=lambda p: (p.timestamp, p.post_id))
    cfg = WindowConfig(30, 1)
    got = {p.key for p in detect_coactions(posts, cfg, RT)}
    assert got == all_pairs_within_gamma(posts, 30, RT)
    assert got == brute_force_pairs(posts, cfg, RT)
    assert got
