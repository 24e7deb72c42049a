from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coordnet.coaction import CoActionPair  # noqa: E402
from coordnet.ingestion import ActionType, Post  # noqa: E402

_criteria: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["passed"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        report._criterion = (mark.kwargs["criterion"], mark.kwargs["title"])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["passed"] and entry["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {entry['title']}")


@pytest.fixture
def post():
    counter = iter(range(1_000_000))

    def make(account: str, t: int, *, rt: str | None = None, tags=(), urls=(), mentions=(),
             conv: str | None = None, pid: str | None = None) -> Post:
        return Post(
            post_id=pid or f"p{next(counter):06d}",
            account_id=account,
            timestamp=t,
            retweet_of=rt,
            hashtags=tuple(tags),
            urls=tuple(urls),
            mentions=tuple(mentions),
            conversation_id=conv,
        )

    return make


def rt_pair(a: str, b: str, ta: int, tb: int, reason: str = "T1", window: int = 0,
            action_type: ActionType = ActionType.RETWEET) -> CoActionPair:
    return CoActionPair.make(window, action_type, reason, a, ta, b, tb)
