import math
import os
import time

import hypothesis

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def within_sigma(count: int, n: int, p: float, k: float = 3.0) -> bool:
    """Binomial count is within k standard deviations of n*p."""
    sigma = math.sqrt(n * p * (1 - p))
    return abs(count - n * p) <= k * sigma


_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}
SESSION_START = time.perf_counter()


def pytest_collection_modifyitems(items):
    # acceptance gate last, so its runtime check covers the whole session
    items.sort(key=lambda item: item.get_closest_marker("criterion") is not None)


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    _ACCEPTANCE[number] = ("PASS" if call.excinfo is None else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        verdict, title, detail = _ACCEPTANCE[number]
        line = f"[{verdict}] {number:>2}. {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
