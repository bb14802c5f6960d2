import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number = marker.args[0]
    detail = dict(item.user_properties).get("detail", "")
    ok = call.excinfo is None
    if not ok:
        message = str(call.excinfo.value).splitlines()
        error = f"{call.excinfo.typename}: {message[0] if message else ''}"
        detail = f"{detail} [{error}]" if detail else error
    _RESULTS.setdefault(number, []).append((ok, item.name, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        runs = _RESULTS[number]
        ok = all(r[0] for r in runs)
        details = "; ".join(r[2] for r in runs if r[2])
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {details}")


@pytest.fixture
def detail(request):
    """Attach a one-line summary that the acceptance report prints."""

    def record(text):
        request.node.user_properties.append(("detail", text))

    return record
