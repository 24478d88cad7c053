import pytest

_RESULTS_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS_KEY] = []


@pytest.fixture
def acceptance(request):
    """Call with (number, title, passed, detail, seconds, limit) to log a criterion."""
    results = request.config.stash[_RESULTS_KEY]

    def record(number, title, passed, detail, seconds, limit):
        in_time = seconds < limit
        results.append((number, title, passed and in_time, detail, seconds, limit))
        return passed and in_time

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS_KEY, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail, seconds, limit in sorted(results):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"[{status}] criterion {number}: {title} ({seconds:.2f}s, limit {limit:g}s) - {detail}"
        )
