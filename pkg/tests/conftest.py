import pytest

from corpora import build_suite
from whyrank.relatedness import build_stats
from whyrank.retrieval import index_corpus


@pytest.fixture(scope="session")
def suite(tmp_path_factory):
    """The topical-dependence suite with its index and stats files built."""
    root = tmp_path_factory.mktemp("suite")
    paths = build_suite(root)
    paths["index"] = root / "corpus.idx"
    paths["stats"] = root / "reference.stats"
    index_corpus(paths["corpus"]).save(paths["index"])
    build_stats(paths["reference"]).save(paths["stats"])
    return paths


# one summary line per acceptance criterion, printed even when output is captured
_CRITERIA: dict[str, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key, title = mark.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        detail = ""
        if report.skipped and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2]
        _CRITERIA[key] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: (int(k.rstrip("ab")), k)):
        title, status, detail = _CRITERIA[key]
        line = f"[{status}] criterion {key}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
