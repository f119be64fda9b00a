import pytest

from scribeloop import fixtures


def pytest_runtest_makereport(item, call):
    """Print one PASS/FAIL line per acceptance criterion, capture or not."""
    if call.when != "call":
        return
    label = getattr(getattr(item, "function", None), "_acceptance_label", None)
    if label is None:
        return
    status = "PASS" if call.excinfo is None else "FAIL"
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line(f"[acceptance] {status}  {label}")


@pytest.fixture(scope="session")
def reference_text() -> str:
    return fixtures.reference_text()


@pytest.fixture(scope="session")
def asr_text() -> str:
    return fixtures.asr_text()


@pytest.fixture(scope="session")
def term_list():
    return fixtures.term_list()


@pytest.fixture()
def mock_provider():
    return fixtures.mock_provider()
