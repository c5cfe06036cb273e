import contextlib
import time

import pytest

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def record(name: str):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            if type(exc).__name__ == "Skipped":
                _ACCEPTANCE.append(("SKIP", name, str(exc)))
            else:
                _ACCEPTANCE.append(("FAIL", name, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"))
            raise
        _ACCEPTANCE.append(("PASS", name, f"{time.perf_counter() - start:.1f}s"))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, name, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{status}] {name} ({detail})")
