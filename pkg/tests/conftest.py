import numpy as np
import pytest

# criterion number -> list of (check name, passed, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, name: str, passed: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(passed), detail))
    return bool(passed)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[k]
        failed = [f"{n} ({d})" for n, ok, d in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        tail = f"failed: {'; '.join(failed)}" if failed else f"{len(checks)} checks"
        terminalreporter.write_line(f"criterion {k}: {status}  {tail}")
