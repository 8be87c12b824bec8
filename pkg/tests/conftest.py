import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    notes = getattr(mod, "NOTES", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(results):
        checks = results[crit]
        ok = all(c[0] for c in checks)
        terminalreporter.write_line(
            f"criterion {crit:2d}: {'PASS' if ok else 'FAIL'} ({len(checks)} checks)")
        for good, detail in checks:
            terminalreporter.write_line(f"    {'ok  ' if good else 'FAIL'} {detail}")
        for detail in notes.get(crit, []):
            terminalreporter.write_line(f"    info {detail}")
