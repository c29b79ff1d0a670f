import numpy as np
import pytest


class ScriptedStream:
    """Stand-in RNG returning preset normal draws."""

    def __init__(self, normals):
        self._normals = list(normals)

    def normals(self, n):
        out, self._normals = self._normals[:n], self._normals[n:]
        return np.array(out, dtype=float)

    def next_gaussian(self):
        return float(self.normals(1)[0])


@pytest.fixture
def scripted():
    return ScriptedStream


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one summary line per acceptance criterion, then assert it."""

    def report(number, title, ok, detail, status=None):
        status = status or ("PASS" if ok else "FAIL")
        line = f"criterion {number:>2} {status}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
