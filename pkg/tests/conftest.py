import numpy as np
import pytest

from entscope import DensityMatrix


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per criterion for the terminal summary."""

    def record(label, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        request.config.acceptance_lines.append(f"[{status}] {label}: {detail}")
        return passed

    return record


def mixture(*pairs):
    """Density matrix sum_i p_i |s_i><s_i| from (p, PureState) pairs."""
    dims = pairs[0][1].dims
    return DensityMatrix(dims, sum(p * np.outer(s.amps, s.amps.conj()) for p, s in pairs))


@pytest.fixture
def mix():
    return mixture
