import numpy as np
import pytest


def brute_partial_trace(rho, n, discard):
    """Index-loop partial trace; independent of the library's index maps."""
    keep = [q for q in range(n) if q not in discard]
    dk = 1 << len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for a in range(1 << n):
        for b in range(1 << n):
            bits_a = [(a >> (n - 1 - q)) & 1 for q in range(n)]
            bits_b = [(b >> (n - 1 - q)) & 1 for q in range(n)]
            if any(bits_a[q] != bits_b[q] for q in discard):
                continue
            i = int("".join(str(bits_a[q]) for q in keep), 2)
            j = int("".join(str(bits_b[q]) for q in keep), 2)
            out[i, j] += rho[a, b]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[num])
