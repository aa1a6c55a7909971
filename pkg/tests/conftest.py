import numpy as np
import pytest

from povm_coarse import sampling


@pytest.fixture
def rng():
    return np.random.default_rng(20260416)


def gram_rank(ms, rtol=1e-8):
    """Oracle for real-span dimension: rank of the Hilbert-Schmidt Gram matrix."""
    g = np.array([[np.trace(a @ b).real for b in ms] for a in ms])
    w = np.linalg.eigvalsh(g)
    return int(np.sum(w > rtol * w.max()))


def random_psd(rng, d):
    return sampling.psd(rng, d)


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
