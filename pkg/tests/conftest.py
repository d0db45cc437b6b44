import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_normal_matrix(rng, n):
    """Unitary similarity of a random complex diagonal: normal by construction."""
    Q, _ = np.linalg.qr(random_complex(rng, (n, n)))
    lam = random_complex(rng, n)
    return Q @ np.diag(lam) @ Q.conj().T, lam


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record a one-line pass/fail verdict for an acceptance criterion.

    Usage: ``criterion(3, "description", ok, detail)``; the test still
    asserts ``ok`` so the pytest outcome and the printed line agree.
    """
    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
