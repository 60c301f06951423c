from functools import reduce
from pathlib import Path

import numpy as np
import pytest

from cspulse.io import load_instance

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
FIXTURE_NAMES = ["h2_sto3g", "lih_sto3g_cas6", "h4_chain_sto3g"]

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def kron_matrix(label: str) -> np.ndarray:
    """Independent dense oracle: Kronecker product, leftmost factor on qubit 0."""
    return reduce(np.kron, [_SINGLE[c] for c in label], np.eye(1, dtype=complex))


def kron_sum(h) -> np.ndarray:
    dim = 1 << h.n
    m = np.zeros((dim, dim), dtype=complex)
    for p, c in h.items():
        m += c * kron_matrix(p.label)
    return m


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.ham"


@pytest.fixture(scope="session")
def instances():
    return {n: load_instance(fixture_path(n)) for n in FIXTURE_NAMES}


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


from hypothesis import settings  # noqa: E402

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")
