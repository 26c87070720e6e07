import os

import numpy as np
import pytest

from diracsplit.harness.references import ReferenceStore
from diracsplit.model import ALPHA, BETA, GAMMA, I2, I4, SIGMA

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def _check_matrix_algebra():
    s1, s2, s3 = SIGMA
    for j, sj in enumerate(SIGMA):
        assert np.array_equal(sj @ sj, I2)
        for l, sl in enumerate(SIGMA):
            if j != l:
                assert np.array_equal(sj @ sl, -sl @ sj)
    for a, b, c in ((s1, s2, s3), (s2, s3, s1), (s3, s1, s2)):
        assert np.array_equal(a @ b, 1j * c)
    a1, a2, a3 = ALPHA
    for a in ALPHA:
        assert np.array_equal(a @ a, I4)
        assert np.array_equal(BETA @ a, -a @ BETA)
        assert np.array_equal(GAMMA @ a, a @ GAMMA)
    for a, b, c in ((a1, a2, a3), (a2, a3, a1), (a3, a1, a2)):
        assert np.array_equal(a @ b, 1j * GAMMA @ c)


def pytest_sessionstart(session):
    _check_matrix_algebra()


@pytest.fixture(scope="session")
def ref_store(tmp_path_factory):
    """Reference cache shared by the whole session (persistent if DIRACSPLIT_CACHE is set)."""
    root = os.environ.get("DIRACSPLIT_CACHE")
    return ReferenceStore(root if root else tmp_path_factory.mktemp("refs"))


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(n: int, name: str, passed: bool, detail: str = ""):
        _ACCEPTANCE[n] = (name, bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        name, ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {name}" + (f" -- {detail}" if detail else ""))
