import os
import tempfile

# keep Brandt and LMFDB caches out of the home directory during tests
os.environ.setdefault("MODDEG_CACHE_DIR", tempfile.mkdtemp(prefix="moddeg-test-cache-"))
os.environ.pop("MODDEG_NETWORK", None)

import pytest
from hypothesis import settings

from moddeg.shell import load_curves, shipped_table

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def rows():
    return load_curves(shipped_table())


@pytest.fixture(scope="session")
def curves(rows):
    return [r.curve() for r in rows]


@pytest.fixture(scope="session")
def by_label(curves):
    return {E.label: E for E in curves}


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """record(n, ok, detail) prints and stores one line per acceptance criterion."""

    def record(n: int, ok: bool, detail: str = "") -> bool:
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        ACCEPTANCE[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
