import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from builddiff import _pykernels  # noqa: E402
from repogen import FixtureRepo  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

try:
    from builddiff import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def listing():
    def load(n: int) -> str:
        return (FIXTURES / "listings" / f"listing{n}.xml").read_text(encoding="utf-8")
    return load


@pytest.fixture
def make_repo(tmp_path):
    counter = iter(range(1000))

    def make() -> FixtureRepo:
        return FixtureRepo(tmp_path / f"repo{next(counter)}")
    return make


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
