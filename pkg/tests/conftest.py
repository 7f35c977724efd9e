from pathlib import Path

import pytest

from reactorkit import samples

GOLDEN_DIR = Path(__file__).parent / "golden"


def pytest_addoption(parser):
    parser.addoption(
        "--regen-golden",
        action="store_true",
        default=False,
        help="rewrite golden files from current output instead of comparing",
    )


@pytest.fixture(scope="session")
def sample_3a():
    return samples.make_3a()


@pytest.fixture(scope="session")
def sample_sfr7():
    return samples.make_sfr7()


@pytest.fixture
def golden(request):
    """Compare data against tests/golden/<name>, or rewrite it with
    --regen-golden."""

    def check(name: str, data):
        if isinstance(data, str):
            data = data.encode("utf-8")
        path = GOLDEN_DIR / name
        if request.config.getoption("--regen-golden"):
            GOLDEN_DIR.mkdir(exist_ok=True)
            path.write_bytes(data)
            return
        assert path.exists(), f"golden file {name} missing; run pytest --regen-golden"
        assert path.read_bytes() == data, f"output differs from golden {name}"

    return check
