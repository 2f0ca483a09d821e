import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from bsconvex import cayley, group


def make_std_gset(p: int) -> cayley.GeneratingSet:
    return cayley.validate_generating_set(
        p, [group.element(1, 0, 0, p), group.element(0, 0, 1, p)]
    )


@pytest.fixture(scope="session")
def gset2() -> cayley.GeneratingSet:
    return make_std_gset(2)


@pytest.fixture(scope="session")
def ball12(gset2) -> cayley.Ball:
    return cayley.ball(12, gset2)


@pytest.fixture(scope="session")
def ball8(ball12) -> cayley.Ball:
    return ball12.restrict(8)
