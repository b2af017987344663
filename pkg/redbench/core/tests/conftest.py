import pytest

from redbench.core.world import Pos, Region, World
from redbench.settings import Settings, use_settings


@pytest.fixture(autouse=True)
def default_settings():
    use_settings(Settings())
    yield
    use_settings(Settings())


@pytest.fixture
def world() -> World:
    """
    An empty world with the stone floor laid around the origin column.
    """
    w = World()
    w.lay_floor(Region(Pos(0, 4, 0), 20))
    return w
