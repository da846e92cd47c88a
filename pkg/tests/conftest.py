import pytest

from config.settings import settings
from src.groups.level import LevelContext


@pytest.fixture
def ctx_3_2():
    return LevelContext(3, 2)


@pytest.fixture
def ctx_3_3():
    return LevelContext(3, 3)


@pytest.fixture
def ctx_2_3():
    return LevelContext(2, 3)


@pytest.fixture
def small_caps(mocker):
    """Caps low enough that modest groups trip them."""
    mocker.patch.object(settings, 'ENUMERATION_CAP', 10)
    mocker.patch.object(settings, 'LINALG_DIMENSION_CAP', 8)
    return settings


@pytest.fixture
def restore_settings(mocker):
    """Snapshot the caps a run may overwrite so they are restored afterwards."""
    for name in ('ENUMERATION_CAP', 'LINALG_DIMENSION_CAP', 'ALLOW_LARGE_PRODUCT'):
        mocker.patch.object(settings, name, getattr(settings, name))
    return settings
