import pytest
from hypothesis import settings

from app.services.ffield import build_field
from app.services.legendre_curves import CurveFamily

settings.register_profile("legendre", max_examples=50, deadline=None)
settings.load_profile("legendre")


@pytest.fixture
def f7():
    return build_field(7)


@pytest.fixture
def f13():
    return build_field(13)


@pytest.fixture
def f49():
    return build_field(7, 2)


@pytest.fixture
def family_6431():
    return CurveFamily(6, 4, 3, 1)


@pytest.fixture
def family_3121():
    return CurveFamily(3, 1, 2, 1)


@pytest.fixture
def family_5141():
    return CurveFamily(5, 1, 4, 1)
