import pytest
from hypothesis import settings

from gl4whittaker.verifier import workbench

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def wb3():
    return workbench(3, "eq")


@pytest.fixture(scope="session")
def wb3w():
    return workbench(3, "witt")


@pytest.fixture(scope="session", params=["eq", "witt"])
def wb3_any(request):
    return workbench(3, request.param)
