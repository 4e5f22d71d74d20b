import pytest

from qcse import backend


@pytest.fixture(params=["numba", "numpy"])
def kernel_backend(request):
    """Run a test once per kernel backend, restoring the default after."""
    previous = backend.backend_name()
    backend.set_backend(request.param)
    yield request.param
    backend.set_backend(previous)
