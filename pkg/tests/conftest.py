import numpy as np
import pytest

from snchange import backend as backend_module

BACKENDS = ["numpy"]
try:
    import numba  # noqa: F401

    BACKENDS.insert(0, "numba")
except ImportError:
    pass


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per available kernel backend."""
    backend_module.set_backend(request.param)
    yield request.param
    backend_module.set_backend(None)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
