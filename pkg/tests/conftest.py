import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_interior_field(rng, grid, margin=1):
    """Complex field supported away from every face by `margin` extra layers
    on axis 1 (so it is admissible for any boundary treatment)."""
    values = np.zeros(grid.shape, np.complex128)
    lo = 1 + margin
    values[lo:-lo, 1:-1] = (rng.normal(size=(grid.shape[0] - 2 * lo,
                                              grid.shape[1] - 2))
                            + 1j * rng.normal(size=(grid.shape[0] - 2 * lo,
                                                    grid.shape[1] - 2)))
    return values
