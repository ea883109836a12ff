"""Shared fixtures.

The compiled kernels JIT on first call; warming them once per session
keeps the runtime assertions in the acceptance tests measuring steady
state instead of compilation.
"""

import numpy as np
import pytest

from beamlab import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    positions = np.arange(4.0) * 0.5
    sines = np.linspace(-0.9, 0.9, 8)
    steer = _kernels.steering_grid(positions, sines)
    rinv = np.eye(4, dtype=np.complex128)
    deltas = np.full(8, 0.1)
    _kernels.capon_accumulate(steer, rinv, deltas)
