from __future__ import annotations

import numpy as np
import pytest

from kgqm.grid import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def spec():
    """Default desk grid: d=1, n=64, mu=1."""
    return GridSpec()


@pytest.fixture
def unit_box():
    """L = 2π so that lattice mode m has k = m."""
    return GridSpec(n=16, box_len=2 * np.pi, mu=1.0, lam=1.0)


@pytest.fixture(params=[1, 2, 3], ids=lambda d: f"d{d}")
def spec_any_dim(request):
    n = {1: 64, 2: 16, 3: 8}[request.param]
    return GridSpec(d=request.param, n=n, box_len=20.0)


def rel(a, b) -> float:
    from kgqm.symmetry import relative_residual

    return relative_residual(a, b)
