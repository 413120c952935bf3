from __future__ import annotations

import pytest

from predprey import ModelParams


@pytest.fixture
def osc_params() -> ModelParams:
    # Unique interior repeller with a surrounding limit cycle.
    return ModelParams(a1=0.6, a2=1.0, b1=0.063, w0=1.0, w1=2.0,
                       d=2.0, m1=0.8, m2=1.0)


@pytest.fixture
def bistable_params() -> ModelParams:
    # Interior saddle + stable node pair; both exponents fractional.
    return ModelParams(a1=0.5, a2=0.7, b1=0.05, w0=0.2, w1=4.0,
                       d=0.2, m1=0.5, m2=0.5)
