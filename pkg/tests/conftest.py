import numpy as np
import pytest

from egfet.model import DeviceSpec, ModelParams

# Reference device: W/L = 4.5/1.5 um, 57.8 nF/cm^2 oxide.
REF_SPEC = DeviceSpec(width=4.5e-6, length=1.5e-6, c_ox=5.78e-4)

# mu_0 = 500 cm2/Vs in SI.
REF_PARAMS = ModelParams(v_t=1.6, mu_0=0.05, theta=0.12, r_sd=50.0)

# Instrument-style gate grid: 0 to 4 V, 100 mV step.
REF_GRID = 0.1 * np.arange(41)


@pytest.fixture
def spec():
    return REF_SPEC


@pytest.fixture
def params():
    return REF_PARAMS


@pytest.fixture
def grid():
    return REF_GRID.copy()


def random_params(rng):
    """Parameters drawn from the physically plausible ranges used
    throughout the tests: v_t in [1.2, 1.8] V, mu_0 in [300, 750]
    cm2/Vs, theta in [0, 0.35] 1/V, r_sd in [0, 200] ohm."""
    return ModelParams(
        v_t=rng.uniform(1.2, 1.8),
        mu_0=rng.uniform(300, 750) * 1e-4,
        theta=rng.uniform(0.0, 0.35),
        r_sd=rng.uniform(0.0, 200.0),
    )
