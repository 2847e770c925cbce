import math

import pytest

from blowwave.model import ModelParams
from blowwave.profiles import Grid, paired_profiles
from blowwave.quadrature import build_kernel_table

# Parameter set used by the certificate and iteration work: strictly above
# both speed thresholds, equal wave-frame delays aligned with the 0.01 grid.
CERT_R = 0.05
CERT_T = 8.0


@pytest.fixture(scope="session")
def cert_params():
    return ModelParams.from_rates(p=2.0, delta=1.0, a=1.0,
                                  r1=CERT_R, r2=CERT_R, c=3.1)


@pytest.fixture(scope="session")
def zero_delay_params():
    return ModelParams(p=2.0, delta=1.0, a=1.0, tau1=0.0, tau2=0.0,
                       c=2.0 * math.sqrt(2.0))


@pytest.fixture(scope="session")
def zero_delay_table(zero_delay_params):
    # big frequency radius: the truncation error ~1/(pi N) must sit below
    # the 1e-4 closed-form comparison
    return build_kernel_table(zero_delay_params, T_ker=10.0, h_ker=0.01, N=12800.0)


@pytest.fixture(scope="session")
def zero_delay_conv_table(zero_delay_params):
    # wide table for convolution identities (mass and fixed points)
    return build_kernel_table(zero_delay_params, T_ker=60.0, h_ker=0.01, N=2000.0)


@pytest.fixture(scope="session")
def cert_grid():
    return Grid(40.0, 0.01)


@pytest.fixture(scope="session")
def cert_kernel(cert_params):
    return build_kernel_table(cert_params, T_ker=80.0, h_ker=0.01, N=2000.0)


@pytest.fixture(scope="session")
def cert_pair(cert_params, cert_grid):
    return paired_profiles(cert_params, cert_grid, CERT_T, placement="auto")
