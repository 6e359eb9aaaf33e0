import os, math
import numpy as np
from riscfmimo.scenario import ScenarioConfig, SeedContext


SLOW_TESTS_ENV_VAR = 'RISCFMIMO_SLOW_TESTS'


def slow_tests_enabled():
    """ Full-size acceptance runs only happen when RISCFMIMO_SLOW_TESTS is set. """
    return os.environ.get(SLOW_TESTS_ENV_VAR, '') not in ('', '0')


def make_config(**changes):
    """
    A small valid scenario: 20 APs, 5 users, 4 surfaces of 8 elements in 1 km x 1 km.
    """
    fields = dict(area_side_km=1.0, ap_count=20, user_count=5, ris_count=4, elements_per_ris=8)
    fields.update(changes)
    return ScenarioConfig(**fields)


def symmetric_config(ap_count=50, user_count=40, ris_count=30, elements_per_ris=10, **changes):
    return make_config(ap_count=ap_count, user_count=user_count, ris_count=ris_count,
                       elements_per_ris=elements_per_ris, pilot_len_symbols=user_count,
                       beta_override=1.0, **changes)


def symmetric_oracle(p_d, p_c, m, k, s, n, tau_c):
    """
    Closed-form per-user rate when every large-scale gain is 1, written out by hand.
    Returns (rate, gamma, rho).
    """
    rho = s * n + 1.0
    gamma = tau_c * p_c * rho ** 2 / (tau_c * p_c * rho + 1.0)
    sinr = p_d * m * m * gamma / (k * (p_d * m * rho + 1.0))
    return math.log2(1.0 + sinr), gamma, rho


def relative_error(actual, expected):
    return abs(actual - expected) / abs(expected)


def seed(master_seed=1234, **labels):
    return SeedContext(master_seed, **labels)


def random_positive(rng, shape, low=0.1, high=2.0):
    return rng.uniform(low, high, size=shape)


def complex_normal_samples(rng, variance, size):
    variance = np.asarray(variance, dtype=float)
    return np.sqrt(variance / 2.0) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
