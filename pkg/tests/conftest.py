import numpy as np
import pytest

from gausscond.checks import random_conditioning_instance

# One shared pool of randomized (law, transform) instances; building it once
# keeps the oracle-agreement and variance-decomposition tests fast.
ORACLE_POOL_SEED = 20260822
ORACLE_POOL_SIZE = 500


@pytest.fixture(scope="session")
def oracle_instances():
    rng = np.random.default_rng(ORACLE_POOL_SEED)
    return [random_conditioning_instance(rng) for _ in range(ORACLE_POOL_SIZE)]
