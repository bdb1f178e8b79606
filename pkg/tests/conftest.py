import pytest

import bipsample as bp

POOL_SEED = 20240801


@pytest.fixture(scope="session")
def pool_result():
    """One sweep of the full verification pool, shared by the acceptance
    criteria that grade slices of it."""
    return bp.run_verification(
        max_rows=5, max_cols=5, random_count=200, seed=POOL_SEED, quiet=True
    )
