import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def table3():
    from sdc_res.collocation import make_table

    return make_table(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
