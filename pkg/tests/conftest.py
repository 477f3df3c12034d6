import os
from fractions import Fraction
import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_costs(rng: random.Random, n: int, lo=1, hi=9, denom=1):
    return tuple(Fraction(rng.randint(lo * denom, hi * denom), denom) for _ in range(n))


@pytest.fixture
def rng():
    return random.Random(20260101)
