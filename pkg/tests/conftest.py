import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def table_probs():
    """The worked 4-test, 3-class example used across the docs and tests."""
    import ginirank as gr

    return gr.ProbabilityMatrix.from_values(
        [
            [0.3, 0.5, 0.2],
            [0.1, 0.1, 0.8],
            [0.6, 0.3, 0.1],
            [0.4, 0.4, 0.2],
        ]
    )


@pytest.fixture
def table_sigs():
    """The worked 4-test, 8-statement coverage example (tests A, B, C, D)."""
    import ginirank as gr

    def sig(ids):
        return gr.CoverageSignature(8, np.array(sorted(ids), dtype=np.uint32))

    return [
        sig([0, 1, 2, 5, 6, 7]),  # A
        sig([0, 1, 2, 6, 7]),     # B
        sig([0, 1, 2, 3]),        # C
        sig([4, 5, 6, 7]),        # D
    ]
