import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def random_nonsingular(rng: np.random.Generator, d: int, cond_cap: float = 1e6) -> np.ndarray:
    """A Gaussian matrix, redrawn until comfortably nonsingular."""
    while True:
        S = rng.standard_normal((d, d))
        sv = np.linalg.svd(S, compute_uv=False)
        if sv[-1] > 0 and sv[0] / sv[-1] < cond_cap:
            return S


def random_contraction(rng: np.random.Generator, d: int, lo: float, hi: float) -> np.ndarray:
    """Random rotations around a prescribed singular-value range."""
    u, _ = np.linalg.qr(rng.standard_normal((d, d)))
    v, _ = np.linalg.qr(rng.standard_normal((d, d)))
    sigma = np.sort(rng.uniform(lo, hi, size=d))[::-1]
    return u @ np.diag(sigma) @ v.T


@pytest.fixture
def rng() -> np.random.Generator:
    return rng_for(20240817)
