"""Shared helpers: reproducible random matrices for property-style tests."""

import numpy as np


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary from a QR factorization of a complex
    Gaussian matrix, with the R-diagonal phase fixed."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_invertible(n: int, rng: np.random.Generator,
                      max_cond: float = 50.0) -> np.ndarray:
    """Random complex matrix with singular values in [1/max_cond, 1]."""
    u = random_unitary(n, rng)
    v = random_unitary(n, rng)
    s = rng.uniform(1.0 / max_cond, 1.0, size=n)
    return (u * s) @ v
