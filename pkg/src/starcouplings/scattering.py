"""On-shell scattering for star graphs of n half-lines.

With a vertex coupling U the scattering matrix at momentum k > 0 is

    S_U(k) = ((k - 1) I + (k + 1) U) ((k + 1) I + (k - 1) U)^{-1}.

Both factors are polynomials in U and commute.  S is unitary for every
real k > 0 and S_U(1) = U.  For real positive k the denominator is never
singular (it would need a U-eigenvalue of modulus |k + 1| / |k - 1| > 1);
poles appear only on the positive imaginary axis k = i kappa, kappa > 0,
where each zero of det((i kappa + 1) I + (i kappa - 1) U) is a bound state
of energy -kappa^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .coupling import VertexCoupling
from .errors import PoleError

#: singular values below this fraction of the largest count as null space
NULLSPACE_TOL = 1e-8
#: strict local minima of |det| below this fraction of its grid maximum are
#: polished and rank-tested (catches even-multiplicity zeros, which produce
#: no sign change)
DET_DIP_FRACTION = 0.1


@dataclass(frozen=True)
class SpectralParameter:
    """A point on the physical momentum axes: real momentum k > 0 with
    energy k^2, or imaginary momentum kappa > 0 with energy -kappa^2."""

    kind: str  # "real_momentum" | "imaginary_momentum"
    value: float

    def __post_init__(self):
        if self.kind not in ("real_momentum", "imaginary_momentum"):
            raise ValueError(f"unknown spectral parameter kind {self.kind!r}")
        if not self.value > 0:
            raise ValueError(f"spectral parameter must be positive, got {self.value}")

    @classmethod
    def real_momentum(cls, k: float) -> "SpectralParameter":
        return cls("real_momentum", float(k))

    @classmethod
    def imaginary_momentum(cls, kappa: float) -> "SpectralParameter":
        return cls("imaginary_momentum", float(kappa))

    @property
    def energy(self) -> float:
        v = self.value
        return v * v if self.kind == "real_momentum" else -v * v


class BoundState(NamedTuple):
    kappa: float
    multiplicity: int

    @property
    def energy(self) -> float:
        return -self.kappa ** 2


def s_matrix(coupling: VertexCoupling, k: float) -> np.ndarray:
    """On-shell scattering matrix at real momentum k > 0."""
    if not k > 0:
        raise ValueError(f"momentum must be positive, got {k}")
    n = coupling.n
    eye = np.eye(n)
    den = (k + 1.0) * eye + (k - 1.0) * coupling.u
    num = (k - 1.0) * eye + (k + 1.0) * coupling.u
    sv = np.linalg.svd(den, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        lams = np.linalg.eigvals(coupling.u)
        target = -(k + 1.0) / (k - 1.0) if k != 1.0 else np.inf
        worst = lams[np.argmin(np.abs(lams - target))]
        raise PoleError(
            f"scattering matrix pole at k={k}: U has eigenvalue {worst}")
    return np.linalg.solve(den, num)


def _pole_matrix(u: np.ndarray, kappa: float) -> np.ndarray:
    return (1j * kappa + 1.0) * np.eye(u.shape[0]) + (1j * kappa - 1.0) * u


def _det_normalized(u: np.ndarray, kappa: float) -> complex:
    # dividing by (1 + kappa^2)^(n/2) keeps every spectral factor in [0, 2]
    n = u.shape[0]
    return np.linalg.det(_pole_matrix(u, kappa)) \
        / (1.0 + kappa * kappa) ** (n / 2.0)


def _sigma_min(u: np.ndarray, kappa: float) -> float:
    sv = np.linalg.svd(_pole_matrix(u, kappa), compute_uv=False)
    return float(sv[-1]) / math.sqrt(1.0 + kappa * kappa)


def _multiplicity(u: np.ndarray, kappa: float) -> int:
    # singular values are compared against the natural matrix scale
    # sqrt(1 + kappa^2) rather than sigma_max, which itself vanishes when
    # every eigenvalue hits the root at once
    sv = np.linalg.svd(_pole_matrix(u, kappa), compute_uv=False)
    return int(np.sum(sv <= NULLSPACE_TOL * math.sqrt(1.0 + kappa * kappa)))


def bound_states(coupling: VertexCoupling, kappa_max: float, *,
                 grid_points: int = 4000) -> list[BoundState]:
    """All kappa in (0, kappa_max] with det((i kappa + 1) I + (i kappa - 1) U) = 0.

    The normalized determinant is sampled on a log-spaced grid.  Sign
    changes of its real and imaginary parts are bracketed and refined with
    Brent's method (along the real kappa axis each simple zero factors as
    (kappa - kappa0) g(kappa), so either part vanishes exactly at the
    root).  Even-multiplicity zeros produce no sign change, so strict
    local minima of |det| that fall below DET_DIP_FRACTION of the grid
    maximum are polished by bounded minimization as well.  Every candidate
    must pass a rank test: the matrix at the root has to be numerically
    rank deficient, and the null-space dimension is reported as the
    multiplicity.
    """
    if not kappa_max > 0:
        raise ValueError(f"kappa_max must be positive, got {kappa_max}")
    u = coupling.u
    grid = np.geomspace(kappa_max * 1e-10, kappa_max, grid_points)
    vals = np.array([_det_normalized(u, kap) for kap in grid])

    bracketed: list[float] = []
    for part in (np.real, np.imag):
        p = part(vals)
        sign = np.sign(p)
        crossings = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
        for i in crossings:
            root = brentq(lambda kap: float(part(_det_normalized(u, kap))),
                          grid[i], grid[i + 1], xtol=1e-14, rtol=8.9e-16)
            bracketed.append(float(root))

    dips: list[float] = []
    mags = np.abs(vals)
    dip_cut = DET_DIP_FRACTION * float(np.max(mags))
    for i in range(1, len(grid) - 1):
        if mags[i] < mags[i - 1] and mags[i] <= mags[i + 1] \
                and mags[i] < dip_cut:
            # sigma_min is V-shaped at a zero of any multiplicity, so the
            # bounded search localizes it far better than the flat |det|
            res = minimize_scalar(
                lambda kap: _sigma_min(u, kap),
                bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                options={"xatol": 1e-13})
            dips.append(float(res.x))

    def near(kap: float, existing: list[float], tol: float) -> bool:
        return any(abs(kap - other) <= tol * max(1.0, kap)
                   for other in existing)

    # bracketed roots are machine-accurate and take precedence over the
    # |det|-dip candidates, whose localization is much coarser; the dedupe
    # radii reflect those accuracies
    accepted: list[float] = []
    for kap in sorted(bracketed):
        if not near(kap, accepted, 1e-8) and _multiplicity(u, kap) >= 1:
            accepted.append(kap)
    for kap in sorted(dips):
        if not near(kap, accepted, 1e-6) and _multiplicity(u, kap) >= 1:
            accepted.append(kap)

    return [BoundState(kappa=kap, multiplicity=_multiplicity(u, kap))
            for kap in sorted(accepted)]
