"""Scaling schedules and Hilbert-Schmidt convergence experiments.

The singular vertex couplings arise as a -> 0+ limits of ordinary
delta-type couplings: a central coupling of strength b(a) plus one extra
delta of strength c(a) = -1/a at distance a on every edge.  Schedules:

    delta_prime_s target:  b(a) = -beta / (n a^2), per-channel Robin value
                           equal to b(a)
    delta_prime target:    b(a) = -beta / a^2, per-channel Robin value
                           b(a) / n

Folding the satellite delta into the origin condition of one channel gives
the effective Robin constant

    B(a) = c + b / (1 + a b),

which under either schedule equals n / (beta - n a) and tends to n / beta,
the constant of the limiting boundary condition.

Per symmetry sector the experiment samples the difference between the
point-decorated approximant kernel and the limit kernel on the tensor grid
over [a, L]^2 (the satellite position a is the first node, so the kink
lines x = a and y = a lie on the grid) and takes the Hilbert-Schmidt norm
by 2-D trapezoidal quadrature.  The window starts at a rather than 0:
below the satellite the approximant keeps an O(1) boundary layer that is
no part of the interior limit, and its Hilbert-Schmidt mass only decays
like sqrt(a), which would mask the O(a) rate of the kernels being
compared.  On [a, L]^2 the difference is uniformly O(a) and the fitted
log-log slope comes out near 1.

Sector norms combine with multiplicities,

    norm_total^2 = norm_lead^2 + (n - 1) norm_rest^2,

which is exact because the sectors are orthogonal.  Stages of a sweep are
independent; convergence_sweep can run them on a thread pool.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .finite_difference import GridSpec
from .greens import (PointInteraction, SectorSpec, StarModel,
                     sector_decompose, sector_green)

#: families with a scaling schedule
SCHEDULE_FAMILIES = ("delta_prime_s", "delta_prime")

#: pre-flight bound on |n + beta kappa| for the target RobinScaled sector
TARGET_POLE_TOL = 1e-6


@dataclass(frozen=True)
class ApproximationStage:
    """Coupling strengths of one approximation stage at distance a."""

    family: str
    n: int
    beta: float
    a: float
    b: float                 # central strength as scheduled
    c: float                 # satellite strength, always -1/a
    per_channel_b: float     # Robin value seen by the repeated/leading sector

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"stage distance must be positive, got {self.a}")
        if not math.isclose(self.c, -1.0 / self.a, rel_tol=1e-15):
            raise ValueError("stage invariant c = -1/a violated")


def schedule(family: str, beta: float, n: int, a: float) -> ApproximationStage:
    """Coupling strengths b(a), c(a) for the given target family."""
    if family not in SCHEDULE_FAMILIES:
        raise ValueError(
            f"unknown schedule family {family!r}; expected one of "
            f"{SCHEDULE_FAMILIES}")
    if n < 1:
        raise ValueError(f"edge count must be >= 1, got {n}")
    if not a > 0:
        raise ValueError(f"distance must be positive, got {a}")
    if family == "delta_prime_s":
        b = -beta / (n * a * a)
        per_channel = b
    else:
        b = -beta / (a * a)
        per_channel = b / n
    return ApproximationStage(family=family, n=n, beta=float(beta), a=float(a),
                              b=b, c=-1.0 / a, per_channel_b=per_channel)


def effective_robin(b: float, c: float, a: float) -> float:
    """The origin condition seen from just outside the satellite,
    B(a) = c + b / (1 + a b)."""
    if not a > 0:
        raise ValueError(f"distance must be positive, got {a}")
    den = 1.0 + a * b
    if abs(den) < 1e-14:
        raise PoleError(f"degenerate stage: |1 + a b| = {abs(den):.3e}")
    return c + b / den


def target_model(family: str, n: int, beta: float) -> StarModel:
    if family == "delta_prime_s":
        return StarModel.delta_prime_s(n, beta)
    if family == "delta_prime":
        return StarModel.delta_prime(n, beta)
    raise ValueError(f"unknown target family {family!r}")


def approximant_model(stage: ApproximationStage) -> StarModel:
    point = PointInteraction(a=stage.a, c=stage.c)
    if stage.family == "delta_prime_s":
        return StarModel.central_delta(stage.n, stage.b, point)
    return StarModel.central_delta_p(stage.n, stage.b, point)


@dataclass(frozen=True)
class SampledDifference:
    """A kernel difference sampled on the square grid built from one node
    vector (values[i, j] belongs to (x[i], x[j]))."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        values = np.asarray(self.values)
        if values.shape != (x.size, x.size):
            raise ValueError(
                f"values shape {values.shape} does not match {x.size} nodes")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", values)


def _window_nodes(grid: GridSpec, a: float) -> np.ndarray:
    if not 0.0 < a < grid.L:
        raise ValueError(f"window start {a} outside (0, {grid.L})")
    base = grid.boundary_nodes()
    return np.concatenate(([a], base[base > a * (1.0 + 1e-12)]))


def sector_difference(target: SectorSpec, approx: SectorSpec, kappa: float,
                      a: float, grid: GridSpec) -> SampledDifference:
    """Samples of (approximant kernel - target kernel) for one sector pair
    on the tensor grid over [a, L]^2."""
    if target.multiplicity != approx.multiplicity:
        raise ValueError(
            f"incompatible sector pair: multiplicities "
            f"{target.multiplicity} and {approx.multiplicity}")
    nodes = _window_nodes(grid, a)
    xg = nodes[:, None]
    yg = nodes[None, :]
    values = sector_green(approx, kappa, xg, yg) \
        - sector_green(target, kappa, xg, yg)
    return SampledDifference(x=nodes, values=values)


def hs_norm(diff: SampledDifference) -> float:
    """Hilbert-Schmidt norm estimate: sqrt of the 2-D trapezoidal
    quadrature of |values|^2 over the sampled square."""
    sq = np.abs(diff.values) ** 2
    inner = np.trapezoid(sq, diff.x, axis=1)
    return float(np.sqrt(np.trapezoid(inner, diff.x)))


@dataclass(frozen=True)
class StageResult:
    a: float
    b: float
    c: float
    per_channel_b: float
    norm_sym: float          # leading sector (multiplicity 1)
    norm_comp: float         # repeated sector (multiplicity n - 1)
    norm_total: float
    valid: bool = True
    error: str | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    family: str
    n: int
    beta: float
    kappa: float
    stages: tuple[StageResult, ...]
    fitted_slope: float | None
    fitted_intercept: float | None


def _run_stage(family: str, beta: float, n: int, kappa: float, a: float,
               grid: GridSpec) -> StageResult:
    stage = schedule(family, beta, n, a)
    try:
        targets = sector_decompose(target_model(family, n, beta))
        approxs = sector_decompose(approximant_model(stage))
        # pre-flight: the RobinScaled target pole must stay well away
        for sector in targets:
            if sector.bc.kind == "robin_scaled":
                if abs(sector.bc.n + sector.bc.beta * kappa) < TARGET_POLE_TOL:
                    raise PoleError(
                        f"target sector pole: |n + beta kappa| < {TARGET_POLE_TOL}")
        norm_lead = hs_norm(sector_difference(targets[0], approxs[0],
                                              kappa, a, grid))
        if n > 1:
            norm_rest = hs_norm(sector_difference(targets[1], approxs[1],
                                                  kappa, a, grid))
        else:
            norm_rest = 0.0
        total = math.sqrt(norm_lead**2 + (n - 1) * norm_rest**2)
        # orthogonality of the sector combination, by construction
        assert abs(total**2 - norm_lead**2 - (n - 1) * norm_rest**2) \
            <= 1e-10 * max(total**2, 1e-300)
        return StageResult(a=stage.a, b=stage.b, c=stage.c,
                           per_channel_b=stage.per_channel_b,
                           norm_sym=norm_lead, norm_comp=norm_rest,
                           norm_total=total)
    except PoleError as exc:
        return StageResult(a=stage.a, b=stage.b, c=stage.c,
                           per_channel_b=stage.per_channel_b,
                           norm_sym=math.nan, norm_comp=math.nan,
                           norm_total=math.nan, valid=False, error=str(exc))


def convergence_sweep(family: str, beta: float, n: int, kappa: float,
                      a_list, grid: GridSpec,
                      threads: int = 1) -> ConvergenceReport:
    """Run the approximation experiment over a strictly decreasing list of
    distances and fit the log-log slope of norm_total against a.

    The fit uses the smallest three valid distances (asymptotic regime);
    with fewer than two valid stages the slope is None.  Stages that hit a
    pole guard are reported as invalid and excluded from the fit.
    """
    a_values = [float(a) for a in a_list]
    if len(a_values) == 0:
        raise ValueError("need at least one distance")
    if any(a2 >= a1 for a1, a2 in zip(a_values, a_values[1:])):
        raise ValueError("distances must be strictly decreasing")
    if threads > 1 and len(a_values) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stages = list(pool.map(
                lambda a: _run_stage(family, beta, n, kappa, a, grid),
                a_values))
    else:
        stages = [_run_stage(family, beta, n, kappa, a, grid)
                  for a in a_values]

    valid = [s for s in stages if s.valid and s.norm_total > 0.0]
    slope = intercept = None
    if len(valid) >= 2:
        tail = valid[-min(3, len(valid)):]
        log_a = np.log([s.a for s in tail])
        log_norm = np.log([s.norm_total for s in tail])
        slope_arr = np.polyfit(log_a, log_norm, 1)
        slope, intercept = float(slope_arr[0]), float(slope_arr[1])
    return ConvergenceReport(family=family, n=n, beta=float(beta),
                             kappa=float(kappa), stages=tuple(stages),
                             fitted_slope=slope, fitted_intercept=intercept)
