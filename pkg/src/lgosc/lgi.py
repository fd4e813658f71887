"""Assembly of the four-term Leggett-Garg quantity and parameter scans.

C = C12 + C23 + C34 - C14 over the schedule tau_k = tau1 + (k-1) dtau;
each correlator is computed on a fresh initial state (independent
subensembles), so a single evaluation builds four joint tables.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as _opt

from .errors import ParameterError
from .measurement import JointTable, joint_table
from .units import (DimensionlessParams, PhysicalParams, to_dimensionless)

TWO_PI = 2.0 * math.pi

#: pairs of schedule indices entering C12 + C23 + C34 - C14
PAIRS = ((0, 1), (1, 2), (2, 3), (0, 3))


@dataclass(frozen=True)
class LgiResult:
    c12: float
    c23: float
    c34: float
    c14: float
    c_value: float
    params: DimensionlessParams
    joint_tables: tuple[JointTable, JointTable, JointTable, JointTable]

    @property
    def correlators(self) -> tuple[float, float, float, float]:
        return (self.c12, self.c23, self.c34, self.c14)

    @property
    def violates(self) -> bool:
        return self.c_value > 2.0


def lgi_value_at_times(p_tilde: float, times) -> LgiResult:
    """C for an arbitrary increasing four-time schedule."""
    times = tuple(float(t) for t in times)
    if len(times) != 4 or any(b <= a for a, b in zip(times, times[1:])):
        raise ParameterError("need four strictly increasing times")
    tables = tuple(joint_table(p_tilde, times[i], times[j])
                   for i, j in PAIRS)
    c12, c23, c34, c14 = (t.correlator for t in tables)
    params = DimensionlessParams(p_tilde=p_tilde, tau1=times[0],
                                 dtau=max(times[1] - times[0], 1e-300))
    return LgiResult(c12=c12, c23=c23, c34=c34, c14=c14,
                     c_value=c12 + c23 + c34 - c14,
                     params=params, joint_tables=tables)


def lgi_value(params: DimensionlessParams) -> LgiResult:
    """C for the uniform schedule defined by (p_tilde, tau1, dtau)."""
    result = lgi_value_at_times(params.p_tilde, params.times())
    return dataclasses.replace(result, params=params)


def lgi_value_physical(params: PhysicalParams) -> LgiResult:
    return lgi_value(to_dimensionless(params))


# --- maximization over the schedule ---------------------------------------

#: timing heuristic seeds: first instant slightly above 0 or near half
#: period, separation near a quarter or three quarters of the period
HEURISTIC_SEEDS = (
    (0.05, 0.5 * math.pi),
    (0.05, 1.5 * math.pi),
    (math.pi, 0.5 * math.pi),
    (math.pi, 1.5 * math.pi),
)


def maximize_c(p_tilde: float, *,
               tau1_range=(0.0, TWO_PI),
               dtau_range=(0.02, TWO_PI),
               coarse: int = 21,
               xatol: float = 1e-4 * TWO_PI,
               ) -> tuple[float, float, LgiResult]:
    """Locate the schedule maximizing C at fixed momentum.

    Deterministic: a coarse grid scan over (tau1, dtau) plus the timing
    heuristic seeds, each refined by Nelder-Mead with domain clipping.
    Returns (tau1*, dtau*, LgiResult at the optimum).
    """
    t_lo, t_hi = tau1_range
    d_lo, d_hi = dtau_range
    if not (t_hi > t_lo and d_hi > d_lo and d_lo > 0.0):
        raise ParameterError("bad search ranges")

    def clip(v):
        return (min(max(v[0], t_lo), t_hi), min(max(v[1], d_lo), d_hi))

    cache: dict[tuple[float, float], float] = {}

    def objective(v):
        key = clip((float(v[0]), float(v[1])))
        if key not in cache:
            cache[key] = lgi_value(DimensionlessParams(
                p_tilde=p_tilde, tau1=key[0], dtau=key[1])).c_value
        return -cache[key]

    candidates = list(HEURISTIC_SEEDS)
    grid_t = np.linspace(t_lo, t_hi, coarse)
    grid_d = np.linspace(d_lo, d_hi, coarse)
    best_seed, best_val = None, math.inf
    for t1 in grid_t:
        for dt in grid_d:
            v = objective((t1, dt))
            if v < best_val:
                best_val, best_seed = v, (float(t1), float(dt))
    candidates.append(best_seed)

    best_x, best_f = best_seed, best_val
    for seed in candidates:
        res = _opt.minimize(objective, x0=np.asarray(clip(seed)),
                            method="Nelder-Mead",
                            options={"xatol": xatol, "fatol": 1e-12,
                                     "maxiter": 400})
        if res.fun < best_f:
            best_f = float(res.fun)
            best_x = clip((float(res.x[0]), float(res.x[1])))
    tau1, dtau = best_x
    result = lgi_value(DimensionlessParams(p_tilde=p_tilde,
                                           tau1=tau1, dtau=dtau))
    return tau1, dtau, result


# --- sweeps ----------------------------------------------------------------

_PHYSICAL_AXES = {"t1", "dt", "p0", "mass_amu", "omega"}
_DIMENSIONLESS_AXES = {"tau1", "dtau", "p_tilde"}


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    minimum: float
    maximum: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ParameterError("axis needs steps >= 2")
        if not (math.isfinite(self.minimum) and math.isfinite(self.maximum)
                and self.maximum > self.minimum):
            raise ParameterError("axis range must be finite and increasing")

    def values(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.steps)

    def logspace_values(self) -> np.ndarray:
        return np.geomspace(self.minimum, self.maximum, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    """Up to two swept parameters over a fixed base configuration."""

    base: PhysicalParams | DimensionlessParams
    axes: tuple[SweepAxis, ...]
    log_axes: bool = False

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ParameterError("sweep needs one or two axes")
        allowed = (_PHYSICAL_AXES if isinstance(self.base, PhysicalParams)
                   else _DIMENSIONLESS_AXES)
        for ax in self.axes:
            if ax.parameter not in allowed:
                raise ParameterError(
                    f"axis {ax.parameter!r} not valid for "
                    f"{type(self.base).__name__} base (allowed: {sorted(allowed)})")

    def points(self):
        grids = [ax.logspace_values() if self.log_axes else ax.values()
                 for ax in self.axes]
        if len(grids) == 1:
            for v in grids[0]:
                yield {self.axes[0].parameter: float(v)}
        else:
            for v0 in grids[0]:
                for v1 in grids[1]:
                    yield {self.axes[0].parameter: float(v0),
                           self.axes[1].parameter: float(v1)}


@dataclass
class SweepRow:
    point: dict
    result: LgiResult | None = None
    error: str | None = None
    derived: dict = field(default_factory=dict)


def _evaluate_point(base, overrides) -> SweepRow:
    try:
        cfg = dataclasses.replace(base, **overrides)
        if isinstance(cfg, PhysicalParams):
            from .units import classical_amplitude
            dims = to_dimensionless(cfg)
            derived = {
                "sigma0_m": cfg.sigma0,
                "A_cl_m": classical_amplitude(cfg),
                "v0_ms": cfg.v0,
                "p_tilde": dims.p_tilde,
            }
            return SweepRow(point=dict(overrides),
                            result=lgi_value(dims), derived=derived)
        return SweepRow(point=dict(overrides), result=lgi_value(cfg))
    except Exception as exc:  # per-row errors recorded, sweep continues
        return SweepRow(point=dict(overrides), error=f"{type(exc).__name__}: {exc}")


def thread_count() -> int:
    raw = os.environ.get("LGOSC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate C over the grid; row order is deterministic and errors are
    recorded in-row rather than aborting the scan."""
    points = list(spec.points())
    n_threads = thread_count()
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = list(pool.map(lambda pt: _evaluate_point(spec.base, pt),
                                 points))
    else:
        rows = [_evaluate_point(spec.base, pt) for pt in points]
    return rows
