"""Drive one experiment, or a sweep of them, from an :class:`ExperimentConfig`."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import __version__
from ..flows import Trajectory, evolve
from ..models import ResonantStep, Step, step_value
from ..norms import (
    EQUIV_LOWER,
    EQUIV_UPPER,
    QUARTIC_ENERGY_FACTOR,
    energy_HK,
    h1_seminorm,
    kinetic_TK,
    l2_norm,
)
from ..resonance import (
    DEFAULT_EQUIVALENCE,
    asymptotic_energy_slope,
    bound_constants,
    drift_claimed,
    energy_bound_terms,
    is_resonant,
    membership_defect,
    resonant_period,
    scheme_h1_lower_bound,
)
from ..spectral import PhysicalState, forward_dft
from .config import ConfigError, ExperimentConfig, config_from_dict

#: Version tags of the conventions a run depends on; echoed in every summary.
CONVENTIONS = {
    "package_version": __version__,
    "dft": "centred B^K indices; forward carries 1/K",
    "free_flow_phase": "exp(-i t j^2)",
    "potential_flow_phase": "exp(-i t f)",
    "kinetic_TK": "sum_j j^2 |U_hat_j|^2",
    "cubic_energy_quartic_factor": QUARTIC_ENERGY_FACTOR,
    "h1_scheme_bound": "slope 2*sqrt(c)/(pi*sqrt(C)), offset sqrt(C/c)*h1_0",
    "gn_bound": "quartic <= h1*l2^3 + l2^4/(2*pi)",
}


@dataclass(frozen=True)
class TrajectoryRecord:
    n: int
    t: float
    l2: float
    h1: float
    kinetic_TK: float
    energy_HK: float
    h1_lower_bound: float | None = None
    membership_defect: float | None = None


CSV_COLUMNS = ("n", "t", "l2", "h1", "kinetic_TK", "energy_HK", "h1_lower_bound", "membership_defect")


def classify_step(step: Step, grid) -> str:
    if is_resonant(step, grid):
        return "resonant"
    if isinstance(step, ResonantStep):
        return "rational-nonresonant"
    return "nonresonant"


def fit_drift_slope(
    records: Sequence[TrajectoryRecord], window: tuple[int, int] | None = None, *, field: str = "h1"
) -> tuple[float, float, float]:
    """Least-squares line ``field ~ slope*t + intercept`` over ``window = (n_lo, n_hi)``.

    Returns ``(slope, intercept, residual)`` with the RMS residual.
    """
    rows = [r for r in records if window is None or window[0] <= r.n <= window[1]]
    if len(rows) < 2:
        raise ValueError(f"need at least 2 records in window {window}, got {len(rows)}")
    t = np.array([r.t for r in rows])
    y = np.array([getattr(r, field) for r in rows], dtype=float)
    if np.ptp(t) == 0:
        raise ValueError("degenerate window: all records share the same time")
    A = np.column_stack([t, np.ones_like(t)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ np.array([slope, intercept])
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def _recorder(model, step, constants, claimed, q):
    tau = step_value(step)

    def record(n: int, U: PhysicalState) -> TrajectoryRecord:
        bound = scheme_h1_lower_bound(n, step, constants) if claimed else None
        return TrajectoryRecord(
            n=n,
            t=n * tau,
            l2=l2_norm(U),
            h1=h1_seminorm(U),
            kinetic_TK=kinetic_TK(forward_dft(U)),
            energy_HK=energy_HK(U, model),
            h1_lower_bound=bound,
            membership_defect=membership_defect(U, q) if q is not None else None,
        )

    return record


def run_experiment(config: ExperimentConfig) -> tuple[Trajectory, dict]:
    grid = config.grid()
    step = config.time_step()
    model = config.model()
    U0 = config.initial_state()
    claimed = drift_claimed(model, U0, step)
    q = None
    if is_resonant(step, grid):
        period = resonant_period(step, model)
        if grid.K % period == 0 and (grid.K // period) % 2 == 0:
            q = period
    constants = bound_constants(model, U0, step)

    traj = evolve(U0, step, config.n_steps, model, _recorder(model, step, constants, claimed, q))
    records: list[TrajectoryRecord] = traj.records

    tau = step_value(step)
    l2 = np.array([r.l2 for r in records])
    h1 = np.array([r.h1 for r in records])
    summary = {
        "config": config.to_dict(),
        "conventions": dict(CONVENTIONS),
        "grid": {"K": grid.K, "delta_x": grid.delta_x},
        "step": _step_summary(step, grid),
        "cfl_number": tau * grid.K**2,
        "cfl_number_over_pi": tau * grid.K**2 / math.pi,
        "classification": classify_step(step, grid),
        "drift_claimed": claimed,
        "resonant_period": resonant_period(step, model) if isinstance(step, ResonantStep) else None,
        "bound_constants": constants.as_dict(),
        "assembled_constants": assembled_constants(step, constants),
        "l2_relative_variation": float(np.max(np.abs(l2 - l2[0])) / l2[0]) if l2[0] > 0 else 0.0,
        "h1_initial": float(h1[0]),
        "h1_final": float(h1[-1]),
        "h1_max_ratio": float(np.max(h1) / h1[0]) if h1[0] > 0 else None,
        "drift_fit": _drift_fit(records, constants, claimed),
    }
    return traj, summary


def assembled_constants(step: Step, constants) -> dict:
    eq = DEFAULT_EQUIVALENCE
    terms = energy_bound_terms(constants)
    return {
        "equivalence_lower_c": EQUIV_LOWER,
        "equivalence_upper_C": EQUIV_UPPER,
        "phase_flow_h1_factor": 2 / math.pi,
        "h1_slope_factor": eq.slope_factor,
        "h1_offset_factor": eq.offset_factor,
        "h1_bound_slope_in_t": eq.slope_factor * constants.c0,
        "energy_kinetic_coefficient": terms.kinetic,
        "energy_linear_coefficient": terms.linear,
        "energy_constant": terms.const,
        "energy_sqrt_slope_per_step": asymptotic_energy_slope(step, constants),
        "gn_constant": 1.0,
        "quartic_energy_factor": QUARTIC_ENERGY_FACTOR,
    }


def _drift_fit(records, constants, claimed) -> dict | None:
    n_last = records[-1].n
    if claimed and constants.horizon_steps is not None:
        n_hi = min(n_last, constants.horizon_steps)
    else:
        n_hi = n_last
    window = (n_hi // 2, n_hi)
    try:
        slope, intercept, resid = fit_drift_slope(records, window)
    except ValueError:
        return None
    return {
        "window": list(window),
        "slope": slope,
        "intercept": intercept,
        "residual": resid,
        "bound_slope": DEFAULT_EQUIVALENCE.slope_factor * constants.c0 if claimed else None,
    }


def _step_summary(step: Step, grid) -> dict:
    out = {"tau": step_value(step)}
    if isinstance(step, ResonantStep):
        out.update(p=step.p, q=step.q, power=step.power, resonant_on_grid=step.is_resonant_on(grid))
    return out


# --- sweeps -------------------------------------------------------------------


def sweep_configs(config: ExperimentConfig) -> list[ExperimentConfig]:
    """Cartesian product over the list-valued entries of ``config.sweep``."""
    spec = dict(config.sweep or {})
    if not spec:
        raise ConfigError("sweep: missing [sweep] table")
    allowed = {"p", "q", "power", "K", "kappa", "n_steps", "tau"}
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"sweep: unknown keys {sorted(unknown)}")
    keys = sorted(spec)
    values = [v if isinstance(v, list) else [v] for v in (spec[k] for k in keys)]
    out = []
    for combo in itertools.product(*values):
        point = dict(zip(keys, combo))
        d = config.to_dict()
        d.pop("sweep", None)
        step = dict(d["step"])
        if "tau" in point:
            step = {"tau": point["tau"]}
        else:
            for k in ("p", "q", "power"):
                if k in point:
                    step.pop("tau", None)
                    step[k] = point[k]
        d["step"] = step
        if "K" in point:
            d["K"] = point["K"]
        if "kappa" in point:
            if "q" not in step:
                raise ConfigError("sweep.kappa: needs a rational step q")
            d["K"] = point["kappa"] * step["q"]
        if "n_steps" in point:
            d["n_steps"] = point["n_steps"]
        out.append(config_from_dict(d))
    return out


def _sweep_row(config: ExperimentConfig) -> dict:
    _, s = run_experiment(config)
    st = s["step"]
    fit = s["drift_fit"] or {}
    return {
        "K": s["grid"]["K"],
        "p": st.get("p"),
        "q": st.get("q"),
        "power": st.get("power"),
        "tau": st["tau"],
        "cfl_number": s["cfl_number"],
        "classification": s["classification"],
        "drift_claimed": s["drift_claimed"],
        "horizon_steps": s["bound_constants"]["horizon_steps"],
        "h1_initial": s["h1_initial"],
        "h1_final": s["h1_final"],
        "h1_max_ratio": s["h1_max_ratio"],
        "drift_slope": fit.get("slope"),
        "l2_relative_variation": s["l2_relative_variation"],
    }


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    configs = sweep_configs(config)
    if workers <= 1:
        return [_sweep_row(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, configs))
