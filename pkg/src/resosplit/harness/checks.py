"""The verification suite: invariants, per-run checks and the acceptance checks."""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from ..models import Cubic, ResonantStep
from ..norms import l2_norm_sq
from ..resonance import bound_constants, energy_lower_bound
from ..spectral import (
    PhysicalState,
    exponential_sum,
    forward_dft,
    inverse_dft,
    make_grid,
    naive_forward_dft,
)
from .acceptance import cubic_closed_form, linear_closed_form, _tol, acceptance_checks
from .config import ExperimentConfig
from .report import Check, VerificationReport, verdict
from .runner import CONVENTIONS, run_experiment

#: Functions the suite looks up through ``hooks``, for fault injection.
HOOKABLE = ("forward_dft", "inverse_dft")


def _hooked(hooks: Mapping[str, Callable] | None):
    hooks = dict(hooks or {})
    unknown = set(hooks) - set(HOOKABLE)
    if unknown:
        raise ValueError(f"unknown hooks {sorted(unknown)}; allowed: {HOOKABLE}")
    return hooks.get("forward_dft", forward_dft), hooks.get("inverse_dft", inverse_dft)


def dft_checks(seed: int = 0, tolerances=None, hooks=None) -> list[Check]:
    """Fast DFT against the O(K^2) oracle, round trip, Parseval and exponential sums."""
    fwd, inv = _hooked(hooks)
    rng = np.random.default_rng(seed)
    naive_err = roundtrip_err = parseval_err = 0.0
    for K in (4, 8, 64, 256):
        g = make_grid(K)
        U = PhysicalState(g, rng.standard_normal(K) + 1j * rng.standard_normal(K))
        U_hat = fwd(U)
        scale = float(np.max(np.abs(U.values)))
        naive_err = max(naive_err, float(np.max(np.abs(U_hat.coeffs - naive_forward_dft(U).coeffs))) / scale)
        roundtrip_err = max(roundtrip_err, float(np.max(np.abs(inv(U_hat).values - U.values))) / scale)
        spectral = 2 * np.pi * float(np.sum(np.abs(U_hat.coeffs) ** 2))
        parseval_err = max(parseval_err, abs(spectral - l2_norm_sq(U)) / l2_norm_sq(U))
    g = make_grid(16)
    sums = [abs(exponential_sum(g, m) - (g.K if m % g.K == 0 else 0)) for m in range(-2 * g.K, 2 * g.K + 1)]
    tol_rt, tol_p = _tol(tolerances, "dft_roundtrip"), _tol(tolerances, "parseval")
    return [
        Check("dft-naive-agreement", verdict(naive_err <= tol_rt), naive_err, tol_rt,
              "fast transform equals the direct sum definition"),
        Check("dft-roundtrip", verdict(roundtrip_err <= tol_rt), roundtrip_err, tol_rt,
              "inverse transform undoes the forward transform"),
        Check("dft-parseval", verdict(parseval_err <= tol_p), parseval_err, tol_p,
              "l2 norm squared equals 2 pi times the coefficient energy"),
        Check("dft-exponential-sum", verdict(max(sums) <= 1e-12 * g.K), max(sums), 1e-12 * g.K,
              "sum of e^{i m x_k} is K when K divides m and 0 otherwise"),
    ]


def run_checks(config: ExperimentConfig) -> list[Check]:
    """Checks on the trajectory a config describes; drift checks gated on resonance."""
    tol = config.tolerance
    traj, summary = run_experiment(config)
    records = traj.records
    model, step, U0 = config.model(), config.time_step(), config.initial_state()
    out = []
    l2_var = summary["l2_relative_variation"]
    out.append(Check("run-l2-conservation", verdict(l2_var <= tol["l2_conservation"]), l2_var,
                     tol["l2_conservation"], "the split-step scheme conserves the discrete l2 norm",
                     f"{len(records)} records"))

    claimed = summary["drift_claimed"]
    reason = f"not claimed: step classified {summary['classification']}"
    if isinstance(step, ResonantStep) and step.is_resonant_on(U0.grid):
        reason = "not claimed: data outside the resonant subspace"
    if not claimed:
        for name in ("run-closed-form", "run-h1-drift-bound", "run-energy-bound"):
            out.append(Check(name, "skipped", None, None, "resonant runs only", reason))
        return out

    if isinstance(model, Cubic):
        exact = cubic_closed_form(U0, model.sigma, step)
    else:
        exact = linear_closed_form(U0, model.V, step)
    scale = max(1.0, float(np.max(np.abs(U0.values))))
    err = float(np.max(np.abs(traj.final.values - exact(config.n_steps)))) / scale
    out.append(Check("run-closed-form", verdict(err <= tol["closed_form"]), err, tol["closed_form"],
                     "resonant Lie splitting reduces to the phase flow followed by the free flow",
                     f"compared at n = {config.n_steps}"))

    bounded = [r for r in records if r.h1_lower_bound is not None]
    margin = min((r.h1 - r.h1_lower_bound for r in bounded), default=None)
    out.append(Check("run-h1-drift-bound",
                     verdict(margin is None or margin >= -tol["drift_bound"]), margin, -tol["drift_bound"],
                     "h1 stays above the linear-in-n drift bound within the horizon",
                     f"{len(bounded)} records within the horizon"))

    constants = bound_constants(model, U0, step)
    e_margins = []
    for r in records:
        b = energy_lower_bound(r.n, step, constants)
        if b is not None:
            e_margins.append((r.energy_HK - b) / max(1.0, abs(r.energy_HK)))
    e_margin = min(e_margins, default=None)
    out.append(Check("run-energy-bound",
                     verdict(e_margin is None or e_margin >= -tol["energy_bound"]), e_margin,
                     -tol["energy_bound"], "energy stays above the quadratic bound within the horizon",
                     f"{len(e_margins)} records within the horizon"))
    return out


def verify_suite(
    config: ExperimentConfig | None = None,
    *,
    seed: int | None = None,
    tolerances: Mapping[str, float] | None = None,
    hooks: Mapping[str, Callable] | None = None,
    acceptance: bool = True,
) -> VerificationReport:
    """Run the invariant checks, the config's own checks and (optionally) the acceptance checks.

    ``hooks`` replaces ``forward_dft`` / ``inverse_dft`` inside the DFT checks,
    so a broken transform can be shown to fail them.
    """
    if seed is None:
        seed = config.seed if config is not None else 0
    tol = dict(config.tolerance) if config is not None else {}
    tol.update(tolerances or {})
    report = VerificationReport(conventions=dict(CONVENTIONS))
    report.extend(dft_checks(seed, tol, hooks))
    if config is not None:
        report.extend(run_checks(config))
    if acceptance:
        report.extend(acceptance_checks(seed, tol))
    return report
