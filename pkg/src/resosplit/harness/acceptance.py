"""The ten acceptance checks, each a function returning one :class:`Check`."""

from __future__ import annotations

import math

import numpy as np

from .. import semidiscrete as sd
from ..fixtures import (
    cfl_control_step,
    cfl_sharpness,
    cubic_energy,
    cubic_k4,
    linear_energy,
    linear_k8,
    nonresonant_step,
)
from ..flows import evolve, free_flow
from ..gn import continuous_gn_survey, discrete_gn_survey, relative_spread
from ..models import Cubic, Linear, ResonantStep, step_value
from ..norms import EQUIV_LOWER, EQUIV_UPPER, energy_HK, h1_seminorm, h1_seminorm_sq, kinetic_TK, l2_norm
from ..resonance import (
    bound_constants,
    commutator_defect,
    energy_lower_bound,
    free_flow_identity_defect,
    h1_lower_bound,
    project_W,
)
from ..spectral import PhysicalState, cosine, forward_dft, inverse_dft, make_grid, sample_function
from .config import DEFAULT_TOLERANCES
from .report import Check, verdict

#: ``(q, p, K)`` cases for the commutator and free-flow checks.
RESONANCE_CASES = ((2, 1, 8), (3, 2, 12), (4, 3, 16))
CONSERVATION_SIZES = (4, 8, 64, 256)
CFL_QS = (4, 8, 16)


def _tol(tolerances, name):
    return (tolerances or {}).get(name, DEFAULT_TOLERANCES[name])


def _random_state(grid, rng, real=False):
    v = rng.standard_normal(grid.K) + (0 if real else 1j * rng.standard_normal(grid.K))
    return PhysicalState(grid, v)


def _real_member(grid, q, rng):
    """A real state in W_q: projection of a real random state, made exactly real."""
    V = project_W(_random_state(grid, rng, real=True), q)
    return PhysicalState(grid, V.values.real)


# --- 1 ---------------------------------------------------------------------


def l2_conservation(seed: int = 0, n_steps: int = 1000, tolerances=None) -> Check:
    tol = _tol(tolerances, "l2_conservation")
    rng = np.random.default_rng(seed)
    worst, where = 0.0, ""
    for K in CONSERVATION_SIZES:
        g = make_grid(K)
        models = [("linear", Linear(_random_state(g, rng, real=True))), ("cubic+", Cubic(1)), ("cubic-", Cubic(-1))]
        steps = [("resonant", ResonantStep(1, 2)), ("nonresonant", nonresonant_step(K))]
        for mname, model in models:
            for sname, step in steps:
                U0 = _random_state(g, rng)
                l2 = np.array(evolve(U0, step, n_steps, model, lambda n, U: l2_norm(U)).records)
                rel = float(np.max(np.abs(l2 - l2[0])) / l2[0])
                if rel >= worst:
                    worst, where = rel, f"K={K} {mname} {sname}"
    return Check(
        "A1-l2-conservation", verdict(worst <= tol), worst, tol,
        "the split-step scheme conserves the discrete l2 norm",
        f"24 runs of {n_steps} steps; worst at {where}",
    )


# --- 2, 3 ------------------------------------------------------------------


def commutator_vanishing(seed: int = 0, tolerances=None) -> Check:
    tol = _tol(tolerances, "commutator")
    floor = _tol(tolerances, "commutator_positive")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for q, p, K in RESONANCE_CASES:
        V = _real_member(make_grid(K), q, rng)
        worst = max(worst, commutator_defect(ResonantStep(p, q), V))
    g8 = make_grid(8)
    control = commutator_defect(ResonantStep(1, 2), sample_function(cosine(1), g8))
    ok = worst <= tol and control >= floor
    return Check(
        "A2-commutator-vanishing", verdict(ok), worst, tol,
        "free flow and potential commute at resonant steps for potentials in W_q",
        f"control V=cos(x), q=2, K=8: defect {control:.4g} (must be >= {floor:g})",
    )


def free_flow_identity(tolerances=None) -> Check:
    tol = _tol(tolerances, "free_flow_identity")
    worst, off = 0.0, math.inf
    for q, p, K in RESONANCE_CASES:
        g = make_grid(K)
        for power in (1, 2):
            step = ResonantStep(p, q, power)
            worst = max(worst, free_flow_identity_defect(step, g))
            off = min(off, free_flow_identity_defect(step, g, members=False))
    return Check(
        "A3-free-flow-identity", verdict(worst <= tol), worst, tol,
        "the free flow over one resonant step is the identity on W_q (powers 1 and 2)",
        f"smallest defect on non-members {off:.4g}",
    )


# --- 4 ---------------------------------------------------------------------


def cubic_closed_form(U0, sigma, step):
    mod2 = np.abs(U0.values) ** 2
    tau = step_value(step)
    return lambda n: U0.values * np.exp(-1j * sigma * n * tau * mod2)


def linear_closed_form(U0, V, step):
    def at(n):
        phased = PhysicalState(U0.grid, U0.values * np.exp(-1j * n * step.tau * V.values))
        return inverse_dft(free_flow(forward_dft(phased), step.times(n))).values

    return at


def _unit_sup(U):
    return PhysicalState(U.grid, U.values / np.max(np.abs(U.values)))


def _cubic_case(fx):
    return (fx.name, fx.model, fx.U0, fx.step, cubic_closed_form(fx.U0, fx.model.sigma, fx.step))


def closed_form_cases(seed: int = 0):
    """``(name, model, U0, step, closed_form)`` tuples covering both models.

    Amplitudes are of order one: the comparison error is roundoff carried
    through the modulus-dependent phase and grows like ``n^2 tau |U|^2 eps``.
    """
    rng = np.random.default_rng(seed)
    cases = [_cubic_case(fx) for fx in (cubic_k4(1), cubic_k4(-1), cfl_sharpness(4, 1), cfl_sharpness(4, -1))]
    g = make_grid(64)
    for sigma in (1, -1):
        for q, power in ((4, 1), (8, 1), (2, 2)):
            step = ResonantStep(1, q, power)
            U0 = _unit_sup(project_W(_random_state(g, rng), q))
            name = f"cubic-random-q{q}-p{power}-s{sigma:+d}"
            cases.append((name, Cubic(sigma), U0, step, cubic_closed_form(U0, sigma, step)))
    fx = linear_k8()
    cases.append((fx.name, fx.model, fx.U0, fx.step, linear_closed_form(fx.U0, fx.model.V, fx.step)))
    for q, p, power in ((4, 1, 1), (8, 3, 1), (2, 1, 2)):
        step = ResonantStep(p, q, power)
        V = _unit_sup(_real_member(g, q**power, rng))
        U0 = _unit_sup(_random_state(g, rng))
        cases.append((f"linear-random-q{q}-p{power}", Linear(V), U0, step, linear_closed_form(U0, V, step)))
    return cases


def closed_form(seed: int = 0, n_steps: int = 1000, tolerances=None) -> Check:
    tol = _tol(tolerances, "closed_form")
    worst, where = 0.0, ""
    for name, model, U0, step, exact in closed_form_cases(seed):
        scale = max(1.0, float(np.max(np.abs(U0.values))))
        errs = evolve(U0, step, n_steps, model, lambda n, U: float(np.max(np.abs(U.values - exact(n))))).records
        err = max(errs) / scale
        if err >= worst:
            worst, where = err, name
    return Check(
        "A4-closed-form", verdict(worst <= tol), worst, tol,
        "resonant Lie splitting reduces to the pure phase flow followed by the exact free flow",
        f"worst case {where}, every n <= {n_steps}",
    )


def closed_form_roundoff_report(n_steps: int = 1000) -> Check:
    """Closed-form agreement on the drifting energy fixtures, reported only.

    Along these trajectories roundoff leaves W_q and is amplified (strongly
    so in the focusing case), so agreement over 1000 steps is a statement
    about floating point, not about the scheme.
    """
    parts, worst = [], 0.0
    for fx in (cubic_energy(sigma=1), cubic_energy(sigma=-1), cubic_energy(sigma=1, power=2), cubic_energy(sigma=-1, power=2)):
        exact = cubic_closed_form(fx.U0, fx.model.sigma, fx.step)
        errs = evolve(fx.U0, fx.step, n_steps, fx.model, lambda n, U: float(np.max(np.abs(U.values - exact(n))))).records
        first = next((n for n, e in enumerate(errs) if e > 1e-10), None)
        worst = max(worst, max(errs))
        parts.append(f"{fx.name}: max error {max(errs):.3g}, first n above 1e-10: {first}")
    return Check(
        "A4-roundoff-growth", "reported", worst, None,
        "roundoff leaving the resonant subspace along long drifting runs; reported only",
        "; ".join(parts),
    )


# --- 5 ---------------------------------------------------------------------


def _drift_margins(fx, extra_steps=0):
    c = bound_constants(fx.model, fx.U0, fx.step)
    horizon = c.horizon_steps
    n_run = horizon + extra_steps
    h1 = evolve(fx.U0, fx.step, n_run, fx.model, lambda n, U: h1_seminorm(U)).records
    margins = [h1[n] - h1_lower_bound(n, fx.step, c) for n in range(horizon + 1)]
    return c, margins


def drift_lower_bound(tolerances=None) -> Check:
    tol = _tol(tolerances, "drift_bound")
    fx = cubic_k4()
    c, margins = _drift_margins(fx)
    worst = min(margins)
    others = []
    for extra in (cubic_energy(sigma=1), cubic_energy(sigma=-1), cubic_energy(power=2), *map(cfl_sharpness, CFL_QS)):
        ce, m = _drift_margins(extra)
        others.append(f"{extra.name}: min margin {min(m):.4g} over {ce.horizon_steps + 1} steps")
        worst = min(worst, min(m))
    return Check(
        "A5-drift-lower-bound", verdict(worst >= -tol), worst, -tol,
        "h1 of the resonant trajectory grows at least like (2/pi) n tau c0 - h1_0 within the horizon",
        f"K=4 fixture: horizon {c.horizon_steps}, c0={c.c0:.6g}, C1={c.C1:.6g}, h1_0={c.h1_0:.6g}; "
        + "; ".join(others),
    )


# --- 6 ---------------------------------------------------------------------


def energy_fixtures():
    return (linear_energy(), cubic_energy(sigma=1), cubic_energy(sigma=-1), cubic_energy(sigma=1, power=2))


def energy_growth_case(fx, tolerances=None) -> dict:
    c = bound_constants(fx.model, fx.U0, fx.step)
    horizon = c.horizon_steps
    H = np.array(evolve(fx.U0, fx.step, horizon, fx.model, lambda n, U: energy_HK(U, fx.model)).records)
    bounds = np.array([energy_lower_bound(n, fx.step, c) for n in range(horizon + 1)])
    scale = np.maximum(1.0, np.abs(H))
    margin = float(np.min((H - bounds) / scale))
    lo = horizon // 2
    t = np.arange(lo, horizon + 1) * c.tau
    y = np.sqrt(np.maximum(H[lo:], 0.0))
    slope, intercept = np.polyfit(t, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * t + intercept)) ** 2)))
    spread = float(np.ptp(y))
    return {
        "name": fx.name,
        "horizon": horizon,
        "margin": margin,
        "slope": float(slope),
        "residual_fraction": resid / spread if spread > 0 else math.inf,
    }


def energy_growth(tolerances=None) -> Check:
    tol = _tol(tolerances, "energy_bound")
    fit_tol = _tol(tolerances, "energy_fit_residual")
    rows = [energy_growth_case(fx) for fx in energy_fixtures()]
    ok = all(r["margin"] >= -tol and r["slope"] > 0 and r["residual_fraction"] <= fit_tol for r in rows)
    worst_fit = max(r["residual_fraction"] for r in rows)
    detail = "; ".join(
        f"{r['name']}: horizon {r['horizon']}, margin {r['margin']:.4g}, slope {r['slope']:.4g}, "
        f"fit residual {100 * r['residual_fraction']:.2f}%"
        for r in rows
    )
    return Check(
        "A6-energy-growth", verdict(ok), worst_fit, fit_tol,
        "discrete energy stays above a quadratic in n tau and sqrt(H) grows linearly",
        detail,
    )


# --- 7 ---------------------------------------------------------------------


def cfl_case(q: int) -> dict:
    fx = cfl_sharpness(q)
    g = fx.U0.grid
    cfl = fx.step.tau * g.K**2
    c = bound_constants(fx.model, fx.U0, fx.step)
    n = c.horizon_steps
    h1 = evolve(fx.U0, fx.step, n, fx.model, lambda k, U: h1_seminorm(U)).records
    ctrl = evolve(fx.U0, cfl_control_step(q), n, fx.model, lambda k, U: h1_seminorm(U)).records
    return {
        "q": q,
        "K": g.K,
        "cfl": cfl,
        "cfl_error": abs(cfl - 8 * math.pi) / (8 * math.pi),
        "horizon": n,
        "ratio": h1[-1] / h1[0],
        "control_ratio": max(ctrl) / ctrl[0],
    }


def cfl_sharpness_check(rows=None, tolerances=None) -> Check:
    factor = _tol(tolerances, "cfl_drift_factor")
    rows = rows or [cfl_case(q) for q in CFL_QS]
    ok = all(r["cfl_error"] <= 4 * np.finfo(float).eps and r["ratio"] >= factor for r in rows)
    detail = "; ".join(
        f"q={r['q']}: tau*K^2/pi={r['cfl'] / math.pi:.17g}, horizon {r['horizon']}, h1 ratio {r['ratio']:.4g}"
        for r in rows
    )
    return Check(
        "A7-cfl-sharpness", verdict(ok), min(r["ratio"] for r in rows), factor,
        "tau = 2 pi/q^2 on K = 2q has tau K^2 = 8 pi and drifts",
        detail,
    )


def cfl_control_report(rows=None, tolerances=None) -> Check:
    limit = _tol(tolerances, "control_growth")
    rows = rows or [cfl_case(q) for q in CFL_QS]
    worst = max(r["control_ratio"] for r in rows)
    detail = "; ".join(f"q={r['q']}: max h1 ratio {r['control_ratio']:.4g}" for r in rows)
    within = "within" if worst < limit else "exceeds"
    return Check(
        "A7-control", "reported", worst, limit,
        "control at tau K^2 = 4 pi (rational, not resonant on the grid); reported only",
        f"{detail}; {within} the stated factor",
    )


# --- 8 ---------------------------------------------------------------------


def norm_equivalence(seed: int = 0, n_states: int = 1000, tolerances=None) -> Check:
    tol = _tol(tolerances, "norm_equivalence")
    rng = np.random.default_rng(seed)
    worst = 0.0
    lo_seen, hi_seen = math.inf, 0.0
    witnesses = []
    for K in CONSERVATION_SIZES:
        g = make_grid(K)
        for _ in range(n_states):
            U = _random_state(g, rng)
            T, h2 = kinetic_TK(forward_dft(U)), h1_seminorm_sq(U)
            r = T / h2
            lo_seen, hi_seen = min(lo_seen, r), max(hi_seen, r)
            worst = max(worst, (EQUIV_LOWER - r) / EQUIV_LOWER, (r - EQUIV_UPPER) / EQUIV_UPPER)
        lowest = PhysicalState(g, np.exp(1j * g.points))
        nyquist = PhysicalState(g, np.exp(-1j * (g.K // 2) * g.points))
        lo_w = kinetic_TK(forward_dft(lowest)) / h1_seminorm_sq(lowest)
        hi_w = kinetic_TK(forward_dft(nyquist)) / h1_seminorm_sq(nyquist)
        witnesses.append((K, lo_w / EQUIV_LOWER - 1, abs(hi_w / EQUIV_UPPER - 1)))
    K_last, lo_gap, hi_gap = witnesses[-1]
    gaps_shrink = all(a[1] >= b[1] for a, b in zip(witnesses, witnesses[1:]))
    ok = worst <= tol and all(w[2] <= tol for w in witnesses) and gaps_shrink and lo_gap <= 1e-4
    return Check(
        "A8-norm-equivalence", verdict(ok), worst, tol,
        "kinetic energy and squared h1 seminorm are equivalent with constants 1/(2 pi) and pi/8",
        f"ratios seen in [{lo_seen:.6g}, {hi_seen:.6g}]; mode -K/2 attains pi/8 (gap {max(w[2] for w in witnesses):.2g}); "
        f"mode 1 gap to 1/(2 pi) at K={K_last}: {lo_gap:.3g}",
    )


# --- 9 ---------------------------------------------------------------------


def semidiscrete_fixtures():
    """``(name, u0, model, step)`` for the space-continuous growth checks."""
    u_cos = sd.FourierFunction.from_modes({-1: 0.5, 1: 0.5}, real=True)
    V = sd.FourierFunction.from_modes({-2: 0.5, 2: 0.5}, real=True)
    u_pair = sd.FourierFunction.from_modes({0: 1.0, -2: 0.5})
    out = [("linear-cos", u_cos, sd.SemiLinear(V), ResonantStep(1, 2))]
    for sigma in (1, -1):
        for power in (1, 2):
            out.append((f"cubic-s{sigma:+d}-p{power}", u_pair, sd.SemiCubic(sigma), ResonantStep(1, 2, power)))
    return out


def semidiscrete_case(name, u0, model, step, n_max: int = 64) -> dict:
    gc = sd.growth_constants(u0, model)
    tau = step.tau
    worst_h1, worst_energy, claimed = math.inf, math.inf, 0
    for n in range(n_max + 1):
        if isinstance(model, sd.SemiLinear):
            u = sd.closed_form_linear(u0, model.V, step.p, step.q, n)
        else:
            u = sd.closed_form_cubic(u0, model.sigma, step, n)
        h1 = sd.h1_norm(u)
        slack_h1 = u.residual_h1
        worst_h1 = min(worst_h1, h1 - (gc.c0 * n * tau - gc.c) + slack_h1)
        bound = sd.energy_lower_bound(n, tau, gc)
        if bound is not None:
            claimed += 1
            H = sd.continuous_energy(u, model)
            slack = 2 * (h1 + 1) * u.residual_h1 + 1e-12 * max(1.0, abs(H))
            worst_energy = min(worst_energy, H - bound + slack)
    return {"name": name, "c0": gc.c0, "c_prime": gc.c_prime, "h1": worst_h1, "energy": worst_energy, "claimed": claimed}


def semidiscrete_growth(n_max: int = 64) -> Check:
    rows = [semidiscrete_case(*f, n_max=n_max) for f in semidiscrete_fixtures()]
    worst = min(min(r["h1"], r["energy"]) for r in rows)
    ok = worst >= 0 and all(r["claimed"] > 0 for r in rows)
    detail = "; ".join(
        f"{r['name']}: c0={r['c0']:.4g}, c'={r['c_prime']:.4g}, h1 margin {r['h1']:.4g}, "
        f"energy margin {r['energy']:.4g} ({r['claimed']} claimed steps)"
        for r in rows
    )
    return Check(
        "A9-semidiscrete-growth", verdict(ok), worst, 0.0,
        "space-continuous resonant splitting: H1 norm grows linearly and energy quadratically",
        f"n <= {n_max}, margins include the quadrature residual; {detail}",
    )


# --- 10 --------------------------------------------------------------------


def gn_constants(seed: int = 0, n_states: int = 1000, tolerances=None) -> Check:
    tol = _tol(tolerances, "gn_stability")
    surveys = {
        "discrete": [discrete_gn_survey(s, n_states=n_states) for s in (seed, seed + 1)],
        "continuous": [continuous_gn_survey(s, n_states=n_states) for s in (seed, seed + 1)],
    }
    spreads, parts, ok = [], [], True
    for kind, (a, b) in surveys.items():
        spread = relative_spread(a.constant, b.constant)
        spreads.append(spread)
        ok &= a.bounded and b.bounded and spread <= tol
        ok &= max(a.constant, b.constant) <= a.proven_sup * (1 + 1e-12)
        parts.append(
            f"{kind}: constants {a.constant:.6g} / {b.constant:.6g}, sample max "
            f"{max(a.sample_max.values()):.4g} / {max(b.sample_max.values()):.4g}, "
            f"plain-ratio max {max(a.reference_max.values()):.4g} / {max(b.reference_max.values()):.4g}"
        )
    return Check(
        "A10-gn-constant", verdict(ok), max(spreads), tol,
        "Gagliardo-Nirenberg ratios admit a K-independent constant, stable across seeds",
        f"seeds {seed},{seed + 1}; K in 8..512, {n_states} states each; " + "; ".join(parts),
    )


def acceptance_checks(seed: int = 0, tolerances=None) -> list[Check]:
    """All acceptance checks in order; runs in well under a minute."""
    rows = [cfl_case(q) for q in CFL_QS]
    return [
        l2_conservation(seed, tolerances=tolerances),
        commutator_vanishing(seed, tolerances=tolerances),
        free_flow_identity(tolerances=tolerances),
        closed_form(seed, tolerances=tolerances),
        closed_form_roundoff_report(),
        drift_lower_bound(tolerances=tolerances),
        energy_growth(tolerances=tolerances),
        cfl_sharpness_check(rows, tolerances=tolerances),
        cfl_control_report(rows, tolerances=tolerances),
        norm_equivalence(seed, tolerances=tolerances),
        semidiscrete_growth(),
        gn_constants(seed, tolerances=tolerances),
    ]
