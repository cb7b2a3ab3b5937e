"""Resonant subspaces, commutator diagnostics and explicit drift bounds.

All bounds here are assembled from fully explicit constants:

* ``2/pi`` from ``|exp(ix) - 1| >= (2/pi)|x|`` on ``[-pi, pi]``;
* the norm-equivalence constants ``(c, C) = (1/(2*pi), pi/8)``;
* the discrete Gagliardo-Nirenberg bound
  ``quartic <= gn_constant*h1*l2^3 + l2^4/(2*pi)`` (proven with constant 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flows import free_flow
from .models import Cubic, Linear, ModelSpec, ResonantStep, Step, step_fraction, step_value
from .norms import (
    EQUIV_LOWER,
    EQUIV_UPPER,
    QUARTIC_ENERGY_FACTOR,
    forward_difference,
    h1_seminorm,
    l2_norm,
    linf_norm,
)
from .spectral import Grid, PhysicalState, SpectralState, forward_dft, inverse_dft

#: Relative slack when flooring the horizon, so that exact ratios such as
#: ``pi / (pi/4) = 4`` are not lost to rounding.
HORIZON_SLACK = 1e-12


class DivisibilityError(ValueError):
    """The grid does not satisfy ``K = kappa*q`` with ``kappa`` even."""


def check_divisibility(grid: Grid, q: int) -> int:
    """Return ``kappa = K/q`` or raise :class:`DivisibilityError`."""
    if q <= 0:
        raise DivisibilityError(f"q must be positive, got {q}")
    if grid.K % q:
        raise DivisibilityError(f"q={q} does not divide K={grid.K} (need K = kappa*q)")
    kappa = grid.K // q
    if kappa % 2:
        raise DivisibilityError(
            f"kappa = K/q = {grid.K}/{q} = {kappa} is odd (need K = kappa*q, kappa even)"
        )
    return kappa


def _offending(grid: Grid, q: int) -> np.ndarray:
    return grid.indices % q != 0


def project_W(U: PhysicalState, q: int) -> PhysicalState:
    """Orthogonal projection onto grid vectors with Fourier support on multiples of q."""
    check_divisibility(U.grid, q)
    c = np.array(forward_dft(U).coeffs)
    c[_offending(U.grid, q)] = 0
    return inverse_dft(SpectralState(U.grid, c))


def membership_defect(U: PhysicalState, q: int) -> float:
    """l2 mass (``sqrt(2*pi*sum |U_hat_j|^2)``) on indices not divisible by q."""
    check_divisibility(U.grid, q)
    c = forward_dft(U).coeffs[_offending(U.grid, q)]
    return float(np.sqrt(2 * np.pi * np.sum(np.abs(c) ** 2)))


def _exact_phase(j2: np.ndarray, step: Step) -> np.ndarray:
    """``exp(+i*tau*j2)``, reduced exactly for rational steps."""
    frac = step_fraction(step)
    if frac is None:
        return np.exp(1j * step_value(step) * j2.astype(float))
    a, b = frac.numerator, frac.denominator
    return np.exp(2j * np.pi * ((a * j2) % b) / b)


def commutator_matrix(step: Step, V: PhysicalState) -> np.ndarray:
    """Fourier-basis entries of ``[exp(i tau Delta^K), V]``.

    ``(Vh[j-k] + Vh[j-k+K] + Vh[j-k-K]) * (exp(i tau j^2) - exp(i tau k^2))``
    where ``Vh`` vanishes outside B^K.
    """
    g = V.grid
    Vh = forward_dft(V).coeffs
    idx = g.indices
    d = idx[:, None] - idx[None, :]

    def lookup(m: np.ndarray) -> np.ndarray:
        inside = (m >= -g.K // 2) & (m < g.K // 2)
        out = np.zeros(m.shape, dtype=complex)
        out[inside] = Vh[m[inside] + g.K // 2]
        return out

    coeff = lookup(d) + lookup(d + g.K) + lookup(d - g.K)
    ph = _exact_phase(idx.astype(np.int64) ** 2, step)
    return coeff * (ph[:, None] - ph[None, :])


def commutator_defect(step: Step, V: PhysicalState, *, norm: str = "max") -> float:
    """Largest entry modulus (``norm="max"``) or Frobenius norm of the commutator."""
    M = commutator_matrix(step, V)
    if norm == "max":
        return float(np.max(np.abs(M)))
    if norm == "fro":
        return float(np.linalg.norm(M))
    raise ValueError(f"norm must be 'max' or 'fro', got {norm!r}")


def free_flow_identity_defect(
    step: ResonantStep, grid: Grid, *, members: bool = True
) -> float:
    """Largest ``|free_flow(e_j, tau) - e_j|`` over Fourier basis vectors.

    With ``members=True`` the basis vectors of the resonant subspace are
    used (this vanishes for resonant steps); otherwise those of its
    orthogonal complement.
    """
    check_divisibility(grid, step.q)
    worst = 0.0
    for j in grid.indices:
        if (j % step.q == 0) != members:
            continue
        e = SpectralState.from_modes(grid, {int(j): 1.0})
        worst = max(worst, float(np.linalg.norm(free_flow(e, step).coeffs - e.coeffs)))
    return worst


def resonance_weight(U0: PhysicalState, model: ModelSpec) -> np.ndarray:
    """The real profile whose gradient drives the drift: V, or |U0|^2."""
    if isinstance(model, Linear):
        return model.V.values.real
    if isinstance(model, Cubic):
        return np.abs(U0.values) ** 2
    raise TypeError(f"unknown model {model!r}")


@dataclass(frozen=True)
class BoundConstants:
    """Hypothesis quantities of the drift theorems for one (model, U0, step)."""

    c0: float
    C0: float
    C1: float
    C2: float
    h1_0: float
    l2_0: float
    horizon_steps: int | None
    tau: float
    delta_x: float
    model_kind: str
    sigma: int = 0

    @property
    def infinite_horizon(self) -> bool:
        return self.horizon_steps is None

    @property
    def no_drift(self) -> bool:
        return self.c0 == 0.0

    def within_horizon(self, n: int) -> bool:
        return self.horizon_steps is None or 0 <= n <= self.horizon_steps

    def as_dict(self) -> dict:
        return {
            "c0": self.c0,
            "C0": self.C0,
            "C1": self.C1,
            "C2": self.C2,
            "h1_0": self.h1_0,
            "l2_0": self.l2_0,
            "horizon_steps": self.horizon_steps,
            "infinite_horizon": self.infinite_horizon,
            "no_drift": self.no_drift,
            "tau": self.tau,
            "delta_x": self.delta_x,
            "model_kind": self.model_kind,
            "sigma": self.sigma,
        }


def bound_constants(model: ModelSpec, U0: PhysicalState, step: Step) -> BoundConstants:
    g = U0.grid
    dx = g.delta_x
    tau = step_value(step)
    W = resonance_weight(U0, model)
    dW = forward_difference(W, dx)
    scale = max(float(np.max(np.abs(W))), 1.0)
    # Differences below roundoff of W count as zero (constant profiles).
    dW = np.where(np.abs(dW) * dx <= 1e-13 * scale, 0.0, dW)
    C1 = float(np.max(np.abs(dW)))
    c0 = l2_norm(PhysicalState(g, dW * U0.values))
    if isinstance(model, Linear):
        C0, sigma = float(np.max(np.abs(W))), 0
    else:
        C0, sigma = linf_norm(U0), model.sigma
    if C1 == 0.0:
        horizon = None
    else:
        horizon = int(math.floor(np.pi / (tau * dx * C1) * (1 + HORIZON_SLACK)))
    h1_0 = h1_seminorm(U0)
    return BoundConstants(
        c0=c0,
        C0=C0,
        C1=C1,
        C2=h1_0,
        h1_0=h1_0,
        l2_0=l2_norm(U0),
        horizon_steps=horizon,
        tau=tau,
        delta_x=dx,
        model_kind=model.kind,
        sigma=sigma,
    )


def h1_lower_bound(n: int, step: Step, constants: BoundConstants) -> float | None:
    """``(2/pi) n tau c0 - h1_0`` for the pure phase flow; ``None`` past the horizon."""
    if not constants.within_horizon(n):
        return None
    return 2 / np.pi * n * step_value(step) * constants.c0 - constants.h1_0


@dataclass(frozen=True)
class EquivalenceConstants:
    lower: float = EQUIV_LOWER
    upper: float = EQUIV_UPPER

    @property
    def slope_factor(self) -> float:
        """``2*sqrt(c) / (pi*sqrt(C))``."""
        return 2 * math.sqrt(self.lower) / (math.pi * math.sqrt(self.upper))

    @property
    def offset_factor(self) -> float:
        """``sqrt(C/c)``, the weight of ``h1_0`` in the scheme bound."""
        return math.sqrt(self.upper / self.lower)


DEFAULT_EQUIVALENCE = EquivalenceConstants()


def _scheme_h1_bound_formula(n, tau, constants, eq):
    return eq.slope_factor * n * tau * constants.c0 - eq.offset_factor * constants.h1_0


def scheme_h1_lower_bound(
    n: int,
    step: Step,
    constants: BoundConstants,
    equivalence: EquivalenceConstants = DEFAULT_EQUIVALENCE,
) -> float | None:
    """Lower bound on ``h1(U^n)`` for the resonant Lie scheme; ``None`` past the horizon."""
    if not constants.within_horizon(n):
        return None
    return _scheme_h1_bound_formula(n, step_value(step), constants, equivalence)


@dataclass(frozen=True)
class EnergyBoundTerms:
    """``H >= kinetic*h^2 - linear*h - const`` for every U with ``h1(U) = h``."""

    kinetic: float
    linear: float
    const: float

    def minimum(self) -> float:
        return -self.linear**2 / (4 * self.kinetic) - self.const

    def at(self, h_lower: float) -> float:
        """Lower bound on H given only ``h1 >= h_lower``."""
        vertex = self.linear / (2 * self.kinetic)
        if h_lower <= vertex:
            return self.minimum()
        return self.kinetic * h_lower**2 - self.linear * h_lower - self.const


def energy_bound_terms(
    constants: BoundConstants,
    *,
    gn_constant: float = 1.0,
    equivalence: EquivalenceConstants = DEFAULT_EQUIVALENCE,
) -> EnergyBoundTerms:
    """Coefficients bounding ``H^K`` from below in terms of ``h1``.

    Kinetic part: ``pi*T >= pi*c*h1^2``. Linear potential:
    ``(pi/K) sum V|U|^2 >= -(C0/2) l2^2``. Focusing cubic:
    ``-(1/4) quartic >= -(1/4)(gn_constant*h1*l2^3 + l2^4/(2*pi))``.
    """
    kinetic = math.pi * equivalence.lower
    l2 = constants.l2_0
    if constants.model_kind == "linear":
        return EnergyBoundTerms(kinetic, 0.0, constants.C0 * l2**2 / 2)
    if constants.sigma > 0:
        return EnergyBoundTerms(kinetic, 0.0, 0.0)
    q = QUARTIC_ENERGY_FACTOR
    return EnergyBoundTerms(kinetic, q * gn_constant * l2**3, q * l2**4 / (2 * math.pi))


def energy_lower_bound(
    n: int,
    step: Step,
    constants: BoundConstants,
    *,
    gn_constant: float = 1.0,
    equivalence: EquivalenceConstants = DEFAULT_EQUIVALENCE,
) -> float | None:
    """Quadratic-in-n lower bound on ``H^K(U^n)``; ``None`` past the horizon."""
    b = scheme_h1_lower_bound(n, step, constants, equivalence)
    if b is None:
        return None
    terms = energy_bound_terms(constants, gn_constant=gn_constant, equivalence=equivalence)
    return terms.at(b)


def asymptotic_energy_slope(
    step: Step,
    constants: BoundConstants,
    equivalence: EquivalenceConstants = DEFAULT_EQUIVALENCE,
) -> float:
    """Slope in n of ``sqrt(energy bound)`` for large n."""
    kinetic = math.pi * equivalence.lower
    return equivalence.slope_factor * step_value(step) * constants.c0 * math.sqrt(kinetic)


def is_resonant(step: Step, grid: Grid) -> bool:
    return isinstance(step, ResonantStep) and step.is_resonant_on(grid)


def resonant_period(step: ResonantStep, model: ModelSpec) -> int:
    """Period q of the subspace the data must lie in.

    The cubic argument only needs the free flow to be the identity on
    ``W_q``, which holds for both powers. The linear argument needs the
    commutator to vanish, which for ``tau = 2*pi*p/q^2`` only holds on
    ``W_{q^2}``.
    """
    if isinstance(model, Linear):
        return step.q**step.power
    return step.q


def drift_claimed(model: ModelSpec, U0: PhysicalState, step: Step, *, tol: float = 1e-12) -> bool:
    """Whether the drift theorems apply: resonant step and resonant data."""
    if not isinstance(step, ResonantStep):
        return False
    q = resonant_period(step, model)
    g = U0.grid
    if g.K % q or (g.K // q) % 2:
        return False
    probe = model.V if isinstance(model, Linear) else U0
    scale = max(l2_norm(probe), 1.0)
    return membership_defect(probe, q) <= tol * scale
