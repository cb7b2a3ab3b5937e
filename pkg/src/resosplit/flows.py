"""Exact sub-flows, Lie and Strang steps, and trajectory evolution.

Sign convention: the free flow multiplies ``U_hat_j`` by ``exp(-i t j^2)`` and
the potential flow multiplies ``U_k`` by ``exp(-i t f(x_k, |U_k|^2))``. One Lie
step is the potential flow followed by the free flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .models import Cubic, Linear, ModelSpec, Step, step_fraction, step_value
from .spectral import PhysicalState, SpectralState, forward_dft, inverse_dft


class NonFiniteStateError(FloatingPointError):
    """Raised when a trajectory produces NaN or infinite values."""

    def __init__(self, step_index: int):
        super().__init__(f"non-finite state produced at step n={step_index}")
        self.step_index = step_index


def free_phases(indices: np.ndarray, t: Step) -> np.ndarray:
    """``exp(-i t j^2)`` for each j.

    For rational times ``t = 2*pi*a/b`` the exponent is reduced modulo ``b``
    in integer arithmetic first, so resonant phases are exactly 1.
    """
    frac = step_fraction(t)
    j2 = indices.astype(np.int64) ** 2
    if frac is None:
        return np.exp(-1j * step_value(t) * j2.astype(float))
    a, b = frac.numerator, frac.denominator
    r = (a * j2) % b
    return np.exp(-2j * np.pi * r / b)


def free_flow(U_hat: SpectralState, t: Step) -> SpectralState:
    return SpectralState(U_hat.grid, free_phases(U_hat.grid.indices, t) * U_hat.coeffs)


def potential_values(U: PhysicalState, model: ModelSpec) -> np.ndarray:
    """``f(x_k, |U_k|^2)`` on the grid."""
    if isinstance(model, Linear):
        return model.V.values.real
    if isinstance(model, Cubic):
        return model.sigma * np.abs(U.values) ** 2
    raise TypeError(f"unknown model {model!r}")


def potential_flow(U: PhysicalState, t: Step, model: ModelSpec) -> PhysicalState:
    f = potential_values(U, model)
    return PhysicalState(U.grid, np.exp(-1j * step_value(t) * f) * U.values)


def lie_step(U: PhysicalState, tau: Step, model: ModelSpec) -> PhysicalState:
    return inverse_dft(free_flow(forward_dft(potential_flow(U, tau, model)), tau))


def strang_step(U: PhysicalState, tau: Step, model: ModelSpec) -> PhysicalState:
    half = step_value(tau) / 2
    V = potential_flow(U, half, model)
    V = inverse_dft(free_flow(forward_dft(V), tau))
    return potential_flow(V, half, model)


def _rhs(U: np.ndarray, grid, model: ModelSpec) -> np.ndarray:
    """``-i (Delta^K U + f^K(U) U)``: right-hand side of the discretised ODE."""
    S = PhysicalState(grid, U)
    U_hat = forward_dft(S)
    lap = inverse_dft(SpectralState(grid, grid.indices.astype(float) ** 2 * U_hat.coeffs))
    return -1j * (lap.values + potential_values(S, model) * U)


def rk4_reference(
    U: PhysicalState, t: float, model: ModelSpec, substeps: int = 2000
) -> PhysicalState:
    """Classical RK4 on the space-discretised ODE; reference for splitting errors."""
    h = t / substeps
    y = np.array(U.values)
    g = U.grid
    for _ in range(substeps):
        k1 = _rhs(y, g, model)
        k2 = _rhs(y + h / 2 * k1, g, model)
        k3 = _rhs(y + h / 2 * k2, g, model)
        k4 = _rhs(y + h * k3, g, model)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return PhysicalState(g, y)


@dataclass
class Trajectory:
    initial: PhysicalState
    tau: Step
    records: list = field(default_factory=list)
    final: PhysicalState | None = None


Recorder = Callable[[int, PhysicalState], object]


def evolve(
    U0: PhysicalState,
    tau: Step,
    n_steps: int,
    model: ModelSpec,
    observers: Sequence[Recorder] | Recorder = (),
    *,
    step: Callable[[PhysicalState, Step, ModelSpec], PhysicalState] = lie_step,
) -> Trajectory:
    """Apply ``step`` ``n_steps`` times.

    Each observer is called as ``observer(n, U^n)`` for n = 0..n_steps. If a
    single observer is given its return values become the records; with
    several, each record is the tuple of their return values. Without
    observers the records are the states themselves.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be non-negative, got {n_steps}")
    if callable(observers):
        observers = (observers,)
    observers = tuple(observers)

    def observe(n: int, U: PhysicalState):
        if not observers:
            return U
        out = tuple(obs(n, U) for obs in observers)
        return out[0] if len(out) == 1 else out

    U = U0
    traj = Trajectory(initial=U0, tau=tau)
    traj.records.append(observe(0, U))
    for n in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            U = step(U, tau, model)
        if not np.all(np.isfinite(U.values)):
            raise NonFiniteStateError(n)
        traj.records.append(observe(n, U))
    traj.final = U
    return traj


def iterate(U0: PhysicalState, tau: Step, model: ModelSpec, n: int) -> Iterable[PhysicalState]:
    """Yield ``U^0, U^1, ..., U^n`` of the Lie scheme."""
    U = U0
    yield U
    for _ in range(n):
        U = lie_step(U, tau, model)
        yield U
