"""Discrete norms, the kinetic functional and the discrete energy.

Normalisation conventions used throughout:

* ``l2_norm(U)**2 = (2*pi/K) * sum |U_k|^2``.
* ``h1_seminorm(U)**2 = (2*pi/K) * sum |(U_{k+1} - U_k)/delta_x|^2`` with
  periodic wraparound.
* ``kinetic_TK(U_hat) = sum_j j^2 |U_hat_j|^2``. With this scaling the
  kinetic part of the energy is exactly ``pi * kinetic_TK`` and
  ``h1^2 / (2*pi) <= kinetic_TK <= (pi/8) * h1^2`` for every K.
* Cubic energy: ``H^K = pi*T + (sigma/4) * delta_x * sum |U_k|^4``, the
  quantity conserved by the space-discretised ODE.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import Cubic, Linear, ModelSpec
from .spectral import PhysicalState, SpectralState, dft_matrix, forward_dft

#: Constants ``(c, C)`` of ``c*h1^2 <= kinetic_TK <= C*h1^2``.
EQUIV_LOWER = 1 / (2 * np.pi)
EQUIV_UPPER = np.pi / 8

#: Weight of ``delta_x * sum |U|^4`` in the cubic energy.
QUARTIC_ENERGY_FACTOR = 0.25


def l2_norm_sq(U: PhysicalState) -> float:
    return float(U.grid.delta_x * np.sum(np.abs(U.values) ** 2))


def l2_norm(U: PhysicalState) -> float:
    return float(np.sqrt(l2_norm_sq(U)))


def forward_difference(values: np.ndarray, delta_x: float) -> np.ndarray:
    """``(v_{k+1} - v_k) / delta_x`` with ``v_{K/2} = v_{-K/2}``."""
    return (np.roll(values, -1) - values) / delta_x


def h1_seminorm_sq(U: PhysicalState) -> float:
    dx = U.grid.delta_x
    return float(dx * np.sum(np.abs(forward_difference(U.values, dx)) ** 2))


def h1_seminorm(U: PhysicalState) -> float:
    return float(np.sqrt(h1_seminorm_sq(U)))


def h1_seminorm_spectral_sq(U_hat: SpectralState) -> float:
    """Fourier-side evaluation of ``h1_seminorm**2``."""
    g = U_hat.grid
    j = g.indices
    mult = (np.exp(1j * g.delta_x * j) - 1) / g.delta_x
    return float(2 * np.pi * np.sum(np.abs(mult) ** 2 * np.abs(U_hat.coeffs) ** 2))


def kinetic_TK(U_hat: SpectralState) -> float:
    j = U_hat.grid.indices
    return float(np.sum(j.astype(float) ** 2 * np.abs(U_hat.coeffs) ** 2))


def linf_norm(U: PhysicalState) -> float:
    return float(np.max(np.abs(U.values)))


def quartic_term(U: PhysicalState) -> float:
    return float(U.grid.delta_x * np.sum(np.abs(U.values) ** 4))


def potential_energy(U: PhysicalState, model: ModelSpec) -> float:
    if isinstance(model, Linear):
        return float(np.pi / U.grid.K * np.sum(model.V.values.real * np.abs(U.values) ** 2))
    if isinstance(model, Cubic):
        return model.sigma * QUARTIC_ENERGY_FACTOR * quartic_term(U)
    raise TypeError(f"unknown model {model!r}")


def energy_HK(U: PhysicalState, model: ModelSpec) -> float:
    return np.pi * kinetic_TK(forward_dft(U)) + potential_energy(U, model)


def laplacian_quadratic_form(U: PhysicalState) -> complex:
    """``U^H Delta^K U`` evaluated with the dense matrix ``F^{-1} D F``."""
    F = dft_matrix(U.grid)
    lap = (U.grid.K * F.conj().T) @ np.diag(U.grid.indices.astype(float) ** 2) @ F
    return complex(np.conj(U.values) @ lap @ U.values)


def gn_ratio(U: PhysicalState) -> float | None:
    """``quartic / (h1 * l2^3)``; ``None`` when U is constant or zero."""
    h1 = h1_seminorm(U)
    l2 = l2_norm(U)
    scale = linf_norm(U)
    if scale == 0 or h1 <= 1e-14 * scale:
        return None
    return quartic_term(U) / (h1 * l2**3)


def gn_bound(U: PhysicalState, constant: float = 1.0) -> float:
    """Right-hand side of ``quartic <= constant*h1*l2^3 + l2^4/(2*pi)``.

    With ``constant = 1`` this is a proven bound: ``max|U|^2`` is at most the
    mean of ``|U|^2`` plus half the total variation of ``|U|^2`` around the
    circle, and the latter is at most ``h1 * l2`` by Cauchy-Schwarz.
    """
    l2 = l2_norm(U)
    return constant * h1_seminorm(U) * l2**3 + l2**4 / (2 * np.pi)


def gn_sharp_ratio(U: PhysicalState) -> float | None:
    """``quartic / gn_bound(U)``; at most 1, with equality for constant states."""
    denom = gn_bound(U)
    if denom == 0:
        return None
    return quartic_term(U) / denom


@dataclass(frozen=True)
class NormReport:
    l2: float
    h1: float
    linf: float
    kinetic_TK: float
    quartic: float
    energy_HK: float


def norm_report(U: PhysicalState, model: ModelSpec) -> NormReport:
    T = kinetic_TK(forward_dft(U))
    return NormReport(
        l2=l2_norm(U),
        h1=h1_seminorm(U),
        linf=linf_norm(U),
        kinetic_TK=T,
        quartic=quartic_term(U),
        energy_HK=np.pi * T + potential_energy(U, model),
    )
