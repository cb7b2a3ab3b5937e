"""Canonical resonant set-ups used by the verification suite and the tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .models import Cubic, Linear, ModelSpec, ResonantStep
from .spectral import FourierSeries, PhysicalState, cosine, make_grid, plane_wave, sample_function


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    model: ModelSpec
    U0: PhysicalState
    step: ResonantStep


def cubic_k4(sigma: int = 1) -> Fixture:
    """K=4, U0 = (1.5, 0.5, 1.5, 0.5) = 1 + e^{-2ix}/2, tau = pi."""
    g = make_grid(4)
    U0 = sample_function(FourierSeries({0: 1.0, -2: 0.5}), g)
    return Fixture(f"cubic-K4-s{sigma:+d}", Cubic(sigma), U0, ResonantStep(1, 2))


def linear_k8() -> Fixture:
    """V = cos(2x), U0 = e^{2ix}, K=8, tau = pi."""
    g = make_grid(8)
    V = sample_function(cosine(2), g)
    return Fixture("linear-K8", Linear(V), sample_function(plane_wave(2), g), ResonantStep(1, 2))


def linear_energy(K: int = 256, q: int = 8) -> Fixture:
    """V = cos(qx) in W_q, U0 = 1 + e^{ix}/2, tau = 2*pi/q."""
    g = make_grid(K)
    V = sample_function(cosine(q), g)
    U0 = sample_function(FourierSeries({0: 1.0, 1: 0.5}), g)
    return Fixture(f"linear-K{K}-q{q}", Linear(V), U0, ResonantStep(1, q))


def cubic_energy(K: int = 128, q: int = 8, sigma: int = 1, power: int = 1) -> Fixture:
    """U0 = 1 + e^{iqx}/4 in W_q, tau = 2*pi/q**power."""
    g = make_grid(K)
    U0 = sample_function(FourierSeries({0: 1.0, q: 0.25}), g)
    return Fixture(f"cubic-K{K}-q{q}-p{power}-s{sigma:+d}", Cubic(sigma), U0, ResonantStep(1, q, power))


#: Amplitude of the off-constant mode in the CFL set-up; the h1 ratio at the
#: horizon is 1/amplitude.
CFL_AMPLITUDE = 0.125


def cfl_sharpness(q: int, sigma: int = 1) -> Fixture:
    """tau = 2*pi/q^2 on K = 2q (so tau*K^2 = 8*pi), U0 = 1 + e^{-iqx}/8."""
    g = make_grid(2 * q)
    U0 = sample_function(FourierSeries({0: 1.0, -q: CFL_AMPLITUDE}), g)
    return Fixture(f"cfl-q{q}-s{sigma:+d}", Cubic(sigma), U0, ResonantStep(1, q, 2))


def cfl_control_step(q: int) -> ResonantStep:
    """tau = 2*pi/(2 q^2): tau*K^2 = 4*pi on K = 2q; rational but not resonant there."""
    return ResonantStep(1, 2 * q * q)


#: Continued-fraction truncation of (sqrt(5) - 1)/2, used for non-resonant
#: control steps ``tau = 2*pi*g/scale`` (floats, so never classified resonant).
NONRESONANT_FRACTION = Fraction(987, 1597)


def nonresonant_step(scale: int = 1) -> float:
    return 2 * np.pi * float(NONRESONANT_FRACTION) / scale
