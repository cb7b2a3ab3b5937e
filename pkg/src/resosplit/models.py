"""Model descriptions and time steps shared by the flows and the bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Union

import numpy as np

from .spectral import Grid, PhysicalState


@dataclass(frozen=True, eq=False)
class Linear:
    """``f(x, |u|^2) = V(x)`` with real potential samples ``V``."""

    V: PhysicalState

    def __post_init__(self):
        v = self.V.values
        scale = max(1.0, float(np.max(np.abs(v), initial=0.0)))
        if np.max(np.abs(v.imag), initial=0.0) > 1e-12 * scale:
            raise ValueError("linear potential must be real-valued")
        object.__setattr__(self, "V", PhysicalState(self.V.grid, v.real))

    kind = "linear"


@dataclass(frozen=True)
class Cubic:
    """``f(x, |u|^2) = sigma * |u|^2``."""

    sigma: int = 1

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma!r}")

    kind = "cubic"


ModelSpec = Union[Linear, Cubic]


@dataclass(frozen=True)
class ResonantStep:
    """Rational step ``tau = 2*pi*p / q**power`` held in canonical form.

    ``(p, q)`` are reduced so that ``gcd(p, q) == 1``; for ``power == 2`` a
    common factor turns the step into its reduced ``power == 1`` form unless
    the reduced denominator is still a perfect square. So ``(2, 4, 1)`` becomes
    ``(1, 2, 1)`` and ``(2, 2, 2)`` becomes ``(1, 2, 1)``.
    """

    p: int
    q: int
    power: int = 1

    def __post_init__(self):
        p, q, e = int(self.p), int(self.q), int(self.power)
        if p <= 0 or q <= 0:
            raise ValueError(f"p and q must be positive, got p={p}, q={q}")
        if e not in (1, 2):
            raise ValueError(f"power must be 1 or 2, got {e}")
        g = gcd(p, q)
        if g > 1:
            f = Fraction(p, q**e)
            s = isqrt(f.denominator)
            if e == 2 and s * s == f.denominator and gcd(f.numerator, s) == 1:
                p, q = f.numerator, s
            else:
                p, q, e = f.numerator, f.denominator, 1
        if q == 1:
            e = 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "power", e)

    @property
    def fraction(self) -> Fraction:
        """``tau / (2*pi)`` as an exact fraction."""
        return Fraction(self.p, self.q**self.power)

    @property
    def tau(self) -> float:
        return 2 * np.pi * self.p / self.q**self.power

    def __float__(self) -> float:
        return self.tau

    def times(self, n: int) -> "ExactTime":
        """The exact time ``n * tau``."""
        return ExactTime(self.fraction * n)

    def is_resonant_on(self, grid: Grid) -> bool:
        """True when ``K = kappa*q`` with ``kappa`` even."""
        return grid.K % self.q == 0 and (grid.K // self.q) % 2 == 0


@dataclass(frozen=True)
class ExactTime:
    """A time ``2*pi*r`` with ``r`` rational; free-flow phases are reduced exactly."""

    fraction: Fraction

    @property
    def tau(self) -> float:
        return 2 * np.pi * float(self.fraction)

    def __float__(self) -> float:
        return self.tau


Step = Union[float, ResonantStep, ExactTime]


def step_value(step: Step) -> float:
    return float(step)


def step_fraction(step: Step) -> Fraction | None:
    if isinstance(step, (ResonantStep, ExactTime)):
        return step.fraction
    return None
