"""Space-continuous oracle: truncated Fourier series on the torus.

Functions are finite Fourier series ``u(x) = sum_{|k|<=M} u_hat(k) e^{ikx}``
with ``u_hat(k) = (1/2pi) int u e^{-ikx} dx``. Norms use the normalised
measure, so ``||u||_{L2}^2 = sum |u_hat(k)|^2`` and
``||u||_{H^s}^2 = sum (1+k^2)^s |u_hat(k)|^2``.

Non-polynomial operations (the phase ``exp(-itW)``) are evaluated by
oversampled quadrature. Each result carries the mass it dropped beyond the
requested number of output modes, so callers can state margins honestly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .flows import free_phases
from .models import ResonantStep

#: Constant in ``||u||_inf^2 <= C ||u||_{L2} ||u||_{H1}``; also bounds
#: ``||u||_{L4}^4 <= C ||u||_{H1} ||u||_{L2}^3``.
AGMON_CONSTANT = 1 + 2 * math.pi


class TruncationError(RuntimeError):
    def __init__(self, residual: float, tolerance: float):
        super().__init__(
            f"truncation residual {residual:.3e} exceeds tolerance {tolerance:.3e}; "
            "increase out_modes or oversampling"
        )
        self.residual = residual
        self.tolerance = tolerance


@dataclass(frozen=True, eq=False)
class FourierFunction:
    """Coefficients ``u_hat(-M..M)`` plus the truncation residual of their computation."""

    coeffs: np.ndarray = field(repr=False)
    residual: float = 0.0
    residual_h1: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficient array must have odd length 2M+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def max_mode(self) -> int:
        return self.coeffs.size // 2

    @property
    def modes(self) -> np.ndarray:
        M = self.max_mode
        return np.arange(-M, M + 1)

    @classmethod
    def from_modes(cls, modes: Mapping[int, complex], *, real: bool = False) -> "FourierFunction":
        M = max((abs(int(k)) for k in modes), default=0)
        c = np.zeros(2 * M + 1, dtype=complex)
        for k, a in modes.items():
            c[int(k) + M] += a
        f = cls(c)
        if real:
            f.check_real()
        return f

    def coefficient(self, k: int) -> complex:
        M = self.max_mode
        return complex(self.coeffs[k + M]) if abs(k) <= M else 0j

    def check_real(self, tol: float = 1e-12) -> "FourierFunction":
        """Raise unless ``u_hat(-k) = conj(u_hat(k))``."""
        c = self.coeffs
        err = float(np.max(np.abs(c - np.conj(c[::-1])), initial=0.0))
        if err > tol * max(1.0, float(np.max(np.abs(c), initial=0.0))):
            raise ValueError(f"function is not real: conjugate-symmetry defect {err:.3e}")
        return self

    def padded(self, M: int) -> np.ndarray:
        """Coefficients on ``-M..M`` (truncating or zero-padding)."""
        out = np.zeros(2 * M + 1, dtype=complex)
        m = min(M, self.max_mode)
        out[M - m : M + m + 1] = self.coeffs[self.max_mode - m : self.max_mode + m + 1]
        return out

    def values(self, N: int) -> np.ndarray:
        """Samples at ``x_j = 2*pi*j/N``, j = 0..N-1 (requires ``N > 2M``)."""
        M = self.max_mode
        if N <= 2 * M:
            raise ValueError(f"need N > 2M = {2 * M} samples, got {N}")
        buf = np.zeros(N, dtype=complex)
        ks = self.modes
        buf[ks % N] = self.coeffs
        return np.fft.ifft(buf) * N

    def sup_bound(self) -> float:
        """``sum |u_hat(k)|``, an upper bound for ``max |u(x)|``."""
        return float(np.sum(np.abs(self.coeffs)))

    def derivative(self) -> "FourierFunction":
        return FourierFunction(1j * self.modes * self.coeffs)

    def __add__(self, other: "FourierFunction") -> "FourierFunction":
        M = max(self.max_mode, other.max_mode)
        return FourierFunction(self.padded(M) + other.padded(M))

    def scale(self, a: complex) -> "FourierFunction":
        return FourierFunction(a * self.coeffs, self.residual * abs(a), self.residual_h1 * abs(a))


def from_samples(values: np.ndarray, M: int) -> tuple[FourierFunction, float, float]:
    """Quadrature coefficients up to ``M`` and the L2 / H1 mass beyond it."""
    N = values.size
    c = np.fft.fft(values) / N
    k = np.fft.fftfreq(N, d=1.0 / N).astype(int)
    keep = np.abs(k) <= M
    out = np.zeros(2 * M + 1, dtype=complex)
    out[k[keep] + M] = c[keep]
    tail = np.abs(c[~keep]) ** 2
    res = float(np.sqrt(np.sum(tail)))
    res_h1 = float(np.sqrt(np.sum((1 + k[~keep].astype(float) ** 2) * tail)))
    return FourierFunction(out, res, res_h1), res, res_h1


def _quadrature_size(M_needed: int) -> int:
    return 1 << max(4, int(math.ceil(math.log2(max(M_needed, 1)))))


def product(u: FourierFunction, v: FourierFunction) -> FourierFunction:
    """Exact product of two trigonometric polynomials."""
    M = u.max_mode + v.max_mode
    N = _quadrature_size(2 * M + 2)
    prod, _, _ = from_samples(u.values(N) * v.values(N), M)
    return prod


def modulus_squared(u: FourierFunction) -> FourierFunction:
    """``|u|^2`` as an exact (real) trigonometric polynomial."""
    conj = FourierFunction(np.conj(u.coeffs[::-1]))
    return product(u, conj)


# --- norms ------------------------------------------------------------------


def hs_norm(u: FourierFunction, s: float) -> float:
    k = u.modes.astype(float)
    return float(np.sqrt(np.sum((1 + k**2) ** s * np.abs(u.coeffs) ** 2)))


def l2_norm(u: FourierFunction) -> float:
    return hs_norm(u, 0)


def h1_norm(u: FourierFunction) -> float:
    return hs_norm(u, 1)


def derivative_l2(u: FourierFunction) -> float:
    return float(np.sqrt(np.sum(u.modes.astype(float) ** 2 * np.abs(u.coeffs) ** 2)))


def _mean_power(u: FourierFunction, p: int) -> float:
    """``(1/2pi) int |u|^p`` exactly, for even ``p`` (a polynomial of degree pM)."""
    N = _quadrature_size(p * u.max_mode + 2)
    return float(np.mean(np.abs(u.values(N)) ** p))


def l4_norm(u: FourierFunction) -> float:
    return _mean_power(u, 4) ** 0.25


def linf_norm(u: FourierFunction, oversample: int = 64) -> float:
    """Max modulus on a fine grid (a lower estimate of the sup)."""
    N = _quadrature_size(oversample * (2 * u.max_mode + 1))
    return float(np.max(np.abs(u.values(N))))


# --- models -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SemiLinear:
    V: FourierFunction

    def __post_init__(self):
        self.V.check_real()

    kind = "linear"


@dataclass(frozen=True)
class SemiCubic:
    sigma: int = 1

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma!r}")

    kind = "cubic"


def in_W(u: FourierFunction, q: int, tol: float = 1e-12) -> bool:
    off = u.modes % q != 0
    scale = max(1.0, float(np.max(np.abs(u.coeffs), initial=0.0)))
    return bool(np.all(np.abs(u.coeffs[off]) <= tol * scale))


# --- flows ------------------------------------------------------------------


def default_out_modes(u: FourierFunction, t: float, W: FourierFunction) -> int:
    M = max(u.max_mode, W.max_mode, 1)
    return 8 * M * (1 + math.ceil(abs(t) * W.sup_bound()))


def potential_phase_apply(
    u: FourierFunction,
    t: float,
    W: FourierFunction,
    out_modes: int | None = None,
    *,
    oversample: int = 4,
    tolerance: float | None = None,
) -> FourierFunction:
    """Fourier coefficients of ``exp(-i t W(x)) u(x)`` up to ``out_modes``.

    Sampled on ``N >= oversample * (out_modes + M * ceil(|t| * sum|W_hat|))``
    points. The returned function's ``residual`` is the L2 mass left beyond
    ``out_modes`` at that resolution.
    """
    W.check_real()
    if out_modes is None:
        out_modes = default_out_modes(u, t, W)
    M = max(u.max_mode, W.max_mode, 1)
    N = _quadrature_size(oversample * (out_modes + M * math.ceil(abs(t) * W.sup_bound())))
    N = max(N, _quadrature_size(2 * max(out_modes, M) + 2))
    vals = np.exp(-1j * t * W.values(N).real) * u.values(N)
    f, res, _ = from_samples(vals, out_modes)
    if tolerance is not None and res > tolerance:
        raise TruncationError(res, tolerance)
    return f


def _free_phase(u: FourierFunction, time) -> FourierFunction:
    ph = free_phases(u.modes, time)
    return FourierFunction(ph * u.coeffs, u.residual, u.residual_h1)


def closed_form_linear(
    u0: FourierFunction,
    V: FourierFunction,
    p: int,
    q: int,
    n: int,
    out_modes: int | None = None,
    *,
    tolerance: float | None = None,
) -> FourierFunction:
    """``u^n`` of the resonant Lie scheme for ``tau = 2*pi*p/q`` and ``V`` in ``W_q``."""
    if not in_W(V, q):
        raise ValueError(f"V has modes not divisible by q={q}; the closed form does not apply")
    step = ResonantStep(p, q)
    t = n * step.tau
    u = potential_phase_apply(u0, t, V, out_modes, tolerance=tolerance)
    return _free_phase(u, step.times(n))


def closed_form_cubic(
    u0: FourierFunction,
    sigma: int,
    step: ResonantStep,
    n: int,
    out_modes: int | None = None,
    *,
    tolerance: float | None = None,
) -> FourierFunction:
    """``u^n = exp(-i sigma n tau |u0|^2) u0`` for ``u0`` in ``W_q``."""
    if not in_W(u0, step.q):
        raise ValueError(f"u0 has modes not divisible by q={step.q}; the closed form does not apply")
    W = modulus_squared(u0).scale(sigma)
    u = potential_phase_apply(u0, n * step.tau, W, out_modes, tolerance=tolerance)
    return _free_phase(u, step.times(n))


# --- energies and growth constants ---------------------------------------


def continuous_energy(u: FourierFunction, model) -> float:
    """``(1/4pi) int |u'|^2 + f|u|^2``; the cubic term is ``(sigma/2)|u|^4``."""
    kinetic = 0.5 * derivative_l2(u) ** 2
    if isinstance(model, SemiLinear):
        w = product(model.V, modulus_squared(u))
        return kinetic + 0.5 * float(w.coefficient(0).real)
    if isinstance(model, SemiCubic):
        return kinetic + model.sigma * 0.25 * _mean_power(u, 4)
    raise TypeError(f"unknown model {model!r}")


def lemma1_margin(u: FourierFunction, V: FourierFunction, t: float, out_modes: int | None = None) -> float:
    """``||e^{itV}u||_{H1} - (|t| ||V'u||_{L2} - ||u||_{H1})``, measured."""
    phased = potential_phase_apply(u, t, V.scale(-1), out_modes)
    rhs = abs(t) * l2_norm(product(V.derivative(), u)) - h1_norm(u)
    return h1_norm(phased) - rhs


def growth_rate(u0: FourierFunction, model) -> float:
    """``c0 = ||W' u0||_{L2}`` with ``W = V`` or ``|u0|^2``."""
    W = model.V if isinstance(model, SemiLinear) else modulus_squared(u0)
    return l2_norm(product(W.derivative(), u0))


@dataclass(frozen=True)
class GrowthConstants:
    """Explicit constants for ``||u^n||_{H1} >= c0*n*tau - c`` and
    ``H(u^n) >= (1/2)(c0*n*tau - c_prime)^2`` (claimed where ``c0*n*tau >= c_prime``).

    Uses ``H(u) >= (1/2)||u||_{H1}^2 - A ||u||_{H1} - D`` with ``A``, ``D``
    depending only on the conserved L2 norm and the model.
    """

    c0: float
    c: float
    c_prime: float
    A: float
    D: float


def growth_constants(u0: FourierFunction, model) -> GrowthConstants:
    L = l2_norm(u0)
    if isinstance(model, SemiLinear):
        A, D = 0.0, 0.5 * (1 + model.V.sup_bound()) * L**2
    elif model.sigma > 0:
        A, D = 0.0, 0.5 * L**2
    else:
        A, D = 0.25 * AGMON_CONSTANT * L**3, 0.5 * L**2
    c = h1_norm(u0)
    s = A + math.sqrt(A**2 + 2 * D)
    return GrowthConstants(c0=growth_rate(u0, model), c=c, c_prime=c + s, A=A, D=D)


def energy_lower_bound(n: int, tau: float, gc: GrowthConstants) -> float | None:
    """``(1/2)(c0 n tau - c')^2`` where claimed, else ``None``."""
    x = gc.c0 * n * tau - gc.c_prime
    if x < 0:
        return None
    return 0.5 * x * x


def gn_ratios(u: FourierFunction) -> tuple[float, float]:
    """``(||u||_4^4 / (||u||_{H1}||u||_2^3), ||u||_inf^2 / (||u||_2 ||u||_{H1}))``.

    Both are at most :data:`AGMON_CONSTANT`.
    """
    L, H = l2_norm(u), h1_norm(u)
    return _mean_power(u, 4) / (H * L**3), linf_norm(u) ** 2 / (L * H)


def gn_sharp_ratios(u: FourierFunction) -> tuple[float, float]:
    """Ratios against ``||u||_inf^2 <= L^2 + 2*pi*L*||u'||`` and its L4 consequence.

    ``L`` is the L2 norm. Both ratios are at most 1, with equality for
    constants.
    """
    L, D = l2_norm(u), derivative_l2(u)
    agmon = L**2 + 2 * math.pi * L * D
    return _mean_power(u, 4) / (L**2 * agmon), linf_norm(u) ** 2 / agmon
