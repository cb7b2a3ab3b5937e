"""Periodic grids, the centred discrete Fourier transform, and state containers.

Indices always run over the centred set ``B^K = {-K/2, ..., K/2 - 1}``. Arrays
are stored in that order, so ``values[m]`` holds index ``m - K/2``. The FFT
reordering needed to use numpy's transform stays inside this module.

    forward:  U_hat[j] = (1/K) * sum_k exp(-2i*pi*j*k/K) * U[k]
    inverse:  U[k]     =         sum_j exp(+2i*pi*k*j/K) * U_hat[j]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-pi, pi) with an even number ``K`` of points."""

    K: int

    def __post_init__(self):
        if not isinstance(self.K, (int, np.integer)) or isinstance(self.K, bool):
            raise TypeError(f"K must be an integer, got {self.K!r}")
        if self.K % 2:
            raise ValueError(f"K must be even, got K={self.K}")
        if self.K < 4:
            raise ValueError(f"K must be at least 4, got K={self.K}")

    @property
    def delta_x(self) -> float:
        return 2 * np.pi / self.K

    @property
    def indices(self) -> np.ndarray:
        """The centred index set B^K as an integer array."""
        return np.arange(-self.K // 2, self.K // 2)

    @property
    def points(self) -> np.ndarray:
        return 2 * np.pi * self.indices / self.K

    def contains_mode(self, m: int) -> bool:
        return -self.K // 2 <= m < self.K // 2

    def slot(self, j: int) -> int:
        """Storage position of centred index ``j``."""
        if not self.contains_mode(j):
            raise IndexError(f"index {j} outside B^K for K={self.K}")
        return j + self.K // 2


def make_grid(K: int) -> Grid:
    return Grid(int(K) if isinstance(K, np.integer) else K)


@dataclass(frozen=True, eq=False)
class PhysicalState:
    """Grid values ``U_k`` for ``k`` in B^K (read-only)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (self.grid.K,):
            raise ValueError(f"expected {self.grid.K} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    def __getitem__(self, j: int) -> complex:
        return self.values[self.grid.slot(j)]


@dataclass(frozen=True, eq=False)
class SpectralState:
    """Discrete Fourier coefficients ``U_hat_j`` for ``j`` in B^K (read-only)."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != (self.grid.K,):
            raise ValueError(f"expected {self.grid.K} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, j: int) -> complex:
        return self.coeffs[self.grid.slot(j)]

    @classmethod
    def from_modes(cls, grid: Grid, modes: Mapping[int, complex]) -> "SpectralState":
        c = np.zeros(grid.K, dtype=complex)
        for j, a in modes.items():
            c[grid.slot(int(j))] = a
        return cls(grid, c)


def forward_dft(U: PhysicalState) -> SpectralState:
    K = U.grid.K
    c = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(U.values))) / K
    return SpectralState(U.grid, c)


def inverse_dft(U_hat: SpectralState) -> PhysicalState:
    K = U_hat.grid.K
    v = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(U_hat.coeffs))) * K
    return PhysicalState(U_hat.grid, v)


def dft_matrix(grid: Grid) -> np.ndarray:
    """Dense matrix of the forward transform, rows j and columns k over B^K."""
    idx = grid.indices
    return np.exp(-2j * np.pi * np.outer(idx, idx) / grid.K) / grid.K


def naive_forward_dft(U: PhysicalState) -> SpectralState:
    """O(K^2) direct summation; kept as an oracle for :func:`forward_dft`."""
    return SpectralState(U.grid, dft_matrix(U.grid) @ U.values)


def naive_inverse_dft(U_hat: SpectralState) -> PhysicalState:
    idx = U_hat.grid.indices
    M = np.exp(2j * np.pi * np.outer(idx, idx) / U_hat.grid.K)
    return PhysicalState(U_hat.grid, M @ U_hat.coeffs)


def exponential_sum(grid: Grid, m: int) -> complex:
    """``sum_{k in B^K} exp(i * delta_x * k * m)``; equals K if K | m, else 0."""
    return complex(np.sum(np.exp(1j * grid.delta_x * grid.indices * m)))


# --- sampling closed-form functions ------------------------------------------


class AliasingError(ValueError):
    """A requested Fourier mode does not fit on the grid."""


@dataclass(frozen=True)
class FourierSeries:
    """Finite Fourier series ``sum_m c_m exp(i m x)``."""

    coeffs: Mapping[int, complex]

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {int(m): complex(c) for m, c in self.coeffs.items()}
        )

    @property
    def modes(self) -> list[int]:
        return sorted(self.coeffs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for m, c in self.coeffs.items():
            out += c * np.exp(1j * m * x)
        return out

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        merged = dict(self.coeffs)
        for m, c in other.coeffs.items():
            merged[m] = merged.get(m, 0) + c
        return FourierSeries(merged)


def constant(c: complex = 1.0) -> FourierSeries:
    return FourierSeries({0: c})


def plane_wave(m: int, amplitude: complex = 1.0) -> FourierSeries:
    return FourierSeries({m: amplitude})


def cosine(m: int, amplitude: float = 1.0) -> FourierSeries:
    if m == 0:
        return constant(amplitude)
    return FourierSeries({m: amplitude / 2, -m: amplitude / 2})


def sine(m: int, amplitude: float = 1.0) -> FourierSeries:
    if m == 0:
        return FourierSeries({})
    return FourierSeries({m: amplitude / 2j, -m: -amplitude / 2j})


def plane_wave_mixture(waves: Mapping[int, complex]) -> FourierSeries:
    return FourierSeries(waves)


FunctionSpec = Union[FourierSeries, np.ndarray]


def sample_function(
    spec: FunctionSpec, grid: Grid, *, allow_alias: bool = False
) -> PhysicalState:
    """Evaluate ``spec`` at the grid points.

    A :class:`FourierSeries` must only use modes inside B^K unless
    ``allow_alias`` is set; otherwise its discrete Fourier coefficients would
    not match the stated ones. An array is taken as the grid values verbatim.
    """
    if isinstance(spec, FourierSeries):
        bad = [m for m in spec.modes if not grid.contains_mode(m)]
        if bad and not allow_alias:
            raise AliasingError(
                f"modes {bad} fall outside B^K = [{-grid.K // 2}, {grid.K // 2 - 1}] "
                f"for K={grid.K}; pass allow_alias=True to sample anyway"
            )
        return PhysicalState(grid, spec(grid.points))
    return PhysicalState(grid, np.asarray(spec))
