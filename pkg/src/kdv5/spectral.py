"""Periodic spectral substrate: grid, transforms, Fourier multipliers, norms.

The line is modelled by a torus of large period L sampled at N equispaced
nodes.  Discrete Fourier coefficients follow the symmetric (1/sqrt(2pi))
convention scaled by the node spacing, so that continuum multiplier and
norm formulas transcribe verbatim and Parseval holds in the form

    sum_k |fhat(xi_k)|^2 * (2pi/L)  ==  sum_j |f(x_j)|^2 * dx.

Coefficients are stored in "math order" xi_k = 2*pi*k/L with
k = -N/2, ..., N/2-1; the single asymmetric point k = -N/2 is the Nyquist
mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

_SQRT2PI = np.sqrt(2.0 * np.pi)


class GridMismatchError(ValueError):
    """Raised when an operation mixes fields living on different grids."""


class NonHermitianSymbolError(ValueError):
    """Raised when a real output is requested from a non-Hermitian symbol."""


class Grid:
    """Uniform periodic grid: period L, N nodes at x_j = -L/2 + j*L/N.

    N must be even and at least 8.  The frequency lattice is symmetric
    about zero except for the Nyquist mode at xi = -pi*N/L.
    """

    def __init__(self, L: float, N: int):
        if not (L > 0):
            raise ValueError(f"period L must be positive, got {L}")
        if N % 2 != 0 or N < 8:
            raise ValueError(f"N must be even and >= 8, got {N}")
        self.L = float(L)
        self.N = int(N)
        self.dx = self.L / self.N
        self.dxi = 2.0 * np.pi / self.L
        self.modes = np.arange(-N // 2, N // 2)
        self.x = -self.L / 2 + self.dx * np.arange(N)
        self.xi = self.dxi * self.modes
        # phase (-1)^k accounts for the node offset x_0 = -L/2
        self._phase = np.where(self.modes % 2 == 0, 1.0, -1.0)
        self.nyquist_index = 0  # math-order position of k = -N/2
        kcut = N // 3
        self.dealias_mask = np.abs(self.modes) <= kcut
        self.dealias_mask[self.nyquist_index] = False
        for arr in (self.modes, self.x, self.xi, self._phase, self.dealias_mask):
            arr.setflags(write=False)
        self._dft_matrix = None

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and self.L == other.L and self.N == other.N

    def __hash__(self):
        return hash((self.L, self.N))

    def __repr__(self):
        return f"Grid(L={self.L}, N={self.N})"

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Samples -> math-order coefficients approximating the line transform."""
        coeffs = np.fft.fftshift(np.fft.fft(values))
        return (self.dx / _SQRT2PI) * self._phase * coeffs

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        """Math-order coefficients -> complex samples (exact inverse of forward)."""
        f = np.fft.ifftshift(coeffs * self._phase) * (_SQRT2PI / self.dx)
        return np.fft.ifft(f)

    def dft_unitary(self) -> np.ndarray:
        """Unitary map from orthonormal physical to orthonormal spectral coords.

        U[k, j] = (-1)^k * exp(-2pi*i*k*j/N) / sqrt(N) with k in math order.
        Cached; used by the dense operator machinery.
        """
        if self._dft_matrix is None:
            k = self.modes[:, None]
            j = np.arange(self.N)[None, :]
            U = np.exp(-2j * np.pi * k * j / self.N) / np.sqrt(self.N)
            U *= self._phase[:, None]
            U.setflags(write=False)
            self._dft_matrix = U
        return self._dft_matrix


class Field:
    """Real-valued sampled function on a Grid with a cached spectral transform."""

    __slots__ = ("grid", "values", "_hat")

    def __init__(self, grid: Grid, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.N,):
            raise ValueError(f"expected {grid.N} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field samples must be finite")
        self.grid = grid
        self.values = values
        self._hat = None

    @classmethod
    def zero(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.N))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(grid, fn(grid.x))

    @classmethod
    def from_hat(cls, grid: Grid, coeffs: np.ndarray, tol: float = 1e-10) -> "Field":
        values = grid.inverse(coeffs)
        scale = np.max(np.abs(values)) + 1e-300
        if np.max(np.abs(values.imag)) > tol * max(scale, 1.0):
            raise ValueError("coefficients do not describe a real field")
        return cls(grid, values.real)

    @property
    def hat(self) -> np.ndarray:
        if self._hat is None:
            h = self.grid.forward(self.values)
            h.setflags(write=False)
            self._hat = h
        return self._hat

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def _check_grid(self, other: "Field"):
        if self.grid != other.grid:
            raise GridMismatchError(f"{self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check_grid(other)
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check_grid(other)
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __rsub__(self, other):
        return Field(self.grid, other - self.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check_grid(other)
            return Field(self.grid, self.values * other.values)
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Field):
            self._check_grid(other)
            return Field(self.grid, self.values / other.values)
        return Field(self.grid, self.values / other)

    def __neg__(self):
        return Field(self.grid, -self.values)

    def derivative(self, order: int = 1) -> "Field":
        return apply_multiplier(derivative_symbol(order), self)

    def shift_nodes(self, j: int) -> "Field":
        """Translate by j lattice spacings: output(x) = input(x - j*dx)."""
        return Field(self.grid, np.roll(self.values, j))

    def linf(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class Symbol:
    """Fourier multiplier xi -> m(xi).

    ``hermitian`` declares m(-xi) == conj(m(xi)), the condition for the
    operator to map real fields to real fields.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    hermitian: bool = True

    def on(self, grid: Grid) -> np.ndarray:
        return np.asarray(self.fn(grid.xi), dtype=complex)

    def __mul__(self, other: "Symbol") -> "Symbol":
        return Symbol(lambda xi: self.fn(xi) * other.fn(xi),
                      hermitian=self.hermitian and other.hermitian)


def derivative_symbol(order: int) -> Symbol:
    return Symbol(lambda xi: (1j * xi) ** order)


def resolvent_symbol(kappa: float) -> Symbol:
    """Multiplier of (-d^2/dx^2 + kappa^2)^{-1}."""
    return Symbol(lambda xi: 1.0 / (xi ** 2 + kappa ** 2))


def identity_symbol() -> Symbol:
    return Symbol(lambda xi: np.ones_like(xi, dtype=float))


def apply_multiplier(symbol: Symbol, f: Field, require_real: bool = True) -> Union[Field, np.ndarray]:
    """Apply a Fourier multiplier to a field.

    With ``require_real`` the symbol must be declared Hermitian; the Nyquist
    coefficient is multiplied by Re(m) there, which zeroes the asymmetric
    mode under odd symbols (e.g. derivatives) and leaves even ones intact.
    If ``require_real`` is False the complex samples are returned.
    """
    m = symbol.on(f.grid)
    if require_real:
        if not symbol.hermitian:
            raise NonHermitianSymbolError(
                "real output requested from a symbol not declared Hermitian")
        m = m.copy()
        ny = f.grid.nyquist_index
        m[ny] = m[ny].real
        out = f.grid.inverse(m * f.hat)
        return Field(f.grid, out.real)
    return f.grid.inverse(m * f.hat)


def sobolev_norm(f: Field, s: float, kappa: float = 1.0) -> float:
    """Norm with weight (xi^2 + 4*kappa^2)^s on the squared coefficients.

    s = 0 reproduces the quadrature L^2 norm (Parseval); kappa defaults to 1,
    which is the plain H^s scale used for unadorned Sobolev norms.
    """
    if kappa < 1.0:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    w = (f.grid.xi ** 2 + 4.0 * kappa ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.hat) ** 2) * f.grid.dxi))


def integral(f: Field) -> float:
    """Quadrature of f over the period (trapezoid; spectrally accurate)."""
    return float(np.sum(f.values) * f.grid.dx)


def inner(f: Field, g: Field) -> float:
    """Quadrature L^2 pairing of two real fields."""
    if f.grid != g.grid:
        raise GridMismatchError(f"{f.grid} vs {g.grid}")
    return float(np.sum(f.values * g.values) * f.grid.dx)


def truncate_to_dealias_band(f: Field) -> Field:
    hat = f.hat.copy()
    hat[~f.grid.dealias_mask] = 0.0
    return Field.from_hat(f.grid, hat, tol=1e-8)


def dealiased_product(f: Field, g: Field) -> Field:
    """Pointwise product with 2/3-rule truncation.

    Both inputs are truncated to |k| <= N/3, multiplied on the grid, and the
    result re-truncated, so the retained band is alias-free.  For inputs with
    combined bandwidth inside the retained band the product is exact.
    """
    if f.grid != g.grid:
        raise GridMismatchError(f"{f.grid} vs {g.grid}")
    ft = truncate_to_dealias_band(f)
    gt = truncate_to_dealias_band(g) if g is not f else ft
    return truncate_to_dealias_band(Field(f.grid, ft.values * gt.values))


def dealiased_cube(f: Field) -> Field:
    """Dealiased f^3 via two pairwise passes of the 2/3 rule."""
    return dealiased_product(dealiased_product(f, f), f)
