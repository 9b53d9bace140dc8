"""Standard initial data and seeded random test fields."""

from __future__ import annotations

import numpy as np

from .spectral import Field, Grid, sobolev_norm


def gaussian_field(grid: Grid, amplitude: float, width: float, center: float = 0.0) -> Field:
    return Field(grid, amplitude * np.exp(-((grid.x - center) ** 2) / (2.0 * width ** 2)))


def cosine_field(grid: Grid, amplitude: float, wavelength: float, center: float = 0.0) -> Field:
    """Cosine with the wavelength snapped to the nearest lattice-commensurate mode."""
    mode = max(1, int(round(grid.L / wavelength)))
    return Field(grid, amplitude * np.cos(2.0 * np.pi * mode * (grid.x - center) / grid.L))


def soliton_field(grid: Grid, kappa0: float, center: float = 0.0) -> Field:
    """Traveling-wave profile -2*kappa0^2 * sech^2(kappa0*(x - center)).

    Rigid translation at speed 4*kappa0^2 under the KdV flow q_t = -q''' + 6qq'.
    """
    return Field(grid, -2.0 * kappa0 ** 2 / np.cosh(kappa0 * (grid.x - center)) ** 2)


def random_field(
    grid: Grid,
    rng: np.random.Generator,
    target_hm1: float,
    mode_max: int | None = None,
) -> Field:
    """Band-limited random field scaled to a target H^{-1} norm.

    Spectral content is confined to modes <= N/4 (or ``mode_max``), which keeps
    quadratic grid products alias-safe and the resolvent series well inside its
    convergence region for small targets.
    """
    if mode_max is None:
        mode_max = grid.N // 4
    mode_max = min(mode_max, grid.N // 2 - 1)
    coeffs = np.zeros(grid.N, dtype=complex)
    idx0 = grid.N // 2  # position of k = 0 in math order
    for k in range(1, mode_max + 1):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        z *= np.exp(-(k * grid.dxi) ** 2 / 8.0)
        coeffs[idx0 + k] = z
        coeffs[idx0 - k] = np.conj(z)
    coeffs[idx0] = rng.standard_normal() * 0.3
    f = Field.from_hat(grid, coeffs)
    norm = sobolev_norm(f, -1.0, 1.0)
    if norm == 0.0:
        return f
    return f * (target_hm1 / norm)
