"""Tour of the spectral substrate.

The line is modelled by a periodic grid of large period L.  Everything
downstream (Green's functions, flows, diagnostics) reduces to three
primitives shown here: the discrete transform with line normalization,
Fourier multipliers, and weighted Sobolev norms.
"""

import numpy as np

from kdv5 import (
    Field, Grid, apply_multiplier, dealiased_product, derivative_symbol,
    integral, resolvent_symbol, sobolev_norm,
)

grid = Grid(L=2 * np.pi, N=128)
print(f"grid: {grid}, dx = {grid.dx:.4f}, frequency spacing {grid.dxi:.4f}")

# A single Fourier mode transforms to two lattice coefficients.
q = Field.from_function(grid, lambda x: np.cos(3 * x))
nonzero = np.abs(q.hat) > 1e-12
print("cos(3x) occupies modes:", grid.modes[nonzero])
print("coefficient value:", q.hat[nonzero][0].real, " (pi/sqrt(2 pi) =",
      np.pi / np.sqrt(2 * np.pi), ")")

# Multipliers act coefficient-wise.  The resolvent of -d^2/dx^2 + 1 divides
# the mode xi = 3 by 3^2 + 1 = 10.
resolvent = apply_multiplier(resolvent_symbol(1.0), q)
print("\nresolvent applied to cos(3x): max |out - cos(3x)/10| =",
      np.max(np.abs(resolvent.values - np.cos(3 * grid.x) / 10)))

# Derivatives are multipliers too.
velocity = apply_multiplier(derivative_symbol(1), Field.from_function(grid, np.sin))
print("derivative of sin: max |out - cos| =",
      np.max(np.abs(velocity.values - np.cos(grid.x))))

# The kappa-weighted Sobolev scale: weight (xi^2 + 4 kappa^2)^s.
print("\n||cos 3x||_{H^-1, kappa=1} =", sobolev_norm(q, -1.0, 1.0),
      " (exact sqrt(pi/13) =", np.sqrt(np.pi / 13), ")")
print("||cos 3x||_{L^2} =", sobolev_norm(q, 0.0, 1.0),
      " (exact sqrt(pi) =", np.sqrt(np.pi), ")")

# Pointwise products are dealiased with the 2/3 rule before they feed
# nonlinear flow terms.
product = dealiased_product(q, q)
print("\ncos^2(3x) via dealiased product: integral =", integral(product),
      " (exact pi =", np.pi, ")")
