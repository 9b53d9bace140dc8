import numpy as np
import pytest

from kdv5.spectral import Field, Grid, inner, integral
from kdv5 import hamiltonians as ham
from kdv5.flows import rhs_fifth
from conftest import small_random


def test_all_zero(grid_small):
    rep = ham.conserved_report(Field.zero(grid_small), (2.0, 4.0))
    assert rep.M == 0.0 and rep.P == 0.0 and rep.H_KdV == 0.0 and rep.H_5th == 0.0
    assert all(a == 0.0 for _, a in rep.alpha_samples)


def test_cosine_frozen_values():
    # q = cos(x) on [-pi, pi): M = 0, P = pi/2, H_KdV = pi/2,
    # H_5th = pi/2 + 0 + (5/2)(3 pi/4)
    g = Grid(2 * np.pi, 128)
    q = Field.from_function(g, np.cos)
    rep = ham.conserved_report(q)
    assert abs(rep.M) < 1e-13
    assert rep.P == pytest.approx(np.pi / 2, rel=1e-12)
    assert rep.H_KdV == pytest.approx(np.pi / 2, rel=1e-12)
    assert rep.H_5th == pytest.approx(np.pi / 2 + 15 * np.pi / 8, rel=1e-12)


def test_translation_invariance(rng):
    g = Grid(20.0, 128)
    q = small_random(g, rng)
    r0 = ham.conserved_report(q, (2.0,))
    r1 = ham.conserved_report(q.shift_nodes(17), (2.0,))
    for name in ("M", "P", "H_KdV", "H_5th"):
        assert getattr(r1, name) == pytest.approx(getattr(r0, name), rel=1e-11, abs=1e-14)
    assert r1.alpha_samples[0][1] == pytest.approx(r0.alpha_samples[0][1], rel=1e-11)


def test_report_validates_kappas():
    with pytest.raises(ValueError):
        ham.ConservedReport(0, 0, 0, 0, alpha_samples=[(0.5, 0.0)])
    with pytest.raises(ValueError):
        ham.ConservedReport(0, 0, 0, 0, alpha_samples=[(2.0, 0.0), (2.0, 0.1)])


def test_h_kappa_zero(grid_small):
    assert ham.h_kappa_value(Field.zero(grid_small), 4.0) == 0.0


def test_h_kappa_approaches_fifth_energy(rng):
    g = Grid(25.0, 256)
    q = small_random(g, rng, target=0.03)
    h5 = ham.energy_fifth(q)
    errs = [abs(ham.h_kappa_value(q, k) - h5) for k in (4.0, 8.0, 16.0)]
    assert errs[1] < errs[0] and errs[2] < errs[1]
    assert errs[2] < 0.05 * abs(h5)


def test_scaling_laws():
    # q_lambda(x) = lambda^2 q(lambda x) on the lambda-shrunk grid resamples
    # exactly on the lattice; P scales by lambda^3, H_5th by lambda^7
    lam = 2.0
    g = Grid(20.0, 128)
    gl = Grid(20.0 / lam, 128)
    prof = lambda x: 0.3 * np.exp(-(x ** 2) / 2.0)
    q = Field.from_function(g, prof)
    ql = Field.from_function(gl, lambda x: lam ** 2 * prof(lam * x))
    assert ham.momentum(ql) == pytest.approx(lam ** 3 * ham.momentum(q), rel=1e-8)
    assert ham.energy_fifth(ql) == pytest.approx(lam ** 7 * ham.energy_fifth(q), rel=1e-8)


def test_gradients_zero(grid_small):
    z = Field.zero(grid_small)
    for grad in (ham.grad_P, ham.grad_HKdV, ham.grad_H5th):
        assert grad(z).linf() == 0.0


@pytest.mark.parametrize("functional,grad", [
    (ham.momentum, ham.grad_P),
    (ham.energy_kdv, ham.grad_HKdV),
    (ham.energy_fifth, ham.grad_H5th),
])
def test_gradient_directional_derivative(functional, grad, rng):
    # (H(q + eps v) - H(q - eps v)) / (2 eps) = <grad H, v> + O(eps^2)
    g = Grid(20.0, 128)
    checked = 0
    for _ in range(20):
        q = small_random(g, rng, mode_max=g.N // 8)
        v = small_random(g, rng, mode_max=g.N // 8)
        ref = inner(grad(q), v)
        errs = []
        for eps in (1e-3, 5e-4, 2.5e-4):
            fd = (functional(q + v * eps) - functional(q - v * eps)) / (2 * eps)
            errs.append(abs(fd - ref))
        if errs[0] < 1e-12 * max(abs(ref), 1.0):
            checked += 1  # quadratic functional: centered difference is exact
            continue
        assert errs[0] > errs[1] > errs[2]
        order = np.log2(errs[0] / errs[2]) / 2.0
        assert order == pytest.approx(2.0, abs=0.35)
        checked += 1
    assert checked >= 15


def test_gradient_fifth_reproduces_flow(rng):
    g = Grid(20.0, 192)
    for _ in range(5):
        q = small_random(g, rng, mode_max=g.N // 8)
        lhs = ham.grad_H5th(q).derivative(1)
        rhs = rhs_fifth(q)
        assert (lhs - rhs).linf() < 1e-10 * max(rhs.linf(), 1e-10)


def test_poisson_antisymmetry(rng):
    # <f, g'> = -<g, f'> exactly on the torus (spectral integration by parts)
    g = Grid(20.0, 128)
    for _ in range(5):
        f = small_random(g, rng, mode_max=g.N // 8)
        h = small_random(g, rng, mode_max=g.N // 8)
        a = inner(f, h.derivative(1))
        b = inner(h, f.derivative(1))
        scale = np.sqrt(np.sum(f.values ** 2) * np.sum(h.derivative(1).values ** 2)) * g.dx
        assert abs(a + b) < 1e-10 * max(scale, 1e-30)


def test_hierarchy_brackets_vanish(rng):
    # {F, G} = <grad F, d/dx grad G> = 0 for every pair in the commuting family
    g = Grid(20.0, 128)
    q = small_random(g, rng, mode_max=g.N // 8)
    grads = [ham.grad_P(q), ham.grad_HKdV(q), ham.grad_H5th(q)]
    for gf in grads:
        for gg in grads:
            bracket = inner(gf, gg.derivative(1))
            scale = np.sqrt(np.sum(gf.values ** 2)
                            * np.sum(gg.derivative(1).values ** 2)) * g.dx
            assert abs(bracket) < 1e-10 * max(scale, 1e-30)
