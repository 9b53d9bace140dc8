import numpy as np
import pytest

from kdv5.spectral import Field, Grid, Symbol, integral, sobolev_norm
from kdv5.fields import gaussian_field, soliton_field
from kdv5 import flows as fl
from conftest import small_gaussian, small_random


def test_flow_spec_validation():
    with pytest.raises(ValueError):
        fl.FlowSpec("sixth")
    with pytest.raises(ValueError):
        fl.FlowSpec("hkappa")  # kappa required
    with pytest.raises(ValueError):
        fl.FlowSpec("hkappa", kappa=0.5)
    with pytest.raises(ValueError):
        fl.FlowSpec("fifth", green_route="magic")


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        fl.IntegratorConfig(dt=-1e-3, t_end=1.0)
    with pytest.raises(ValueError):
        fl.IntegratorConfig(dt=1e-3, t_end=1.0, scheme="EULER")


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def test_rhs_zero_everywhere(grid_small):
    z = Field.zero(grid_small)
    for spec in (fl.FlowSpec("fifth"), fl.FlowSpec("kdv"), fl.FlowSpec("translation"),
                 fl.FlowSpec("hkappa", kappa=4.0), fl.FlowSpec("difference", kappa=4.0)):
        assert fl.rhs(z, spec).linf() == 0.0


def test_rhs_fifth_cosine_oracle():
    # q = cos x: q^(5) - 20 q'q'' - 10 q q''' + 30 q^2 q'
    #          = -sin x - 15 sin 2x - 30 cos^2 x sin x
    # N stays small: the fifth derivative amplifies the transform's rounding
    # floor by xi_max^5
    g = Grid(2 * np.pi, 32)
    q = Field.from_function(g, np.cos)
    x = g.x
    expected = -np.sin(x) - 15.0 * np.sin(2 * x) - 30.0 * np.cos(x) ** 2 * np.sin(x)
    out = fl.rhs_fifth(q)
    assert np.max(np.abs(out.values - expected)) < 1e-9


def test_rhs_fifth_two_forms_agree(rng):
    g = Grid(25.0, 192)
    for _ in range(5):
        q = small_random(g, rng, mode_max=g.N // 8)
        a = fl.rhs_fifth(q)
        b = fl.rhs_fifth_classical(q)
        assert (a - b).linf() < 1e-9 * max(a.linf(), 1e-12)


def test_rhs_mean_preservation(rng):
    g = Grid(25.0, 128)
    q = small_random(g, rng)
    for spec in (fl.FlowSpec("fifth"), fl.FlowSpec("kdv"),
                 fl.FlowSpec("hkappa", kappa=4.0), fl.FlowSpec("difference", kappa=4.0)):
        out = fl.rhs(q, spec)
        assert abs(integral(out)) < 1e-13 * max(out.linf(), 1e-12)


def test_rhs_hkappa_linearization_symbol():
    # single mode eps*cos(kx): linearized symbol i xi * 4 k^2 xi^4/(xi^2+4k^2)
    g = Grid(8 * np.pi, 128)
    kappa, mode = 3.0, 5
    xik = mode * g.dxi
    sym = 4 * kappa ** 2 * xik ** 5 / (xik ** 2 + 4 * kappa ** 2)
    rel_errs = []
    for eps in (1e-3, 5e-4, 2.5e-4):
        q = Field.from_function(g, lambda x: eps * np.cos(xik * x))
        out = fl.rhs_hkappa(q, kappa)
        expected = -eps * sym * np.sin(xik * g.x)
        rel_errs.append(np.max(np.abs(out.values - expected)) / (eps * sym))
    # remainder is quadratic: relative error scales linearly in eps
    assert rel_errs[0] / rel_errs[2] == pytest.approx(4.0, rel=0.2)


def test_rhs_difference_symbol_algebra():
    g = Grid(20.0, 64)
    for kappa in (2.0, 16.0):
        lam5 = fl.linear_symbol(fl.FlowSpec("fifth")).on(g)
        lamk = fl.linear_symbol(fl.FlowSpec("hkappa", kappa=kappa)).on(g)
        lamd = fl.linear_symbol(fl.FlowSpec("difference", kappa=kappa)).on(g)
        xi = g.xi
        assert np.max(np.abs(lam5 - lamk - lamd)) < 1e-12 * np.max(np.abs(lam5) + 1e-30)
        assert np.allclose(lamd, 1j * xi ** 7 / (xi ** 2 + 4 * kappa ** 2))


def test_rhs_difference_decays_in_kappa(rng):
    # frequency window must contain the resolvent scale: xi_max = 64 >= 2*kappa
    g = Grid(25.0, 512)
    q = small_gaussian(g, 0.05)
    norms = [sobolev_norm(fl.rhs_difference(q, k), -1.0, 1.0) for k in (4.0, 8.0, 16.0, 32.0)]
    assert all(b < a for a, b in zip(norms, norms[1:]))


# ---------------------------------------------------------------------------
# integrator
# ---------------------------------------------------------------------------

def test_translation_flow_exact():
    g = Grid(2 * np.pi, 64)
    q0 = Field.from_function(g, lambda x: np.cos(x) + 0.3 * np.sin(2 * x))
    cfg = fl.IntegratorConfig(dt=0.01, t_end=0.5, snapshot_stride=50)
    rec = fl.integrate(q0, fl.FlowSpec("translation"), cfg)
    expected = np.cos(g.x + 0.5) + 0.3 * np.sin(2 * (g.x + 0.5))
    assert np.max(np.abs(rec.final.values - expected)) < 1e-10


def test_kdv_soliton_speed():
    g = Grid(50.0, 512)
    k0 = 0.7
    q0 = soliton_field(g, k0)
    # substitution oracle: rhs(q0) = -c q0' fixes the speed before the run
    r = fl.rhs_kdv(q0)
    qp = q0.derivative(1)
    c_sub = -np.dot(r.values, qp.values) / np.dot(qp.values, qp.values)
    assert c_sub == pytest.approx(4 * k0 ** 2, rel=1e-10)
    cfg = fl.IntegratorConfig(dt=2e-3, t_end=1.0, snapshot_stride=100)
    rec = fl.integrate(q0, fl.FlowSpec("kdv"), cfg)
    # cross-correlation peak with sub-lattice quadratic refinement
    corr = np.array([np.dot(rec.final.values, np.roll(q0.values, j)) for j in range(g.N)])
    jm = int(np.argmax(corr))
    ym, y0, yp = corr[(jm - 1) % g.N], corr[jm], corr[(jm + 1) % g.N]
    shift = (jm + 0.5 * (ym - yp) / (ym - 2 * y0 + yp)) * g.dx
    if shift > g.L / 2:
        shift -= g.L
    assert shift / 1.0 == pytest.approx(c_sub, rel=1e-3)
    # profile translates rigidly
    rigid = soliton_field(g, k0, center=c_sub * 1.0)
    assert (rec.final - rigid).linf() < 1e-6 * 2 * k0 ** 2


def test_time_reversibility():
    g = Grid(25.0, 128)
    q0 = small_gaussian(g, 0.05)
    cfg_f = fl.IntegratorConfig(dt=1e-3, t_end=0.02)
    rec_f = fl.integrate(q0, fl.FlowSpec("fifth"), cfg_f)
    cfg_b = fl.IntegratorConfig(dt=1e-3, t_end=-0.02)
    rec_b = fl.integrate(rec_f.final, fl.FlowSpec("fifth"), cfg_b)
    assert (rec_b.final - q0).linf() < 1e-8


def test_step_halving_fourth_order():
    g = Grid(25.0, 128)
    q0 = small_gaussian(g, 0.08)
    finals = []
    for dt in (5e-4, 2.5e-4, 1.25e-4, 6.25e-5):
        cfg = fl.IntegratorConfig(dt=dt, t_end=0.02, snapshot_stride=10 ** 9)
        finals.append(fl.integrate(q0, fl.FlowSpec("fifth"), cfg).final)
    e1 = (finals[0] - finals[-1]).linf()
    e2 = (finals[1] - finals[-1]).linf()
    e3 = (finals[2] - finals[-1]).linf()
    # approx 16x per halving (Richardson bias of the half-step reference
    # pushes the last ratio toward 17); 2nd order would give 4x
    assert 11.0 < e1 / e2 < 26.0
    assert 11.0 < e2 / e3 < 26.0


def test_commuting_flows_small_scale():
    g = Grid(25.0, 128)
    q0 = small_gaussian(g, 0.04)
    kappa, s, t = 4.0, 0.01, 0.01
    cfg_k = fl.IntegratorConfig(dt=5e-4, t_end=s)
    cfg_5 = fl.IntegratorConfig(dt=5e-4, t_end=t)
    hk = fl.FlowSpec("hkappa", kappa=kappa)
    fifth = fl.FlowSpec("fifth")
    a = fl.integrate(fl.integrate(q0, fifth, cfg_5).final, hk, cfg_k).final
    b = fl.integrate(fl.integrate(q0, hk, cfg_k).final, fifth, cfg_5).final
    assert sobolev_norm(a - b, -1.0, 1.0) < 1e-9


def test_snapshot_and_conserved_sampling():
    g = Grid(25.0, 128)
    q0 = small_gaussian(g, 0.05)
    cfg = fl.IntegratorConfig(dt=1e-3, t_end=0.01, snapshot_stride=2,
                              conserved_sample_stride=5, conserved_kappas=(2.0,))
    rec = fl.integrate(q0, fl.FlowSpec("fifth"), cfg)
    assert [round(t, 6) for t in rec.times] == [0.0, 0.002, 0.004, 0.006, 0.008, 0.01]
    assert [round(c.t, 6) for c in rec.conserved] == [0.0, 0.005, 0.01]
    assert rec.conserved[0].alpha_samples[0][0] == 2.0


def test_stability_guard_refuses():
    g = Grid(50.0, 512)
    q0 = small_gaussian(g, 0.05)
    cfg = fl.IntegratorConfig(dt=5e-3, t_end=0.05)
    with pytest.raises(fl.StabilityError):
        fl.integrate(q0, fl.FlowSpec("fifth"), cfg)


def test_numerical_abort_carries_partial_record():
    # a symbol with positive real part grows until overflow
    g = Grid(2 * np.pi, 64)
    q0 = Field.from_function(g, lambda x: 0.1 * np.cos(x))
    blowup = Symbol(lambda xi: 400.0 + 0.0j * xi)
    cfg = fl.IntegratorConfig(dt=0.5, t_end=500.0, snapshot_stride=1,
                              linear_symbol_override=blowup)
    with pytest.raises(fl.NumericalAbortError) as err:
        fl.integrate(q0, fl.FlowSpec("translation"), cfg)
    assert len(err.value.record.snapshots) >= 1


def test_t_end_must_be_multiple_of_dt():
    g = Grid(25.0, 128)
    q0 = small_gaussian(g, 0.05)
    with pytest.raises(ValueError):
        fl.integrate(q0, fl.FlowSpec("fifth"), fl.IntegratorConfig(dt=3e-3, t_end=0.01))


def test_conservation_drift_short_run():
    g = Grid(25.0, 256)
    q0 = small_gaussian(g, 0.05)
    cfg = fl.IntegratorConfig(dt=2.5e-4, t_end=0.02, snapshot_stride=80,
                              conserved_sample_stride=40, conserved_kappas=(2.0, 4.0))
    rec = fl.integrate(q0, fl.FlowSpec("fifth"), cfg)
    base = rec.conserved[0].as_dict()
    for rep in rec.conserved[1:]:
        for name, val in rep.as_dict().items():
            ref = abs(base[name]) if abs(base[name]) > 1e-12 else 1.0
            assert abs(val - base[name]) / ref < 1e-7, name
