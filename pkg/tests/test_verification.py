"""Manufactured-solution source correctness (against hand derivatives and
finite differences), the order estimator, and small-scale sweep behavior
including failure recording and the exact-zero delta member."""

import numpy as np
import pytest
import sympy as sp

from mhd2d.config import Config
from mhd2d.core import InitialDataSpec, SimulationParams, build_grid, validate_params
from mhd2d.errors import DegenerateInput, ValidationError
from mhd2d.solver import run
from mhd2d.verification import (
    ManufacturedSolution,
    default_manufactured_solution,
    delta_sweep,
    epsilon_sweep,
    mms_sources,
    richardson_order,
    run_mms,
)

X, Y, T = sp.symbols("x y t", real=True)


def params(**kw):
    return validate_params(SimulationParams(**kw))


def small_sweep_config(**kw):
    kw.setdefault("nx", 12)
    kw.setdefault("ny", 12)
    kw.setdefault("t_final", 0.05)
    p = params(**kw)
    spec = InitialDataSpec(
        kind="ratio-profile", rho_amp=0.1, kx=1, ky=1,
        ratio_mid=1.0, ratio_amp=0.25, jx=1, jy=0,
    )
    return Config(params=p, init=spec)


# ------------------------------------------------------------------
# manufactured sources
# ------------------------------------------------------------------

def test_constant_manufactured_state_has_zero_sources():
    ms = ManufacturedSolution(rho=1.0, b=2.0, ux=0.0, uy=0.0)
    p = params(eps=1e-2, delta=1e-2)
    src = mms_sources(ms, p)
    g = build_grid(p)
    s = src(g, 0.3)
    for f in s:
        assert np.all(f == 0.0)


def test_mass_source_hand_derivative():
    # eps = 0, u = 0, rho* = 1 + 0.1 cos(pi x/Lx) e^-t: S_rho = d_t rho*
    p = params(eps=0.0, delta=0.0)
    ms = ManufacturedSolution(
        rho=1 + sp.Rational(1, 10) * sp.cos(sp.pi * X / p.Lx) * sp.exp(-T),
        b=1.0, ux=0.0, uy=0.0,
    )
    src = mms_sources(ms, p)
    g = build_grid(p)
    t = 0.7
    Xc, _ = g.center_mesh()
    expected = -0.1 * np.cos(np.pi * Xc / g.Lx) * np.exp(-t)
    got = src(g, t).rho
    assert np.abs(got - expected).max() < 1e-12


def test_momentum_source_delta_term_finite_difference():
    # the artificial-pressure contribution to S_u is delta*d/dx (rho*+b*)^Gamma;
    # verify the symbolic formula against a central finite difference
    base = dict(a=1.0, gamma=1.4, mu=0.1, lam=0.0, eps=1e-2)
    p_on = params(delta=0.05, Gamma=6.0, **base)
    p_off = params(delta=0.0, Gamma=6.0, **base)
    ms = default_manufactured_solution(p_on.Lx, p_on.Ly)
    g = build_grid(p_on)
    t = 0.4
    s_on = mms_sources(ms, p_on)(g, t)
    s_off = mms_sources(ms, p_off)(g, t)
    delta_term = s_on.ux - s_off.ux

    rho_f = sp.lambdify((X, Y, T), ms.exprs["rho"], "numpy")
    b_f = sp.lambdify((X, Y, T), ms.exprs["b"], "numpy")
    XF, YF = g.xface_mesh()
    h = 1e-5

    def art_pressure(xx):
        s = rho_f(xx, YF, t) + b_f(xx, YF, t)
        return p_on.delta * s ** p_on.Gamma

    fd = (art_pressure(XF + h) - art_pressure(XF - h)) / (2 * h)
    fd[0, :] = 0.0
    fd[-1, :] = 0.0  # source fields are pinned on boundary-normal faces
    assert np.abs(delta_term - fd).max() < 1e-6


def test_sampled_fields_satisfy_boundary_conditions():
    ms = default_manufactured_solution(1.0, 1.0)
    p = params(nx=16, ny=16)
    g = build_grid(p)
    st = ms.sample(g, 0.2)
    assert np.all(st.ux[0, :] == 0.0) and np.all(st.ux[-1, :] == 0.0)
    assert np.all(st.uy[:, 0] == 0.0) and np.all(st.uy[:, -1] == 0.0)
    assert st.rho.min() > 0.5 and st.b.min() > 0.5


# ------------------------------------------------------------------
# order estimation
# ------------------------------------------------------------------

def test_richardson_exact_ratios():
    assert richardson_order([4e-2, 1e-2], [0.1, 0.05]) == pytest.approx(2.0, abs=1e-12)
    assert richardson_order([2e-2, 1e-2], [0.1, 0.05]) == pytest.approx(1.0, abs=1e-12)


def test_richardson_noisy_three_point():
    rng = np.random.default_rng(12)
    hs = [0.1, 0.05, 0.025]
    errs = [0.03 * h ** 1.5 * (1.0 + 0.02 * rng.standard_normal()) for h in hs]
    slope = richardson_order(errs, hs)
    pair_mean = 0.5 * (np.log2(errs[0] / errs[1]) + np.log2(errs[1] / errs[2]))
    assert abs(slope - pair_mean) < 0.1


def test_richardson_degenerate_inputs():
    with pytest.raises(DegenerateInput):
        richardson_order([1e-2], [0.1])
    with pytest.raises(DegenerateInput):
        richardson_order([1e-2, 0.0], [0.1, 0.05])
    with pytest.raises(DegenerateInput):
        richardson_order([1e-2, 1e-3], [0.1, -0.05])


def test_run_mms_constant_state_roundoff_errors():
    ms = ManufacturedSolution(rho=1.0, b=1.0, ux=0.0, uy=0.0)
    cfg = Config(params=params(eps=1e-2, delta=1e-2, t_final=0.02))
    rep = run_mms(cfg, ms, resolutions=(8, 12))
    for k in ("rho", "b", "u"):
        assert max(rep.l2_errors[k]) < 1e-13
        assert np.isnan(rep.orders[k]) or rep.orders[k] != 0.0


# ------------------------------------------------------------------
# sweeps (small scale; the acceptance suite runs the real ones)
# ------------------------------------------------------------------

def test_epsilon_sweep_single_member_has_no_distances():
    cfg = small_sweep_config(eps=1e-2, delta=1e-2)
    rep = epsilon_sweep(cfg, [1e-2], n_records=5)
    assert len(rep.rows) == 1
    assert rep.rows[0]["dist_rho"] == 0.0  # the lone member is its own reference


def test_epsilon_sweep_requires_decreasing_and_delta():
    cfg = small_sweep_config(eps=1e-2, delta=1e-2)
    with pytest.raises(ValidationError):
        epsilon_sweep(cfg, [1e-3, 1e-2])
    cfg0 = small_sweep_config(eps=1e-2, delta=0.0)
    with pytest.raises(ValidationError):
        epsilon_sweep(cfg0, [1e-2, 1e-3])


def test_epsilon_sweep_records_member_failure_and_continues():
    cfg = small_sweep_config(eps=1e-2, delta=1e-2)
    rep = epsilon_sweep(cfg, [1e-2, -1.0], n_records=5)  # second member inadmissible
    assert rep.rows[0]["ok"] is True
    assert rep.rows[1]["ok"] is False
    assert "ValidationError" in rep.rows[1]["error"]
    # the surviving member still got distance columns (it is the finest ok run)
    assert rep.rows[0]["dist_rho"] == 0.0


def test_delta_sweep_zero_member_exact_zero_pressure_column():
    cfg = small_sweep_config(eps=0.0, delta=1e-2)
    rep = delta_sweep(cfg, [1e-2, 0.0], n_records=5)
    assert rep.rows[1]["delta_pressure_int"] == 0.0
    assert rep.rows[0]["delta_pressure_int"] > 0.0
    assert all(row["ratio_drift"] <= 1e-10 for row in rep.rows)


def test_sweep_reports_are_deterministic(tmp_path):
    cfg = small_sweep_config(eps=1e-2, delta=1e-2)
    r1 = epsilon_sweep(cfg, [1e-2, 5e-3], n_records=5)
    r2 = epsilon_sweep(cfg, [1e-2, 5e-3], n_records=5)
    assert r1.rows == r2.rows
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    r1.to_csv(p1)
    r2.to_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert "eps sweep" in r1.summary_text()


def test_epsilon_sweep_evf_pairing_is_cauchy():
    # pairing against a fixed interior bump converges as eps halves:
    # successive gaps shrink (the checkable trace of the limit identity)
    p = params(nx=24, ny=24, eps=1e-2, delta=1e-2, t_final=0.3)
    spec = InitialDataSpec(
        kind="ratio-profile", rho_amp=0.1, kx=1, ky=1,
        ratio_mid=1.0, ratio_amp=0.25, jx=1, jy=0, u_amp=0.2,
    )
    cfg = Config(params=p, init=spec)
    rep = epsilon_sweep(cfg, [1e-2 * 2.0 ** -k for k in range(4)], n_records=11)
    pairings = rep.column("evf_pairing")
    gaps = [abs(a - b) for a, b in zip(pairings, pairings[1:])]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))


def test_mms_zero_source_path_matches_plain_run():
    # a manufactured solution whose sources vanish identically must leave the
    # solver bit-for-bit unchanged relative to the no-source path
    ms = ManufacturedSolution(rho=1.0, b=1.0, ux=0.0, uy=0.0)
    p = params(nx=10, ny=10, eps=1e-2, delta=1e-2, t_final=0.02)
    spec = InitialDataSpec(kind="cosine-perturbation", rho_amp=0.05, b_amp=0.05, kx=1, ky=1)
    cfg = Config(params=p, init=spec)
    src = mms_sources(ms, p)
    tr_a, _ = run(cfg)
    tr_b, _ = run(cfg, sources=src)
    for f in ("rho", "b", "ux", "uy"):
        assert np.array_equal(getattr(tr_a.states[-1], f), getattr(tr_b.states[-1], f))
