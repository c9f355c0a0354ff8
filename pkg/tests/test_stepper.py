import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import random_interior_field
from qstrip import (COMPARISON_DIRICHLET, DIRICHLET, DOUBLE_SPLIT_DIRICHLET,
                    DOUBLE_SPLIT_TBC, TRANSPARENT, NoPotential,
                    PhysicalConstants, PoschlTellerPotential, build_grid,
                    extend_axis1, gaussian_packet, initial_state, make_plan,
                    run, sample_potential, step)
from qstrip.diagnostics import norm_tilde
from qstrip.errors import ConfigError, NumericalError
from qstrip.grid_core import WaveField
from qstrip.spectral import transverse_eigenpair
from qstrip.stepper import (VARIANTS, assemble_mode_system, strang_multiplier,
                            thomas_solve)
from qstrip.transforms import (dst_forward, dst_inverse, mode_analyze,
                               mode_synthesize)

CONSTS = PhysicalConstants()
DIRICHLET_VARIANTS = (DOUBLE_SPLIT_DIRICHLET, COMPARISON_DIRICHLET)


def _step_potential(grid, v_inf=0.0):
    """Ṽ(x1) with one interior step, dV spots in the middle of the window."""
    x_mid = 0.25 * grid.extents[0]
    x_end = 0.625 * grid.extents[0]
    pot = sample_potential(NoPotential(), grid, v_inf=v_inf,
                           v_tilde_steps=[(0.0, v_inf), (x_mid, v_inf + 3.0),
                                          (x_end, v_inf)])
    dv = np.zeros(grid.shape)
    j1, j2 = grid.counts
    dv[j1 // 2 - 1:j1 // 2 + 2, j2 // 2 - 1:j2 // 2 + 2] = -2.5
    pot.dv = pot.dv + dv
    pot.v = pot.v + dv
    return pot


# --- scalar building blocks --------------------------------------------------

@given(st.floats(-50.0, 50.0), st.floats(1e-5, 1.0), st.floats(0.1, 5.0))
def test_strang_multiplier_is_unimodular(dv, tau, hbar):
    e = strang_multiplier(dv, tau, hbar)
    assert abs(abs(e) - 1.0) < 1e-14


def test_strang_multiplier_special_values():
    assert strang_multiplier(0.0, 1e-3, 1.0) == 1.0
    # dv = 4ħ/τ makes the quarter-step phase i: E = (1−i)/(1+i) = −i exactly
    assert strang_multiplier(4.0, 1.0, 1.0) == -1j
    arr = strang_multiplier(np.zeros((3, 4)), 1e-3, 2.0)
    assert np.all(arr == 1.0)


def test_thomas_small_system():
    u = thomas_solve([0.0, 1.0], [2.0, 2.0], [1.0, 0.0], [3.0, 3.0])
    np.testing.assert_allclose(u, [1.0, 1.0], rtol=1e-14)


@given(st.integers(2, 12), st.integers(0, 1000))
def test_thomas_matches_dense_solve(n, seed):
    rng = np.random.default_rng(seed)
    sub = rng.normal(size=n) + 1j * rng.normal(size=n)
    sup = rng.normal(size=n) + 1j * rng.normal(size=n)
    dia = rng.normal(size=n) + 1j * rng.normal(size=n) + 8.0  # diag dominance
    rhs = rng.normal(size=n) + 1j * rng.normal(size=n)
    got = thomas_solve(sub, dia, sup, rhs)
    want = oracles.thomas_dense(sub, dia, sup, rhs)
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


def test_thomas_pivot_breakdown():
    with pytest.raises(NumericalError, match="pivot"):
        thomas_solve([0.0, 1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0])
    with pytest.raises(NumericalError, match="row 1"):
        # second pivot 1 − 2·(2/2)·... : dia[1] − sub[1]·cp[0] = 2 − 1·2 = 0
        thomas_solve([0.0, 1.0], [1.0, 2.0], [2.0, 0.0], [1.0, 1.0])


# --- plan validation ---------------------------------------------------------

def test_make_plan_validation():
    g = build_grid(extents=(1.0, 1.0), counts=(16, 8), levels=4, tau=1e-3)
    pot = sample_potential(NoPotential(), g)
    with pytest.raises(ConfigError, match="variant"):
        make_plan(g, CONSTS, pot, "unknown")
    with pytest.raises(ConfigError, match="workers"):
        make_plan(g, CONSTS, pot, DOUBLE_SPLIT_DIRICHLET, workers=0)

    g3 = build_grid(extents=(1.0, 1.0, 1.0), counts=(8, 8, 8), levels=1,
                    tau=1e-3)
    pot3 = sample_potential(NoPotential(), g3)
    with pytest.raises(ConfigError, match="n = 2"):
        make_plan(g3, CONSTS, pot3, DOUBLE_SPLIT_DIRICHLET)

    g_open = build_grid(extents=(1.0, 1.0), counts=(16, 8), levels=4,
                        tau=1e-3, left_boundary=TRANSPARENT)
    pot_open = sample_potential(NoPotential(), g_open)
    for variant in DIRICHLET_VARIANTS:
        with pytest.raises(ConfigError, match="dirichlet"):
            make_plan(g_open, CONSTS, pot_open, variant)

    g_small = build_grid(extents=(1.0, 1.0), counts=(8, 8), levels=4,
                         tau=1e-3)
    pot_small = sample_potential(NoPotential(), g_small)
    with pytest.raises(ConfigError, match="different mesh"):
        make_plan(g, CONSTS, pot_small, DOUBLE_SPLIT_DIRICHLET)

    # potential with dV on the edge layers cannot feed a transparent run
    bad = sample_potential(NoPotential(), g)
    bad.dv = bad.dv.copy()
    bad.dv[g.counts[0] - 1, 3] = 1.0
    with pytest.raises(ConfigError, match="edge"):
        make_plan(g, CONSTS, bad, DOUBLE_SPLIT_TBC)


def test_initial_state_validation():
    g = build_grid(extents=(1.0, 1.0), counts=(16, 8), levels=4, tau=1e-3,
                   left_boundary=TRANSPARENT)
    pot = sample_potential(NoPotential(), g)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_TBC)

    with pytest.raises(ConfigError, match="different mesh"):
        initial_state(plan, np.zeros((5, 5), np.complex128))

    vals = np.zeros(g.shape, np.complex128)
    vals[4, 0] = 1.0
    with pytest.raises(ConfigError, match="transverse walls"):
        initial_state(plan, vals)

    vals = np.zeros(g.shape, np.complex128)
    vals[1, 4] = 1.0  # second layer must be empty for a transparent left edge
    with pytest.raises(ConfigError, match="j1=1"):
        initial_state(plan, vals)

    vals = np.zeros(g.shape, np.complex128)
    vals[15, 4] = 1.0
    with pytest.raises(ConfigError, match="j1=15"):
        initial_state(plan, vals)

    state = initial_state(plan, np.zeros(g.shape, np.complex128))
    assert state.level == 0
    assert state.hist_left.shape == (5, 7)
    assert state.hist_right.shape == (5, 7)


# --- agreement with the dense one-step oracle --------------------------------

@pytest.mark.parametrize("variant", DIRICHLET_VARIANTS)
def test_step_matches_dense_oracle(variant, rng):
    g = build_grid(extents=(1.0, 1.2), counts=(10, 6), levels=3, tau=2e-3)
    pot = _step_potential(g, v_inf=0.0)
    plan = make_plan(g, CONSTS, pot, variant)

    psi = random_interior_field(rng, g)
    f = random_interior_field(rng, g)
    state = initial_state(plan, psi.copy())

    dense = psi.copy()
    for _ in range(3):
        step(plan, state, source=f)
        dense = oracles.dense_step(dense, g, CONSTS, pot, variant, f=f)
        scale = np.abs(dense).max()
        assert np.abs(state.psi - dense).max() <= 1e-12 * scale
    assert state.level == 3


def test_step_with_zero_source_matches_no_source(rng):
    g = build_grid(extents=(1.0, 1.0), counts=(8, 6), levels=1, tau=1e-3)
    pot = sample_potential(NoPotential(), g)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_DIRICHLET)
    psi = random_interior_field(rng, g)
    s1 = step(plan, initial_state(plan, psi.copy()))
    s2 = step(plan, initial_state(plan, psi.copy()),
              source=np.zeros(g.shape, np.complex128))
    np.testing.assert_allclose(s1.psi, s2.psi, rtol=0, atol=1e-16)


# --- reference per-mode assembly vs the batched production path --------------

def test_reference_assembly_reproduces_step(rng):
    g = build_grid(extents=(1.0, 1.0), counts=(12, 8), levels=6, tau=5e-4,
                   left_boundary=TRANSPARENT)
    pot = sample_potential(PoschlTellerPotential(alpha0=30.0, c1=1.5,
                                                 x1_star=0.5), g,
                           support_tol=1e-4)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_TBC)
    psi = gaussian_packet(g, wave_number=8.0, width=0.002, center=(0.5, 0.5))
    f = random_interior_field(rng, g)

    # march the production path to level 2, then rebuild level 3 by hand
    state = initial_state(plan, psi)
    for _ in range(2):
        step(plan, state, source=f)
    hist_l = state.hist_left.copy()
    hist_r = state.hist_right.copy()
    before = state.psi.copy()
    m = state.level + 1

    step(plan, state, source=f)

    breve = plan.e_mult * before
    vb = mode_analyze(breve, g)
    f_modes = mode_analyze(f, g)
    u = np.zeros((g.counts[0] + 1, plan.n_modes), np.complex128)
    for q in range(1, plan.n_modes + 1):
        col = q - 1
        lag_l = sum(plan.kernels[p, col] * hist_l[m - p, col]
                    for p in range(1, m + 1))
        lag_r = sum(plan.kernels[p, col] * hist_r[m - p, col]
                    for p in range(1, m + 1))
        ws = assemble_mode_system(plan, q, vb[:, col], m, lagged_left=lag_l,
                                  lagged_right=lag_r, f_col=f_modes[:, col])
        u[plan.lo:plan.hi + 1, col] = thomas_solve(ws.sub, ws.dia, ws.sup,
                                                   ws.rhs)
    want = plan.e_mult * mode_synthesize(u, g)
    scale = np.abs(state.psi).max()
    assert np.abs(state.psi - want).max() <= 1e-12 * scale

    with pytest.raises(ValueError, match="mode index"):
        assemble_mode_system(plan, 0, vb[:, 0], m)


def test_worker_chunking_is_bit_identical():
    g = build_grid(extents=(1.0, 1.0), counts=(24, 16), levels=5, tau=5e-4,
                   left_boundary=TRANSPARENT)
    pot = sample_potential(NoPotential(), g)
    psi = gaussian_packet(g, wave_number=10.0, width=0.003, center=(0.5, 0.5))

    plan1 = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_TBC, workers=1)
    plan3 = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_TBC, workers=3)
    s1 = initial_state(plan1, psi.clone())
    s3 = initial_state(plan3, psi.clone())
    for _ in range(5):
        step(plan1, s1)
        step(plan3, s3)
        assert np.array_equal(s1.psi, s3.psi)


# --- conservation, transparency, stability ------------------------------------

@pytest.mark.parametrize("variant", DIRICHLET_VARIANTS)
def test_mass_is_conserved_with_profile_potential(variant, rng):
    g = build_grid(extents=(1.0, 1.0), counts=(20, 12), levels=25, tau=1e-3)
    pot = _step_potential(g, v_inf=0.0)
    plan = make_plan(g, CONSTS, pot, variant)
    psi = random_interior_field(rng, g)
    state, series = run(plan, WaveField(psi))
    mass = np.array(series.mass2)
    assert np.abs(mass - mass[0]).max() <= 1e-12 * mass[0]


def test_transparent_run_matches_enlarged_box():
    g = build_grid(extents=(1.0, 1.0), counts=(40, 8), levels=30, tau=4e-4,
                   left_boundary=TRANSPARENT)
    pot = sample_potential(NoPotential(), g)
    psi = gaussian_packet(g, wave_number=20.0, width=0.005, center=(0.5, 0.5))
    peak0 = np.abs(psi.values).max()

    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_TBC)
    state = initial_state(plan, psi.clone())

    g5, pot5, psi5, pad = extend_axis1(g, pot, psi, factor=5)
    plan5 = make_plan(g5, CONSTS, pot5, DOUBLE_SPLIT_DIRICHLET)
    state5 = initial_state(plan5, psi5)

    j1 = g.counts[0]
    for _ in range(30):
        step(plan, state)
        step(plan5, state5)
        window = state5.psi[pad:pad + j1 + 1]
        assert np.abs(state.psi - window).max() <= 1e-12 * peak0
    # the packet genuinely left the window, so transparency was exercised
    assert norm_tilde(state.psi, g) < 0.8 * norm_tilde(psi.values, g)


def test_phase_factor_is_identity_where_dv_vanishes():
    g = build_grid(extents=(1.0, 1.0), counts=(16, 8), levels=1, tau=1e-3,
                   left_boundary=TRANSPARENT)
    pot = sample_potential(PoschlTellerPotential(alpha0=25.0, c1=2.0,
                                                 x1_star=0.5), g,
                           support_tol=1e-3)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_TBC)
    for row in (0, 1, 15, 16):
        assert np.all(plan.e_mult[row] == 1.0)
    assert np.any(plan.e_mult[8] != 1.0)


def test_stability_bound_with_source(rng):
    # ‖U^m‖ ≤ ‖U⁰‖ + (τ/ħ)·Σ_l ‖(split-average)⁻¹ F^l‖ for the double-split
    # walled scheme with a constant kept profile (phase factors identity)
    g = build_grid(extents=(1.0, 1.0), counts=(16, 12), levels=20, tau=1e-3)
    pot = sample_potential(NoPotential(), g)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_DIRICHLET)
    j1, j2 = g.counts
    sig1 = np.array([transverse_eigenpair(p, j1, g.steps[0])[1]
                     for p in range(1, j1)])
    sig2 = np.array([transverse_eigenpair(p, j2, g.steps[1])[1]
                     for p in range(1, j2)])

    def inv_avg_norm(field):
        coeffs = dst_forward(dst_forward(field[1:-1, 1:-1], axis=0), axis=1)
        coeffs = coeffs / (sig1[:, None] * sig2[None, :])
        back = dst_inverse(dst_inverse(coeffs, axis=0), axis=1)
        padded = np.zeros(g.shape, np.complex128)
        padded[1:-1, 1:-1] = back
        return norm_tilde(padded, g)

    sources = [random_interior_field(rng, g) for _ in range(20)]
    psi = random_interior_field(rng, g)
    state = initial_state(plan, psi.copy())
    bound = norm_tilde(psi, g)
    for m in range(1, 21):
        step(plan, state, source=sources[m - 1])
        bound += (g.tau / CONSTS.hbar) * inv_avg_norm(sources[m - 1])
        assert norm_tilde(state.psi, g) <= bound * (1.0 + 1e-12)


# --- run driver ---------------------------------------------------------------

def test_run_records_and_observes(rng):
    g = build_grid(extents=(1.0, 1.0), counts=(12, 8), levels=7, tau=1e-3)
    pot = sample_potential(NoPotential(), g)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_DIRICHLET)
    psi = random_interior_field(rng, g)
    seen = []
    state, series = run(plan, WaveField(psi), observable_stride=3,
                        observers=(lambda s: seen.append(s.level),))
    assert series.levels == [0, 3, 6, 7]
    assert seen == list(range(8))
    assert state.level == 7
    np.testing.assert_allclose(series.times, [0.0, 3e-3, 6e-3, 7e-3])

    with pytest.raises(ConfigError, match="observable_stride"):
        run(plan, WaveField(psi), observable_stride=0)


def test_run_with_callable_source_matches_manual_steps(rng):
    g = build_grid(extents=(1.0, 1.0), counts=(10, 6), levels=4, tau=1e-3)
    pot = sample_potential(NoPotential(), g)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_DIRICHLET)
    psi = random_interior_field(rng, g)
    tables = [random_interior_field(rng, g) for _ in range(5)]

    state, _ = run(plan, WaveField(psi.copy()), source=lambda m: tables[m])
    manual = initial_state(plan, psi.copy())
    for m in range(1, 5):
        step(plan, manual, source=tables[m])
    np.testing.assert_array_equal(state.psi, manual.psi)


def test_step_guards():
    g = build_grid(extents=(1.0, 1.0), counts=(8, 6), levels=1, tau=1e-3)
    pot = sample_potential(NoPotential(), g)
    plan = make_plan(g, CONSTS, pot, DOUBLE_SPLIT_DIRICHLET)
    state = initial_state(plan, np.zeros(g.shape, np.complex128))
    step(plan, state)
    with pytest.raises(ValueError, match="final level"):
        step(plan, state)

    state2 = initial_state(plan, np.zeros(g.shape, np.complex128))
    bad = np.zeros(g.shape, np.complex128)
    bad[4, 3] = np.nan
    with pytest.raises(NumericalError, match="non-finite"):
        step(plan, state2, source=bad)
