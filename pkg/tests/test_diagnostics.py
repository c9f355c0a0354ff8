import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from qstrip import (DIRICHLET, TRANSPARENT, NoPotential, PhysicalConstants,
                    build_grid, sample_potential)
from qstrip.diagnostics import (ObservableSeries, convergence_ratios,
                                difference_norms, energies,
                                inner_product_numerov_trace,
                                inner_product_tilde, mass2, norm_tilde,
                                summation_identity_residual,
                                summation_identity_sides)

CONSTS = PhysicalConstants()


def _grid(counts=(8, 6), boundary=DIRICHLET):
    return build_grid(extents=(2.0, 1.5), counts=counts, levels=1, tau=1e-3,
                      left_boundary=boundary)


def _random_closed(rng, grid):
    return (rng.normal(size=grid.shape)
            + 1j * rng.normal(size=grid.shape)).astype(np.complex128)


# --- weighted norms ----------------------------------------------------------

def test_norm_of_ones_counts_the_window():
    ones = np.ones((9, 7), np.complex128)
    g_wall = _grid()
    h1h2 = 0.25 * 0.25
    # walled left edge: axis-1 rows 1..8, transverse columns 1..5
    assert norm_tilde(ones, g_wall) == pytest.approx(
        np.sqrt(8 * 5 * h1h2), rel=1e-14)
    g_open = _grid(boundary=TRANSPARENT)
    assert norm_tilde(ones, g_open) == pytest.approx(
        np.sqrt(9 * 5 * h1h2), rel=1e-14)


@given(st.integers(0, 500), st.booleans())
def test_mass_matches_direct_summation(seed, open_left):
    rng = np.random.default_rng(seed)
    g = _grid(boundary=TRANSPARENT if open_left else DIRICHLET)
    u = _random_closed(rng, g)
    assert mass2(u, g) == pytest.approx(oracles.mass_tilde_direct(u, g),
                                        rel=1e-12)


def test_inner_product_structure(rng):
    g = _grid()
    u = _random_closed(rng, g)
    w = _random_closed(rng, g)
    ip = inner_product_tilde(u, w, g)
    assert inner_product_tilde(w, u, g) == pytest.approx(np.conj(ip))
    assert inner_product_tilde(u, u, g).real == pytest.approx(mass2(u, g))
    assert inner_product_tilde(2j * u, w, g) == pytest.approx(2j * ip)
    with pytest.raises(ValueError, match="closed mesh"):
        inner_product_tilde(u[:-1], w, g)


# --- energies ----------------------------------------------------------------

def test_single_node_energies():
    g = _grid(counts=(8, 6))
    h1, h2 = g.steps
    pot = sample_potential(NoPotential(), g, v_inf=7.0)
    u = np.zeros(g.shape, np.complex128)
    u[4, 3] = 1.0
    e_kin, e_pot = energies(u, pot, g, CONSTS)
    assert e_kin == pytest.approx(
        CONSTS.c_hbar * (2.0 / h1 ** 2 + 2.0 / h2 ** 2) * h1 * h2, rel=1e-13)
    assert e_pot == pytest.approx(7.0 * h1 * h2, rel=1e-13)

    with pytest.raises(ValueError, match="closed mesh"):
        energies(u[1:], pot, g, CONSTS)
    g3 = build_grid(extents=(1.0, 1.0, 1.0), counts=(4, 4, 4), levels=1,
                    tau=1e-3)
    with pytest.raises(ValueError, match="n = 2"):
        energies(np.zeros(g3.shape, np.complex128),
                 sample_potential(NoPotential(), g3), g3, CONSTS)


def test_energies_scale_quadratically(rng):
    g = _grid()
    pot = sample_potential(NoPotential(), g, v_inf=-3.0)
    u = _random_closed(rng, g)
    k1, p1 = energies(u, pot, g, CONSTS)
    k3, p3 = energies(3.0 * u, pot, g, CONSTS)
    assert k3 == pytest.approx(9.0 * k1, rel=1e-12)
    assert p3 == pytest.approx(9.0 * p1, rel=1e-12)


# --- error norms and ratios ---------------------------------------------------

def test_difference_norms(rng):
    g = _grid()
    a = _random_closed(rng, g)
    b = _random_closed(rng, g)
    e_c, e_l2 = difference_norms(a, b, g)
    assert e_c == pytest.approx(np.abs(a - b).max())
    assert e_l2 == pytest.approx(norm_tilde(a - b, g))
    assert difference_norms(a, a, g) == (0.0, 0.0)


def test_convergence_ratios():
    assert convergence_ratios([]) == [None]
    out = convergence_ratios([0.0033, 0.00081])
    assert out[0] is None
    assert out[1] == pytest.approx(4.074074, rel=1e-6)
    out = convergence_ratios([1.0, 0.0, 2.0])
    assert out == [None, None, pytest.approx(0.0)]


# --- summation-by-parts identity ----------------------------------------------

def _admissible_trial(rng, grid):
    w = _random_closed(rng, grid)
    w[0] = 0.0         # left wall
    w[:, 0] = 0.0      # transverse walls; the j1 = J1 trace row stays free
    w[:, -1] = 0.0
    return w


@given(st.integers(0, 200), st.booleans())
def test_summation_identity_holds(seed, with_profile):
    rng = np.random.default_rng(seed)
    g = _grid(counts=(8, 6))
    u = _random_closed(rng, g)
    v = _random_closed(rng, g)
    w = _admissible_trial(rng, g)
    vt = rng.normal(size=g.counts[0] + 1) if with_profile else None
    lhs, rhs = summation_identity_sides(u, v, w, g, CONSTS, v_tilde=vt)
    scale = abs(lhs) + abs(rhs)
    assert scale > 1e-3            # the identity is not trivially 0 == 0
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_summation_identity_validation(rng):
    g = _grid()
    u = _random_closed(rng, g)
    w = _random_closed(rng, g)   # nonzero on the left wall
    with pytest.raises(ValueError, match="vanish"):
        summation_identity_sides(u, u, w, g, CONSTS)
    with pytest.raises(ValueError, match="closed mesh"):
        summation_identity_sides(u[:-1], u, _admissible_trial(rng, g), g,
                                 CONSTS)
    assert summation_identity_residual(
        u, u, _admissible_trial(rng, g), g, CONSTS) >= 0.0


# --- compact trace-weighted product ---------------------------------------------

def test_numerov_trace_product_is_hermitian_positive(rng):
    g = _grid(counts=(6, 5))
    j1, j2 = g.counts
    dim = j1 * (j2 - 1)

    def basis(i):
        u = np.zeros(g.shape, np.complex128)
        r, c = divmod(i, j2 - 1)
        u[1 + r, 1 + c] = 1.0
        return u

    gram = np.empty((dim, dim), np.complex128)
    for a in range(dim):
        ua = basis(a)
        for b in range(dim):
            gram[a, b] = inner_product_numerov_trace(basis(b), ua, g)
    assert np.abs(gram - gram.conj().T).max() < 1e-14
    eigs = np.linalg.eigvalsh(gram)
    assert eigs.min() > 0.0

    u = _random_closed(rng, g)
    u[0] = u[:, 0] = u[:, -1] = 0.0
    quad = inner_product_numerov_trace(u, u, g)
    assert abs(quad.imag) <= 1e-13 * abs(quad)
    assert quad.real > 0.0


# --- observable series -----------------------------------------------------------

def test_observable_series_record_and_columns():
    s = ObservableSeries()
    s.record(0, 0.0, 1.0, 2.0, -0.5)
    s.record(5, 0.05, 0.99, 2.1, -0.6, e_c=1e-3)
    assert s.levels == [0, 5]
    assert s.extras["e_c"] == [1e-3]
    cols = s.columns()
    assert cols["level"] == [0, 5]
    assert cols["mass2"] == [1.0, 0.99]
    assert cols["e_c"] == [1e-3]
    assert list(cols) == ["level", "time", "mass2", "e_kin", "e_pot", "e_c"]
