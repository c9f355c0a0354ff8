"""Time stepping: split higher-order scheme with transparent boundaries (n = 2).

One time step from Ψ^{m−1} to Ψ^m consists of three stages.  The potential
remainder dV = V − Ṽ(x1) is applied through the exact unimodular phase factor

    E = (1 − iτ·dV/(4ħ)) / (1 + iτ·dV/(4ħ)),      |E| = 1,  E = 1 where dV = 0,

once before and once after the main step (a symmetric potential splitting):

    Ψ̆ = E·Ψ^{m−1},     main implicit step  Ψ̆ → Ψ̃,     Ψ^m = E·Ψ̃.

The main step is the double-splitting Numerov–Crank–Nicolson scheme in the
profile potential Ṽ(x1): writing s_Nk for the one-axis compact average and
σ_q, λ_q for its transverse eigenvalues (see `spectral`), the transverse sine
modes decouple into independent axis‑1 systems

    [iħ/τ · s_N1 + (c_ħ/2) ∂₁∂̄₁ − ½ s_N1(Ṽq ·)] u_q
  = [iħ/τ · s_N1 − (c_ħ/2) ∂₁∂̄₁ + ½ s_N1(Ṽq ·)] v_q + F_q/σ_q,

with the mode-shifted profile Ṽq(x1) = Ṽ(x1) + c_ħ λ_q/σ_q.  Each system is
tridiagonal; edges are closed either by homogeneous Dirichlet rows or by the
transparent-boundary convolution rows of `tbc.boundary_row`, whose kernels use
the shifted limit potential V∞q = V∞ + c_ħ λ_q/σ_q.

A step therefore runs: phase → transverse analysis → batched tridiagonal
solves (+ per-mode convolution history updates at transparent edges) →
transverse synthesis → phase.

The same machinery hosts the comparison scheme (additive Numerov average,
no operator splitting, Dirichlet edges only), whose per-mode rows are

    [iħ/τ (s_N1 + σ_q − 1) + (c_ħσ_q/2) ∂₁∂̄₁ − (c_ħλ_q/2) s_N1
       − ½ s_N1(Ṽ ·) + ((1−σ_q)/2) Ṽ] u_q  =  [same with non-iħ signs flipped] v_q + F_q.

The two variants agree to O(h₁²h₂²) and share diagnostics, which is what the
error tables in `cli_app.compare_runs` measure.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import tbc
from .diagnostics import ObservableSeries, energies, mass2
from .errors import ConfigError, NumericalError
from .grid_core import TRANSPARENT, WaveField
from .transforms import mode_analyze, mode_synthesize

try:  # optional compiled fast paths for the batched per-mode systems
    from numba import njit as _njit
except ImportError:
    _band_sweeps = None
    _rhs_interior = None
else:
    @_njit(cache=True)
    def _band_sweeps(sub, inv_den, cp, y):
        n, q = y.shape
        for k in range(q):
            y[0, k] = y[0, k] * inv_den[0, k]
        for r in range(1, n):
            for k in range(q):
                y[r, k] = (y[r, k] - sub[r, k] * y[r - 1, k]) * inv_den[r, k]
        for r in range(n - 2, -1, -1):
            for k in range(q):
                y[r, k] = y[r, k] - cp[r, k] * y[r + 1, k]

    @_njit(cache=True)
    def _rhs_interior(bs, bd, bu, v, out):
        n, q = bs.shape
        for r in range(n):
            for k in range(q):
                out[r, k] = (bs[r, k] * v[r, k] + bd[r, k] * v[r + 1, k]
                             + bu[r, k] * v[r + 2, k])

DOUBLE_SPLIT_TBC = "double_split_tbc"
DOUBLE_SPLIT_DIRICHLET = "double_split_dirichlet"
COMPARISON_DIRICHLET = "comparison_ncn_strang_dirichlet"
VARIANTS = (DOUBLE_SPLIT_TBC, DOUBLE_SPLIT_DIRICHLET, COMPARISON_DIRICHLET)

_PIVOT_FLOOR = 1e-30


def strang_multiplier(dv, tau, hbar):
    """Unimodular phase factor of the symmetric potential splitting."""
    w = 0.25j * tau * np.asarray(dv) / hbar
    return (1.0 - w) / (1.0 + w)


def thomas_solve(sub, diag, sup, rhs):
    """Solve one tridiagonal system (sub[0] and sup[-1] are ignored).

    Raises NumericalError when a forward-elimination pivot falls below 1e−30
    of its row magnitude.
    """
    sub = np.asarray(sub, np.complex128)
    diag = np.asarray(diag, np.complex128)
    sup = np.asarray(sup, np.complex128)
    rhs = np.asarray(rhs, np.complex128)
    n = len(diag)
    scale = np.abs(sub) + np.abs(diag) + np.abs(sup)
    cp = np.empty(n, np.complex128)
    y = np.empty(rhs.shape, np.complex128)
    den = diag[0]
    if abs(den) < _PIVOT_FLOOR * scale[0]:
        raise NumericalError("tridiagonal pivot breakdown at row 0")
    cp[0] = sup[0] / den
    y[0] = rhs[0] / den
    for i in range(1, n):
        den = diag[i] - sub[i] * cp[i - 1]
        if abs(den) < _PIVOT_FLOOR * scale[i]:
            raise NumericalError(f"tridiagonal pivot breakdown at row {i}")
        cp[i] = sup[i] / den
        y[i] = (rhs[i] - sub[i] * y[i - 1]) / den
    for i in range(n - 2, -1, -1):
        y[i] -= cp[i] * y[i + 1]
    return y


@dataclass
class ModeWorkspace:
    """One mode's assembled tridiagonal system (reference, unbatched form)."""

    q: int
    sub: np.ndarray
    dia: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray


@dataclass
class SolverPlan:
    """Everything precomputed for a run: bands, factorizations, kernels."""

    grid: object
    consts: object
    potential: object
    variant: str
    workers: int
    lam: np.ndarray            # (Q,) transverse −∂∂̄ eigenvalues
    sigma: np.ndarray          # (Q,) transverse compact-average eigenvalues
    v_shift: np.ndarray        # (Q,) shifted limit potentials V∞q
    lo: int                    # first axis-1 unknown row
    hi: int                    # last axis-1 unknown row
    a_sub: np.ndarray          # (N, Q) unknown-level bands
    a_dia: np.ndarray
    a_sup: np.ndarray
    b_sub: np.ndarray          # (N_int, Q) known-level bands (interior rows)
    b_dia: np.ndarray
    b_sup: np.ndarray
    cp: np.ndarray             # (N, Q) prefactored elimination data
    inv_den: np.ndarray
    e_mult: np.ndarray         # closed-mesh phase factor
    kernels: np.ndarray | None      # (M+1, Q) or None
    kernels_rev: np.ndarray | None  # kernels[::-1] (contiguous)
    edge_dia: np.ndarray | None     # (Q,) transparent edge-row coefficients
    edge_nb: np.ndarray | None
    rv_edge: np.ndarray | None      # (Q,) known-level edge weights
    rv_nb: np.ndarray | None
    left_transparent: bool = False
    right_transparent: bool = False
    _pool: object = field(default=None, repr=False)

    @property
    def n_rows(self):
        return self.hi - self.lo + 1

    @property
    def n_modes(self):
        return len(self.lam)

    def reference_kernel_table(self, q):
        """KernelTable view for mode q (1-based), for the unbatched path."""
        coeffs = tbc.kernel_coefficients(
            float(self.v_shift[q - 1]), self.grid.tau, self.grid.steps[0],
            self.consts)
        return tbc.KernelTable(coeffs=coeffs, values=self.kernels[:, q - 1])

    def pool(self):
        if self._pool is None and self.workers > 1:
            self._pool = ThreadPoolExecutor(max_workers=self.workers)
        return self._pool


@dataclass
class SolverState:
    """Field at the current level plus the transparent-edge trace histories
    (transverse-mode coefficients of Ψ̃ at the edge rows; level 0 is zero)."""

    psi: np.ndarray
    level: int
    hist_left: np.ndarray | None
    hist_right: np.ndarray | None


def make_plan(grid, consts, potential, variant, *, workers=1):
    """Precompute a `SolverPlan` for one (grid, potential, variant) triple."""
    if variant not in VARIANTS:
        raise ConfigError(f"unknown scheme variant {variant!r}; expected one of {VARIANTS}")
    if grid.n != 2:
        raise ConfigError("time stepping is implemented for n = 2")
    if not (isinstance(workers, int) and workers >= 1):
        raise ConfigError(f"workers must be an integer >= 1, got {workers!r}")
    if potential.v.shape != grid.shape:
        raise ConfigError("potential was sampled on a different mesh")
    if grid.levels < 0:
        raise ConfigError("grid.levels must be >= 0")

    j1, j2 = grid.counts
    h1, h2 = grid.steps
    tau = grid.tau
    hbar, c = consts.hbar, consts.c_hbar

    left_transparent = (variant == DOUBLE_SPLIT_TBC
                        and grid.left_boundary == TRANSPARENT)
    right_transparent = variant == DOUBLE_SPLIT_TBC
    if variant != DOUBLE_SPLIT_TBC and grid.left_boundary == TRANSPARENT:
        raise ConfigError(
            f"variant {variant!r} closes both edges with Dirichlet walls; "
            "grid.left_boundary must be 'dirichlet'")

    q = np.arange(1, j2)
    s2 = np.sin(np.pi * q / (2.0 * j2)) ** 2
    lam = (2.0 / h2) ** 2 * s2
    sigma = 1.0 - s2 / 3.0
    v_shift = potential.v_inf + c * lam / sigma

    lo = 0 if left_transparent else 1
    hi = j1 if right_transparent else j1 - 1
    n_rows = hi - lo + 1
    vt = potential.v_tilde

    if right_transparent:
        edge_rows = [j1 - 1, j1] + ([0, 1] if left_transparent else [])
        if any(abs(vt[r] - potential.v_inf) > 0 for r in edge_rows) or \
                any(np.any(potential.dv[r] != 0) for r in edge_rows):
            raise ConfigError(
                "potential must equal v_inf (and dV vanish) on the axis-1 edge "
                "layers for transparent boundaries; resample it with "
                "`sample_potential`")

    # interior-row bands over absolute rows 1..J1−1
    jab = np.arange(1, j1)
    i_tau = 1j * hbar / tau
    one = np.ones_like(sigma)
    if variant == COMPARISON_DIRICHLET:
        profile = vt[:, None] + np.zeros_like(sigma)  # (J1+1, Q) broadcast of Ṽ
        diff_w = c * sigma                      # weight of ∂₁∂̄₁
        dia_time = i_tau * (sigma - 1.0)        # (σ_q−1) time term (never flips)
        dia_flip = ((1.0 - sigma) * 0.5 * vt[jab][:, None]
                    - (5.0 / 12.0) * c * lam)   # −(c λ_q/2)·s_N1, diagonal part
        off_flip = -c * lam / 24.0              # −(c λ_q/2)·s_N1, neighbor part
    else:
        profile = vt[:, None] + c * lam / sigma  # Ṽq(x1), (J1+1, Q)
        diff_w = c * one
        dia_time = np.zeros_like(sigma) * 0j
        dia_flip = np.zeros((len(jab), len(q)), np.complex128)
        off_flip = np.zeros_like(sigma)

    a_sub = i_tau / 12.0 + diff_w / (2.0 * h1 ** 2) + off_flip \
        - profile[jab - 1] / 24.0
    a_sup = i_tau / 12.0 + diff_w / (2.0 * h1 ** 2) + off_flip \
        - profile[jab + 1] / 24.0
    a_dia = i_tau * (5.0 / 6.0) + dia_time - diff_w / h1 ** 2 \
        - (5.0 / 12.0) * profile[jab] + dia_flip
    b_sub = i_tau / 12.0 - diff_w / (2.0 * h1 ** 2) - off_flip \
        + profile[jab - 1] / 24.0
    b_sup = i_tau / 12.0 - diff_w / (2.0 * h1 ** 2) - off_flip \
        + profile[jab + 1] / 24.0
    b_dia = i_tau * (5.0 / 6.0) + dia_time + diff_w / h1 ** 2 \
        + (5.0 / 12.0) * profile[jab] - dia_flip

    kernels = kernels_rev = None
    edge_dia = edge_nb = rv_edge = rv_nb = None
    n_modes = len(q)
    sub = np.zeros((n_rows, n_modes), np.complex128)
    dia = np.zeros((n_rows, n_modes), np.complex128)
    sup = np.zeros((n_rows, n_modes), np.complex128)
    r0 = 1 - lo  # window row of absolute row 1
    sub[r0:r0 + j1 - 1] = a_sub
    dia[r0:r0 + j1 - 1] = a_dia
    sup[r0:r0 + j1 - 1] = a_sup

    if right_transparent:
        kernels = tbc.kernel_matrix(v_shift, tau, h1, consts, grid.levels)
        kernels_rev = kernels[::-1].copy()
        minus = i_tau - 0.5 * v_shift
        plus = i_tau + 0.5 * v_shift
        flux = c / (2.0 * h1)
        edge_dia = flux - h1 * (5.0 / 12.0) * minus - c * kernels[0]
        edge_nb = -flux - h1 * (1.0 / 12.0) * minus
        rv_edge = flux + h1 * (5.0 / 12.0) * plus
        rv_nb = -flux + h1 * (1.0 / 12.0) * plus
        dia[-1] = edge_dia
        sub[-1] = edge_nb
        if left_transparent:
            dia[0] = edge_dia
            sup[0] = edge_nb

    # prefactor the elimination (bands are level-independent)
    cp = np.empty_like(dia)
    inv_den = np.empty_like(dia)
    row_scale = np.abs(sub) + np.abs(dia) + np.abs(sup)
    den = dia[0].copy()
    if np.any(np.abs(den) < _PIVOT_FLOOR * row_scale[0]):
        raise NumericalError("tridiagonal pivot breakdown at row 0")
    inv_den[0] = 1.0 / den
    cp[0] = sup[0] * inv_den[0]
    for r in range(1, n_rows):
        den = dia[r] - sub[r] * cp[r - 1]
        if np.any(np.abs(den) < _PIVOT_FLOOR * row_scale[r]):
            raise NumericalError(f"tridiagonal pivot breakdown at row {r}")
        inv_den[r] = 1.0 / den
        cp[r] = sup[r] * inv_den[r]

    return SolverPlan(
        grid=grid, consts=consts, potential=potential, variant=variant,
        workers=workers, lam=lam, sigma=sigma, v_shift=v_shift, lo=lo, hi=hi,
        a_sub=sub, a_dia=dia, a_sup=sup, b_sub=b_sub, b_dia=b_dia, b_sup=b_sup,
        cp=cp, inv_den=inv_den,
        e_mult=strang_multiplier(potential.dv, tau, hbar),
        kernels=kernels, kernels_rev=kernels_rev, edge_dia=edge_dia,
        edge_nb=edge_nb, rv_edge=rv_edge, rv_nb=rv_nb,
        left_transparent=left_transparent,
        right_transparent=right_transparent)


def initial_state(plan, psi0):
    """Validate level-0 data against the plan and wrap it in a `SolverState`."""
    values = psi0.values if isinstance(psi0, WaveField) else np.asarray(psi0)
    grid = plan.grid
    if values.shape != grid.shape:
        raise ConfigError("initial data lives on a different mesh")
    j1 = grid.counts[0]
    for face in (values[:, 0], values[:, -1]):
        if np.any(face != 0):
            raise ConfigError("initial data must vanish on the transverse walls")
    must_vanish = []
    must_vanish += [j1 - 1, j1] if plan.right_transparent else [j1]
    must_vanish += [0, 1] if plan.left_transparent else [0]
    for r in must_vanish:
        if np.any(values[r] != 0):
            raise ConfigError(
                f"initial data must vanish on axis-1 layer j1={r} for this "
                "boundary treatment (see `gaussian_packet`)")
    m_levels = grid.levels
    n_modes = plan.n_modes
    return SolverState(
        psi=values.astype(np.complex128, copy=True), level=0,
        hist_left=(np.zeros((m_levels + 1, n_modes), np.complex128)
                   if plan.left_transparent else None),
        hist_right=(np.zeros((m_levels + 1, n_modes), np.complex128)
                    if plan.right_transparent else None))


def assemble_mode_system(plan, q, vb_col, level, lagged_left=0j,
                         lagged_right=0j, f_col=None):
    """Reference (unbatched) assembly of one mode's tridiagonal system.

    vb_col holds the mode-q coefficients of Ψ̆ on all axis-1 rows; `lagged_*`
    are the Σ_{p≥1} R^p·trace^{m−p} sums for the transparent edges.  The
    batched `step` must produce exactly these bands and right-hand side — a
    property the test suite checks directly.
    """
    if not 1 <= q <= plan.n_modes:
        raise ValueError(f"mode index {q} outside 1..{plan.n_modes}")
    col = q - 1
    rows = range(plan.lo, plan.hi + 1)
    n = plan.n_rows
    sub = np.zeros(n, np.complex128)
    dia = np.zeros(n, np.complex128)
    sup = np.zeros(n, np.complex128)
    rhs = np.zeros(n, np.complex128)
    grid = plan.grid
    j1 = grid.counts[0]
    h1 = grid.steps[0]
    for r, j in enumerate(rows):
        if 1 <= j <= j1 - 1:
            # a_* hold the window rows (edge rows included), b_* only the
            # interior rows 1..J1−1: window row r = j − lo, interior row j − 1
            sub[r] = plan.a_sub[r, col]
            dia[r] = plan.a_dia[r, col]
            sup[r] = plan.a_sup[r, col]
            rhs[r] = (plan.b_sub[j - 1, col] * vb_col[j - 1]
                      + plan.b_dia[j - 1, col] * vb_col[j]
                      + plan.b_sup[j - 1, col] * vb_col[j + 1])
            if f_col is not None:
                scale = plan.sigma[col] if plan.variant != COMPARISON_DIRICHLET \
                    else 1.0
                rhs[r] += f_col[j] / scale
    table = plan.reference_kernel_table(q) if plan.right_transparent else None
    if plan.right_transparent:
        e, nb, r_edge = tbc.boundary_row(
            "right", table, float(plan.v_shift[col]), vb_col[j1],
            vb_col[j1 - 1], lagged_right, grid.tau, h1, plan.consts)
        dia[-1], sub[-1], rhs[-1] = e, nb, r_edge
    if plan.left_transparent:
        e, nb, r_edge = tbc.boundary_row(
            "left", table, float(plan.v_shift[col]), vb_col[0], vb_col[1],
            lagged_left, grid.tau, h1, plan.consts)
        dia[0], sup[0], rhs[0] = e, nb, r_edge
    return ModeWorkspace(q=q, sub=sub, dia=dia, sup=sup, rhs=rhs)


def _lagged(plan, hist, m, cols):
    """Σ_{p=1}^m R^p·trace^{m−p} for a block of modes (contiguous slices)."""
    m_total = plan.grid.levels
    return np.einsum("pq,pq->q", plan.kernels_rev[m_total - m:m_total, cols],
                     hist[:m, cols])


def _solve_block(plan, vb, hist_l, hist_r, m, f_modes, cols):
    """Assemble and solve the mode systems for one block of columns."""
    j1 = plan.grid.counts[0]
    n = plan.n_rows
    r0 = 1 - plan.lo
    vbc = vb[:, cols]
    rhs = np.zeros((n, vbc.shape[1]), np.complex128)
    if _rhs_interior is not None:
        _rhs_interior(plan.b_sub[:, cols], plan.b_dia[:, cols],
                      plan.b_sup[:, cols], vbc, rhs[r0:r0 + j1 - 1])
    else:
        rhs[r0:r0 + j1 - 1] = (plan.b_sub[:, cols] * vbc[:-2]
                               + plan.b_dia[:, cols] * vbc[1:-1]
                               + plan.b_sup[:, cols] * vbc[2:])
    if f_modes is not None:
        if plan.variant == COMPARISON_DIRICHLET:
            rhs[r0:r0 + j1 - 1] += f_modes[1:-1, cols]
        else:
            rhs[r0:r0 + j1 - 1] += f_modes[1:-1, cols] / plan.sigma[cols]
    c = plan.consts.c_hbar
    if plan.right_transparent:
        rhs[-1] = (c * _lagged(plan, hist_r, m, cols)
                   - plan.rv_edge[cols] * vbc[-1] - plan.rv_nb[cols] * vbc[-2])
    if plan.left_transparent:
        rhs[0] = (c * _lagged(plan, hist_l, m, cols)
                  - plan.rv_edge[cols] * vbc[0] - plan.rv_nb[cols] * vbc[1])

    sub = plan.a_sub[:, cols]
    inv_den = plan.inv_den[:, cols]
    cp = plan.cp[:, cols]
    y = rhs  # reuse the buffer for the forward sweep
    if _band_sweeps is not None:
        _band_sweeps(sub, inv_den, cp, y)
    else:
        y[0] *= inv_den[0]
        for r in range(1, n):
            y[r] = (y[r] - sub[r] * y[r - 1]) * inv_den[r]
        for r in range(n - 2, -1, -1):
            y[r] -= cp[r] * y[r + 1]
    return y


def step(plan, state, source=None):
    """Advance the state one level in place (and return it)."""
    m = state.level + 1
    if m > plan.grid.levels:
        raise ValueError(f"cannot step past the final level M={plan.grid.levels}")
    grid = plan.grid
    breve = plan.e_mult * state.psi
    vb = mode_analyze(breve, grid)
    f_modes = mode_analyze(np.asarray(source, np.complex128), grid) \
        if source is not None else None

    n_modes = plan.n_modes
    if plan.workers > 1 and n_modes >= 2 * plan.workers:
        edges = np.linspace(0, n_modes, plan.workers + 1).astype(int)
        blocks = [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]
        futures = [plan.pool().submit(
            _solve_block, plan, vb, state.hist_left, state.hist_right, m,
            f_modes, sl) for sl in blocks]
        u = np.concatenate([f.result() for f in futures], axis=1)
    else:
        u = _solve_block(plan, vb, state.hist_left, state.hist_right, m,
                         f_modes, slice(None))

    if plan.right_transparent:
        state.hist_right[m] = u[-1]
    if plan.left_transparent:
        state.hist_left[m] = u[0]

    ub = np.zeros((grid.counts[0] + 1, n_modes), np.complex128)
    ub[plan.lo:plan.hi + 1] = u
    tilde = mode_synthesize(ub, grid)
    psi = plan.e_mult * tilde
    if not np.all(np.isfinite(psi.view(np.float64))):
        raise NumericalError(f"non-finite field values at level {m}")
    state.psi = psi
    state.level = m
    return state


def run(plan, psi0, *, observable_stride=1, observers=(), source=None):
    """March from level 0 to M, recording observables.

    `observers` are callables invoked as observer(state) at level 0 and after
    every step; `source` (optional) maps a level m ≥ 1 to the closed-mesh free
    term F^m (or None).  Observables (mass, energies) are recorded at level 0,
    every `observable_stride` levels, and at the final level.

    Returns (final SolverState, ObservableSeries).
    """
    if not (isinstance(observable_stride, int) and observable_stride >= 1):
        raise ConfigError(f"observable_stride must be >= 1, got {observable_stride!r}")
    state = initial_state(plan, psi0)
    series = ObservableSeries()

    def record(level):
        e_kin, e_pot = energies(state.psi, plan.potential, plan.grid, plan.consts)
        series.record(level, level * plan.grid.tau,
                      mass2(state.psi, plan.grid), e_kin, e_pot)

    record(0)
    for obs in observers:
        obs(state)
    for m in range(1, plan.grid.levels + 1):
        f_m = source(m) if source is not None else None
        step(plan, state, f_m)
        if m % observable_stride == 0 or m == plan.grid.levels:
            record(m)
        for obs in observers:
            obs(state)
    return state, series
