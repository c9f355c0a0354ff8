"""Mesh inner products, energies, error norms, and scheme identities.

All quantities live on the closed mesh of `grid_core.GridSpec`.  The working
inner product is the trapezoid-flavor mesh product

    (U, W)_ω̃h = Σ' U_j conj(W_j) · h1⋯hn,

where Σ' runs over transverse interior indices (1 ≤ j_k ≤ J_k−1, k ≥ 2) and
over axis‑1 nodes 1..J1 for a left Dirichlet wall — the j1 = J1 trace always
participates with full weight, and so does j1 = 0 when the left edge is
transparent.  ‖·‖_ω̃h is the induced norm; the solution mass is its square.

`summation_identity_residual` checks the discrete summation-by-parts identity
behind the stability theory of the double-splitting step (n = 2): with
D = (Ψ̃−Ψ̆)/τ, S = (Ψ̃+Ψ̆)/2, and any trial field W vanishing on the left wall
and the transverse walls,

    (iħ s̄_N D + c_ħ Δ̄_hN S − s̄_N(Ṽ S), W)_ωh − (D_1h, W_{J1})_{ω_h1̂}
  = (U', W)_{m2} − c_ħ (s_N2 ∂̄₁S, ∂̄₁W)_ω̃h,

where U' = iħ s_N2 D + c_ħ ∂₂∂̄₂ S − Ṽ s_N2 S,
      D_1h = c_ħ s_N2 ∂̄₁S|_{J1} − h1·s_N1⁻U'|_{J1},
      (A, W)_{m2} = (s_N1 A, W)_ωh + (s_N1⁻A|_{J1}, W_{J1})_{ω_h1̂} h1.

Taking W = S and the imaginary part collapses the right side to the
mass-balance statement the scheme's conservation properties rest on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid_core import TRANSPARENT


def _axis1_start(grid):
    return 0 if grid.left_boundary == TRANSPARENT else 1


def _tilde_slices(grid):
    """Index tuple selecting the ω̃h summation window of a closed array."""
    sl = [slice(_axis1_start(grid), grid.counts[0] + 1)]
    sl += [slice(1, grid.counts[k]) for k in range(1, grid.n)]
    return tuple(sl)


def inner_product_tilde(u, w, grid):
    """(U, W)_ω̃h (complex)."""
    u = np.asarray(u)
    w = np.asarray(w)
    if u.shape != grid.shape or w.shape != grid.shape:
        raise ValueError("fields must live on the closed mesh of this grid")
    window = _tilde_slices(grid)
    weight = float(np.prod(grid.steps))
    return complex(np.sum(u[window] * np.conj(w[window])) * weight)


def norm_tilde(u, grid):
    """‖U‖_ω̃h (real)."""
    u = np.asarray(u)
    window = _tilde_slices(grid)
    weight = float(np.prod(grid.steps))
    return float(np.sqrt(np.sum(np.abs(u[window]) ** 2) * weight))


def mass2(u, grid):
    """Squared solution mass ‖U‖²_ω̃h."""
    return norm_tilde(u, grid) ** 2


def energies(u, potential, grid, consts):
    """(E_kin, E_pot) of a closed-mesh field (n = 2).

    E_kin = c_ħ ( Σ_{j1=1..J1, j2=1..J2−1} |∂̄₁Ψ|²
                + Σ_{j1=1..J1, j2=1..J2}   |∂̄₂Ψ|² ) h1 h2,
    E_pot = (VΨ, Ψ)_ω̃h.
    """
    if grid.n != 2:
        raise ValueError("energies are implemented for n = 2")
    u = np.asarray(u)
    if u.shape != grid.shape:
        raise ValueError("field must live on the closed mesh of this grid")
    h1, h2 = grid.steps
    d1 = np.diff(u, axis=0) / h1          # rows j1 = 1..J1
    d2 = np.diff(u, axis=1) / h2          # cols j2 = 1..J2
    e_kin = consts.c_hbar * h1 * h2 * (
        np.sum(np.abs(d1[:, 1:-1]) ** 2) + np.sum(np.abs(d2[1:, :]) ** 2))
    e_pot = inner_product_tilde(potential.v * u, u, grid).real
    return float(e_kin), float(e_pot)


def difference_norms(a, b, grid):
    """(E_C, E_L2) of the difference of two closed-mesh fields on one grid:
    the pointwise max over all nodes and the ω̃h norm."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != grid.shape or b.shape != grid.shape:
        raise ValueError("fields must live on the closed mesh of this grid")
    diff = a - b
    return float(np.max(np.abs(diff))), norm_tilde(diff, grid)


def convergence_ratios(errors):
    """Ratios e_{i−1}/e_i down a refinement ladder; None where undefined
    (first row, or a vanishing denominator)."""
    out = [None]
    for prev, cur in zip(errors, errors[1:]):
        out.append(prev / cur if cur else None)
    return out


# --- summation-by-parts identity (n = 2) ------------------------------------

def _sn(a, axis):
    """Numerov average along `axis`, interior nodes."""
    lo = [slice(None)] * a.ndim
    mid = [slice(None)] * a.ndim
    hi = [slice(None)] * a.ndim
    lo[axis], mid[axis], hi[axis] = slice(0, -2), slice(1, -1), slice(2, None)
    return a[tuple(mid)] * (5.0 / 6.0) + (a[tuple(lo)] + a[tuple(hi)]) / 12.0


def _d2(a, axis, h):
    lo = [slice(None)] * a.ndim
    mid = [slice(None)] * a.ndim
    hi = [slice(None)] * a.ndim
    lo[axis], mid[axis], hi[axis] = slice(0, -2), slice(1, -1), slice(2, None)
    return (a[tuple(lo)] - 2.0 * a[tuple(mid)] + a[tuple(hi)]) / h ** 2


def summation_identity_sides(u, v, w, grid, consts, v_tilde=None):
    """Both sides (LHS, RHS) of the summation-by-parts identity for the pair
    (Ψ̃, Ψ̆) = (u, v) and trial field w; see the module docstring.

    w must vanish on the left wall (j1 = 0) and the transverse walls.
    """
    if grid.n != 2:
        raise ValueError("the identity is implemented for n = 2")
    u = np.asarray(u, np.complex128)
    v = np.asarray(v, np.complex128)
    w = np.asarray(w, np.complex128)
    for arr in (u, v, w):
        if arr.shape != grid.shape:
            raise ValueError("fields must live on the closed mesh of this grid")
    if np.any(w[0] != 0) or np.any(w[:, 0] != 0) or np.any(w[:, -1] != 0):
        raise ValueError("trial field must vanish on the left and transverse walls")

    h1, h2 = grid.steps
    hbar, c = consts.hbar, consts.c_hbar
    j1 = grid.counts[0]
    vt = (np.zeros(j1 + 1) if v_tilde is None
          else np.asarray(v_tilde, float)).reshape(-1, 1)

    d = (u - v) / grid.tau
    s = (u + v) / 2.0
    sn2_d = _sn(d, 1)
    sn2_s = _sn(s, 1)
    sn2_vs = _sn(vt * s, 1)
    d22_s = _d2(s, 1, h2)
    w_int = w[:, 1:-1]

    # volume residual of the full split operator, tested against w on ω_h
    residual = (1j * hbar * _sn(sn2_d, 0)
                + c * (_d2(sn2_s, 0, h1) + _sn(d22_s, 0))
                - _sn(sn2_vs, 0))
    lhs = h1 * h2 * np.sum(residual * np.conj(w_int[1:-1]))

    u_prime = 1j * hbar * sn2_d + c * d22_s - sn2_vs
    d1h = (c * (sn2_s[j1] - sn2_s[j1 - 1]) / h1
           - h1 * (u_prime[j1] * (5.0 / 12.0) + u_prime[j1 - 1] / 12.0))
    lhs -= h2 * np.sum(d1h * np.conj(w_int[j1]))

    # integrated-by-parts form
    rhs = h1 * h2 * np.sum(_sn(u_prime, 0) * np.conj(w_int[1:-1]))
    rhs += h1 * h2 * np.sum(
        (u_prime[j1] * (5.0 / 12.0) + u_prime[j1 - 1] / 12.0)
        * np.conj(w_int[j1]))
    grad_s = np.diff(sn2_s, axis=0) / h1        # s_N2 ∂̄₁S on j1 = 1..J1
    grad_w = np.diff(w_int, axis=0) / h1
    rhs -= c * h1 * h2 * np.sum(grad_s * np.conj(grad_w))
    return complex(lhs), complex(rhs)


def summation_identity_residual(u, v, w, grid, consts, v_tilde=None):
    """|LHS − RHS| of the summation-by-parts identity."""
    lhs, rhs = summation_identity_sides(u, v, w, grid, consts, v_tilde)
    return abs(lhs - rhs)


def inner_product_numerov_trace(u, w, grid):
    """The trace-weighted compact product
    (U, W)_{m2} = (s_N1 U, W)_ωh + (s_N1⁻U|_{J1}, W|_{J1})_{ω_h1̂} h1  (n = 2),
    Hermitian and positive definite on fields vanishing at j1 = 0 and on the
    transverse walls."""
    if grid.n != 2:
        raise ValueError("implemented for n = 2")
    u = np.asarray(u, np.complex128)
    w = np.asarray(w, np.complex128)
    h1, h2 = grid.steps
    j1 = grid.counts[0]
    u_int = u[:, 1:-1]
    w_int = w[:, 1:-1]
    total = h1 * h2 * np.sum(_sn(u_int, 0) * np.conj(w_int[1:-1]))
    total += h1 * h2 * np.sum(
        (u_int[j1] * (5.0 / 12.0) + u_int[j1 - 1] / 12.0) * np.conj(w_int[j1]))
    return complex(total)


@dataclass
class ObservableSeries:
    """Per-level observables recorded during a run."""

    levels: list = field(default_factory=list)
    times: list = field(default_factory=list)
    mass2: list = field(default_factory=list)
    e_kin: list = field(default_factory=list)
    e_pot: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def record(self, level, time, mass2_value, e_kin, e_pot, **extra):
        self.levels.append(level)
        self.times.append(time)
        self.mass2.append(mass2_value)
        self.e_kin.append(e_kin)
        self.e_pot.append(e_pot)
        for key, value in extra.items():
            self.extras.setdefault(key, []).append(value)

    def columns(self):
        cols = {"level": self.levels, "time": self.times, "mass2": self.mass2,
                "e_kin": self.e_kin, "e_pot": self.e_pot}
        cols.update(self.extras)
        return cols
