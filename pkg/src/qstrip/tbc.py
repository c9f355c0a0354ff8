"""Discrete transparent boundary conditions for the Numerov–Crank–Nicolson step.

Outside the computational window the potential is the constant V∞ (shifted per
transverse mode, see `shifted_limit_potential`), and the exterior solution of
the implicit compact scheme can be eliminated exactly.  What remains on each
artificial edge is a discrete convolution in time,

    flux functional of (Ψ̃, Ψ̆) at the edge  =  c_ħ (R ∗ Ψ̃_edge)^m,

whose kernel R^m depends only on (V∞q, τ, h1, ħ, c_ħ) through

    a  = V∞q/(2c_ħ) + i·ħ/(τ c_ħ)          (Im a = ħ/(τ c_ħ) > 0)
    α  = 2a + (2/3) h1² a²,   θ = arg α ∈ (0, 2π]
    β  = 2 Re a + (2/3) h1² |a|²
    c1 = −(|α|^{1/2}/2) e^{−iθ/2},   ϰ = −e^{iθ},   μ = β/|α|.

|α|² − β² = 4 (Im a)² > 0, so μ ∈ (−1, 1) always; the kernel is the coefficient
sequence of the generating function  R(z) = c1·√(1 − 2μϰz + ϰ²z²), computed by
the stable three-term recurrence

    R⁰ = c1,   R¹ = −c1 ϰ μ,
    R^m = ((2m−3)/m) ϰμ R^{m−1} − ((m−3)/m) ϰ² R^{m−2},   m ≥ 2,

whose terms stay bounded by a small multiple of |c1| (they decay like m^{−3/2}
in modulus).  Im R⁰ = (|α|^{1/2}/2) sin(θ/2) ≥ 0, the discrete accretivity
property that makes the closed scheme non-expansive.

`boundary_row` assembles the resulting edge equation for one transverse mode:
with u the unknown level, v the known level, edge node e and interior neighbor
b (e, b) = (J1, J1−1) on the right or (0, 1) on the left,

    [c_ħ/(2h1) − h1·(5/12)(iħ/τ − V∞q/2) − c_ħ R⁰] u_e
  + [−c_ħ/(2h1) − h1·(1/12)(iħ/τ − V∞q/2)] u_b
  = c_ħ Σ_{p=1}^m R^p u_e^{m−p}
    − [c_ħ/(2h1) + h1·(5/12)(iħ/τ + V∞q/2)] v_e
    − [−c_ħ/(2h1) + h1·(1/12)(iħ/τ + V∞q/2)] v_b,

the same algebra on both edges thanks to the mirror symmetry of the one-sided
Numerov weights (5/12, 1/12).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .spectral import transverse_eigenpair

SIDES = ("left", "right")


@dataclass(frozen=True)
class KernelCoeffs:
    """Scalar data of one edge kernel (one shifted limit potential)."""

    v_limit: float
    tau: float
    h1: float
    hbar: float
    c_hbar: float
    a: complex
    alpha: complex
    arg_alpha: float
    beta: float
    c1: complex
    kappa: complex
    mu: float


def _coeff_arrays(v_limits, tau, h1, hbar, c_hbar):
    """Vectorized (a, alpha, theta, beta, c1, kappa, mu) over limit potentials."""
    a = np.asarray(v_limits, float) / (2.0 * c_hbar) + 1j * hbar / (tau * c_hbar)
    alpha = 2.0 * a + (2.0 / 3.0) * h1 ** 2 * a * a
    beta = 2.0 * a.real + (2.0 / 3.0) * h1 ** 2 * np.abs(a) ** 2
    theta = np.angle(alpha)
    theta = np.where(theta <= 0.0, theta + 2.0 * np.pi, theta)
    c1 = -0.5 * np.sqrt(np.abs(alpha)) * np.exp(-0.5j * theta)
    kappa = -np.exp(1j * theta)
    mu = beta / np.abs(alpha)
    if np.any(np.abs(mu) >= 1.0):
        raise NumericalError(
            f"kernel parameter mu left (-1, 1): max |mu| = {np.max(np.abs(mu))} "
            f"(tau={tau}, h1={h1})")
    return a, alpha, theta, beta, c1, kappa, mu


def kernel_coefficients(v_limit, tau, h1, consts):
    """Build the `KernelCoeffs` for one shifted limit potential."""
    if not tau > 0.0:
        raise NumericalError(f"tau must be positive, got {tau}")
    if not h1 > 0.0:
        raise NumericalError(f"h1 must be positive, got {h1}")
    a, alpha, theta, beta, c1, kappa, mu = _coeff_arrays(
        np.array([v_limit]), tau, h1, consts.hbar, consts.c_hbar)
    return KernelCoeffs(
        v_limit=float(v_limit), tau=tau, h1=h1, hbar=consts.hbar,
        c_hbar=consts.c_hbar, a=complex(a[0]), alpha=complex(alpha[0]),
        arg_alpha=float(theta[0]), beta=float(beta[0]), c1=complex(c1[0]),
        kappa=complex(kappa[0]), mu=float(mu[0]))


@dataclass
class KernelTable:
    """Kernel coefficients R⁰..R^{m_max} for one shifted limit potential."""

    coeffs: KernelCoeffs
    values: np.ndarray

    @property
    def m_max(self):
        return len(self.values) - 1


def _recurrence_tail(values, kappa, mu, m_target):
    """Extend a kernel value array in place-style (returns the new array)."""
    start = len(values)
    out = np.empty(m_target + 1, np.complex128)
    out[:start] = values
    if start <= 1 and m_target >= 1:
        out[1] = -out[0] * kappa * mu
        start = 2
    kmu = kappa * mu
    k2 = kappa * kappa
    for m in range(max(start, 2), m_target + 1):
        out[m] = ((2 * m - 3) / m) * kmu * out[m - 1] \
            - ((m - 3) / m) * k2 * out[m - 2]
    return out


def kernel_table(coeffs, m_max=0):
    """Fresh table of R⁰..R^{m_max}."""
    values = _recurrence_tail(np.array([coeffs.c1]), coeffs.kappa, coeffs.mu,
                              m_max)
    return KernelTable(coeffs=coeffs, values=values)


def kernel_extend(table, m_target):
    """Grow a table to cover R^{m_target}; existing entries are reused, never
    recomputed.  Returns the input table unchanged if it is already long enough."""
    if m_target <= table.m_max:
        return table
    values = _recurrence_tail(table.values, table.coeffs.kappa,
                              table.coeffs.mu, m_target)
    return KernelTable(coeffs=table.coeffs, values=values)


def kernel_matrix(v_limits, tau, h1, consts, m_max):
    """Kernels for many shifted limit potentials at once: column q of the
    returned (m_max+1, Q) array is the kernel for v_limits[q].  Duplicate
    limits are computed once."""
    v_limits = np.asarray(v_limits, float)
    uniq, inverse = np.unique(v_limits, return_inverse=True)
    _, _, _, _, c1, kappa, mu = _coeff_arrays(uniq, tau, h1, consts.hbar,
                                              consts.c_hbar)
    r = np.empty((m_max + 1, len(uniq)), np.complex128)
    r[0] = c1
    if m_max >= 1:
        r[1] = -c1 * kappa * mu
    kmu = kappa * mu
    k2 = kappa * kappa
    for m in range(2, m_max + 1):
        r[m] = ((2 * m - 3) / m) * kmu * r[m - 1] \
            - ((m - 3) / m) * k2 * r[m - 2]
    return r[:, inverse]


def shifted_limit_potential(mode, grid, v_inf, consts):
    """Per-mode limit potential V∞q = V∞ + c_ħ Σ_{k≥2} λ_{q_k}/σ_{q_k}.

    `mode` collects the transverse indices (q_2, …, q_n).  The shift is what
    the transverse part of the split scheme contributes to the axis‑1 exterior
    problem of that mode.
    """
    mode = tuple(int(q) for q in mode)
    if len(mode) != grid.n - 1:
        raise ValueError(
            f"mode has {len(mode)} entries for {grid.n - 1} transverse axes")
    shift = 0.0
    for q, count, step in zip(mode, grid.counts[1:], grid.steps[1:]):
        lam, sigma = transverse_eigenpair(q, count, step)
        shift += lam / sigma
    return float(v_inf) + consts.c_hbar * shift


@dataclass
class TraceHistory:
    """Edge-trace sequence Ψ̃_edge^0..Ψ̃_edge^m for one mode; entry 0 is zero
    because the initial data vanishes on the edge layers."""

    values: list

    @classmethod
    def empty(cls):
        return cls(values=[0.0 + 0.0j])

    def append(self, value):
        self.values.append(complex(value))

    def __len__(self):
        return len(self.values)


def convolve_lagged(table, history, m):
    """Lagged part of the edge convolution, Σ_{p=1}^m R^p·trace^{m−p}.

    The instantaneous term R⁰·trace^m belongs to the system matrix (the trace
    at level m is the unknown), so it is deliberately excluded here.
    """
    if m < 1:
        return 0.0 + 0.0j
    if table.m_max < m:
        raise ValueError(f"kernel table covers m <= {table.m_max}, need {m}")
    if len(history) < m:
        raise ValueError(f"history has {len(history)} levels, need {m}")
    hist = np.asarray(history.values[:m], np.complex128)
    return complex(np.dot(table.values[1:m + 1], hist[::-1]))


def convolve_full(kernel_values, seq):
    """(R ∗ seq)^m for m = 0..len(seq)−1 (testing/diagnostics helper)."""
    kernel_values = np.asarray(kernel_values)
    seq = np.asarray(seq)
    if len(kernel_values) < len(seq):
        raise ValueError("kernel shorter than the sequence")
    return np.convolve(kernel_values[:len(seq)], seq)[:len(seq)]


def boundary_row(side, table, v_limit_q, v_edge, v_neighbor, lagged, tau, h1,
                 consts):
    """Edge-row coefficients and right-hand side for one transverse mode.

    Parameters
    ----------
    side : 'left' or 'right'
        Which artificial edge (affects bookkeeping only; the mirror symmetry
        makes the algebra identical).
    table : KernelTable
        Kernel for this mode's shifted limit potential.
    v_limit_q : float
        The shifted limit potential V∞q; must match the table.
    v_edge, v_neighbor : complex
        Known-level values at the edge node and its interior neighbor.
    lagged : complex
        Σ_{p=1}^m R^p·trace^{m−p} from `convolve_lagged`.

    Returns
    -------
    (complex, complex, complex)
        (edge coefficient, neighbor coefficient, right-hand side) of the row
        in the unknown level.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if abs(table.coeffs.v_limit - v_limit_q) > 1e-12 * max(1.0, abs(v_limit_q)):
        raise ValueError(
            f"kernel table was built for v_limit={table.coeffs.v_limit}, "
            f"row needs {v_limit_q}")
    hbar, c = consts.hbar, consts.c_hbar
    flux = c / (2.0 * h1)
    minus = 1j * hbar / tau - 0.5 * v_limit_q   # multiplies the unknown level
    plus = 1j * hbar / tau + 0.5 * v_limit_q    # multiplies the known level
    edge = flux - h1 * (5.0 / 12.0) * minus - c * table.values[0]
    neighbor = -flux - h1 * (1.0 / 12.0) * minus
    rhs = c * lagged \
        - (flux + h1 * (5.0 / 12.0) * plus) * v_edge \
        - (-flux + h1 * (1.0 / 12.0) * plus) * v_neighbor
    return edge, neighbor, rhs
