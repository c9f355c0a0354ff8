"""Meshes, wave fields, physical constants, initial packets, sampled potentials.

The solver works on a rectangular strip [0, X1] × [0, X2] × … × [0, Xn] carrying
the closed uniform mesh

    x_j = (j1·h1, …, jn·hn),   h_k = X_k/J_k,   0 ≤ j_k ≤ J_k,

together with the uniform time mesh t_m = m·τ, 0 ≤ m ≤ M.  Axis 1 is the
distinguished direction: its edges are either hard Dirichlet walls or artificial
boundaries closed by discrete transparent boundary conditions (see `tbc`).  All
transverse faces (j_k ∈ {0, J_k}, k ≥ 2) are homogeneous Dirichlet walls.

Potentials V(x) are sampled onto the closed mesh and must level off to the
constant V∞ near the axis‑1 edges for the transparent boundaries to be exact;
`sample_potential` enforces that by clamping the outermost axis‑1 layers and
recording the support bound X0 beyond which V − Ṽ vanishes.  Ṽ(x1) is the
axis‑1 profile kept inside the implicit step; the remainder dV = V − Ṽ is
applied through exact unimodular phase factors (see `stepper`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

# Modulus below which a sampled packet is considered numerically absent from the
# boundary layers it gets zeroed on (a louder presence logs a warning).
PACKET_EDGE_TOL = 1e-12
# |V - Ṽ| threshold used to infer the support bound X0.
SUPPORT_EPS = 1e-14

DIRICHLET = "dirichlet"
TRANSPARENT = "tbc"


@dataclass(frozen=True)
class PhysicalConstants:
    """ħ and c_ħ = ħ²/(2m₀) for  iħ ∂Ψ/∂t = −c_ħ ΔΨ + V Ψ."""

    hbar: float = 1.0
    c_hbar: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise ConfigError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.c_hbar > 0.0 and math.isfinite(self.c_hbar)):
            raise ConfigError(f"c_hbar must be positive and finite, got {self.c_hbar}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform space-time mesh of the strip.

    Attributes
    ----------
    extents : tuple of float
        (X1, …, Xn), all positive.  n ≥ 2.
    counts : tuple of int
        (J1, …, Jn), all ≥ 2; closed-mesh arrays have shape (J1+1, …, Jn+1).
    tau : float
        Time step τ > 0 (uniform).
    levels : int
        Number of time levels M ≥ 0; final time T = M·τ.
    left_boundary : str
        'dirichlet' (semi-infinite variant: wall at x1 = 0) or 'tbc'
        (infinite variant: transparent boundary at x1 = 0).  The right edge
        x1 = X1 is closed by the scheme variant (see `stepper`).
    """

    extents: tuple
    counts: tuple
    tau: float
    levels: int
    left_boundary: str = DIRICHLET

    def __post_init__(self):
        n = len(self.extents)
        if n < 2:
            raise ConfigError(f"need at least 2 axes (one transverse), got n={n}")
        if len(self.counts) != n:
            raise ConfigError(
                f"counts has {len(self.counts)} entries for {n} extents"
            )
        for k, (ext, cnt) in enumerate(zip(self.extents, self.counts), start=1):
            if not (ext > 0.0 and math.isfinite(ext)):
                raise ConfigError(f"extent{k} must be positive and finite, got {ext}")
            if not (isinstance(cnt, int) and cnt >= 2):
                raise ConfigError(f"count{k} must be an integer >= 2, got {cnt!r}")
        if not (self.tau > 0.0 and math.isfinite(self.tau)):
            raise ConfigError(f"tau must be positive and finite, got {self.tau}")
        if not (isinstance(self.levels, int) and self.levels >= 0):
            raise ConfigError(f"levels must be an integer >= 0, got {self.levels!r}")
        if self.left_boundary not in (DIRICHLET, TRANSPARENT):
            raise ConfigError(
                f"left_boundary must be '{DIRICHLET}' or '{TRANSPARENT}',"
                f" got {self.left_boundary!r}"
            )

    @property
    def n(self):
        return len(self.extents)

    @property
    def steps(self):
        return tuple(x / j for x, j in zip(self.extents, self.counts))

    @property
    def final_time(self):
        return self.levels * self.tau

    @property
    def shape(self):
        """Closed-mesh array shape (J1+1, …, Jn+1)."""
        return tuple(j + 1 for j in self.counts)


def build_grid(*, extents, counts, levels, tau=None, final_time=None,
               left_boundary=DIRICHLET):
    """Validate raw parameters and build a `GridSpec`.

    Exactly one of `tau` and `final_time` must be given; with `final_time`,
    τ = T/M (so `levels` must be ≥ 1).
    """
    if (tau is None) == (final_time is None):
        raise ConfigError("specify exactly one of tau and final_time")
    if final_time is not None:
        if not (isinstance(levels, int) and levels >= 1):
            raise ConfigError("final_time requires levels >= 1")
        if not (final_time > 0.0 and math.isfinite(final_time)):
            raise ConfigError(f"final_time must be positive, got {final_time}")
        tau = final_time / levels
    return GridSpec(
        extents=tuple(float(x) for x in extents),
        counts=tuple(int(j) for j in counts),
        tau=float(tau),
        levels=levels,
        left_boundary=left_boundary,
    )


def axis_coords(grid, axis):
    """Closed-mesh node coordinates along one axis (0-based axis index)."""
    return np.linspace(0.0, grid.extents[axis], grid.counts[axis] + 1)


@dataclass
class WaveField:
    """Complex field on the closed mesh at one time level."""

    values: np.ndarray
    level: int = 0
    notes: dict = field(default_factory=dict)

    def clone(self):
        return WaveField(self.values.copy(), self.level, dict(self.notes))


def _edge_layers(grid):
    """Axis-1 layers forced to zero in initial data: support layers next to the
    artificial right edge, and next to the left edge when it is transparent."""
    j1 = grid.counts[0]
    left = (0, 1) if grid.left_boundary == TRANSPARENT else (0,)
    right = (j1 - 1, j1)
    return left, right


def gaussian_packet(grid, *, wave_number, width, center):
    """Sample the Gaussian beam  exp{ik(x1−c1) − |x−c|²/(4·width)}  on the mesh.

    Parameters
    ----------
    grid : GridSpec
    wave_number : float
        Carrier wavenumber k along axis 1.
    width : float
        Variance-like width parameter (α > 0); packet st.dev. is √(2·width).
    center : sequence of float
        Packet center c = (c1, …, cn), strictly inside the strip.

    Returns
    -------
    WaveField
        Level-0 field, forced to zero on all Dirichlet faces and on the axis‑1
        edge layers that the boundary treatment requires to be empty
        (j1 ∈ {J1−1, J1}; also j1 ∈ {0, 1} for a transparent left edge).  The
        pre-zeroing maxima on those layers are recorded in ``notes``; a value
        above 1e−12 additionally logs a warning, since it means the packet
        meaningfully touches an artificial boundary at t = 0.
    """
    n = grid.n
    center = tuple(float(c) for c in center)
    if len(center) != n:
        raise ConfigError(f"center has {len(center)} entries for {n} axes")
    if not (width > 0.0 and math.isfinite(width)):
        raise ConfigError(f"packet width must be positive, got {width}")
    for k, c in enumerate(center):
        if not (0.0 < c < grid.extents[k]):
            raise ConfigError(
                f"packet center coordinate {k + 1} = {c} lies outside (0, X{k + 1})"
            )

    x1 = axis_coords(grid, 0)
    factor1 = np.exp(1j * wave_number * (x1 - center[0])
                     - (x1 - center[0]) ** 2 / (4.0 * width))
    vals = factor1.reshape((-1,) + (1,) * (n - 1)).astype(np.complex128)
    for k in range(1, n):
        xk = axis_coords(grid, k)
        fk = np.exp(-(xk - center[k]) ** 2 / (4.0 * width))
        vals = vals * fk.reshape((1,) * k + (-1,) + (1,) * (n - 1 - k))

    notes = {}
    left, right = _edge_layers(grid)
    for name, layers in (("left", left), ("right", right)):
        peak = max(float(np.max(np.abs(vals[j]))) for j in layers)
        notes[f"{name}_edge_modulus"] = peak
        if peak > PACKET_EDGE_TOL:
            logger.warning(
                "initial packet has modulus %.3e on the %s axis-1 edge layers "
                "(zeroed); it is not negligible there at t = 0", peak, name)
        for j in layers:
            vals[j] = 0.0
    for k in range(1, n):
        sl = [slice(None)] * n
        for j in (0, grid.counts[k]):
            sl[k] = j
            vals[tuple(sl)] = 0.0

    return WaveField(vals, level=0, notes=notes)


# --- potentials ------------------------------------------------------------

@dataclass(frozen=True)
class PoschlTellerPotential:
    """Attractive/repulsive sech² profile along axis 1:
    V(x) = α0²·c1 / cosh²(α0(x1 − x1*)), constant transversally."""

    alpha0: float
    c1: float
    x1_star: float


@dataclass(frozen=True)
class RectangularPotential:
    """Node-averaged indicator of the open rectangle (x1_min, x1_max) ×
    (x2_min, x2_max) times `strength`: full value inside, half on open edges,
    quarter at the vertices, zero outside.  n = 2 only; vertices must lie on
    mesh nodes."""

    x1_min: float
    x1_max: float
    x2_min: float
    x2_max: float
    strength: float


@dataclass(frozen=True)
class NoPotential:
    """V ≡ V∞ (free motion up to a constant background)."""


@dataclass
class PotentialField:
    """Sampled potential data on the closed mesh.

    v : full potential V on the mesh;  v_tilde : axis‑1 profile Ṽ(x1) kept in
    the implicit step;  v_inf : limit value V∞ near the axis‑1 edges;
    dv = V − Ṽ : remainder handled by phase factors;  x0_bound : smallest X0
    with |dV| < 1e−14 on every node with x1 ≥ X0 (always ≤ X1 − 2h1).
    """

    v: np.ndarray
    v_tilde: np.ndarray
    v_inf: float
    dv: np.ndarray
    x0_bound: float


def _axis_fraction(coords, lo, hi, h, axis_name):
    """Per-axis measure fraction of the open interval (lo, hi): 1 strictly
    inside, 1/2 at an endpoint, 0 outside.  Endpoints must be mesh nodes."""
    frac = np.zeros_like(coords)
    for edge in (lo, hi):
        j = round(edge / h)
        if abs(edge - j * h) > 1e-9 * max(h, abs(edge)):
            raise ConfigError(
                f"rectangle vertex coordinate {axis_name} = {edge} does not lie "
                f"on the mesh (nearest node {j * h})"
            )
    frac[(coords > lo) & (coords < hi)] = 1.0
    frac[np.isclose(coords, lo, rtol=0.0, atol=1e-9 * max(h, abs(lo)))] = 0.5
    frac[np.isclose(coords, hi, rtol=0.0, atol=1e-9 * max(h, abs(hi)))] = 0.5
    return frac


def _tilde_profile(grid, v_inf, v_tilde_steps):
    """Piecewise-constant Ṽ(x1) from [(x, value), …]; value applies for
    x1 >= x.  Default: 0 when V∞ = 0, else the constant V∞."""
    x1 = axis_coords(grid, 0)
    if v_tilde_steps is None:
        return np.full_like(x1, v_inf) if v_inf != 0.0 else np.zeros_like(x1)
    prof = np.zeros_like(x1)
    for x_from, value in sorted(v_tilde_steps):
        prof[x1 >= x_from - 1e-12 * max(1.0, abs(x_from))] = value
    return prof


def sample_potential(spec, grid, *, v_inf=0.0, v_tilde_steps=None,
                     support_tol=1e-6):
    """Sample a potential onto the closed mesh and prepare the split data.

    The sampled field is V∞ plus the profile described by `spec`.  The three
    outermost axis‑1 layers at the right edge — and the two at the left edge
    when it is transparent — are clamped to exactly V∞, which the transparent
    boundary theory requires; if the raw samples deviate from V∞ there by more
    than `support_tol`, the potential genuinely reaches the artificial boundary
    and a ConfigError is raised instead of silently truncating it.

    Returns a `PotentialField` with Ṽ from `v_tilde_steps` (see
    `_tilde_profile`), dV = V − Ṽ, and the inferred support bound X0.
    """
    n = grid.n
    shape = grid.shape
    x1 = axis_coords(grid, 0)

    if isinstance(spec, NoPotential):
        v = np.full(shape, float(v_inf))
    elif isinstance(spec, PoschlTellerPotential):
        prof = spec.alpha0 ** 2 * spec.c1 / np.cosh(
            spec.alpha0 * (x1 - spec.x1_star)) ** 2
        v = v_inf + np.broadcast_to(
            prof.reshape((-1,) + (1,) * (n - 1)), shape).copy()
    elif isinstance(spec, RectangularPotential):
        if n != 2:
            raise ConfigError("rectangular potential supports n = 2 only")
        if not (spec.x1_min < spec.x1_max and spec.x2_min < spec.x2_max):
            raise ConfigError("rectangle bounds must satisfy min < max on both axes")
        h1, h2 = grid.steps
        f1 = _axis_fraction(x1, spec.x1_min, spec.x1_max, h1, "x1")
        f2 = _axis_fraction(axis_coords(grid, 1), spec.x2_min, spec.x2_max,
                            h2, "x2")
        v = v_inf + spec.strength * np.outer(f1, f2)
    else:
        raise ConfigError(f"unknown potential spec {type(spec).__name__}")

    j1 = grid.counts[0]
    clamp_rows = [j1 - 2, j1 - 1, j1]
    if grid.left_boundary == TRANSPARENT:
        clamp_rows += [0, 1]
    worst = max(float(np.max(np.abs(v[r] - v_inf))) for r in clamp_rows)
    if worst > support_tol:
        raise ConfigError(
            f"potential deviates from v_inf by {worst:.3e} on the axis-1 edge "
            f"layers (tolerance {support_tol:.1e}); it must level off before "
            "the artificial boundary"
        )
    for r in clamp_rows:
        v[r] = v_inf

    v_tilde = _tilde_profile(grid, v_inf, v_tilde_steps)
    edge_dev = max(abs(float(v_tilde[r]) - v_inf) for r in clamp_rows)
    if edge_dev > 1e-12 * max(1.0, abs(v_inf)):
        raise ConfigError(
            f"v_tilde must equal v_inf = {v_inf} on the axis-1 edge layers "
            f"(found deviation {edge_dev:.3e})"
        )

    dv = v - v_tilde.reshape((-1,) + (1,) * (n - 1))
    row_peak = np.abs(dv).reshape(shape[0], -1).max(axis=1)
    inside = np.nonzero(row_peak >= SUPPORT_EPS)[0]
    i0 = int(inside[-1]) + 1 if inside.size else 0
    x0_bound = i0 * grid.steps[0]
    # The clamp above makes the last two rows dV-free, so X0 <= X1 - 2h1.
    assert x0_bound <= grid.extents[0] - 2.0 * grid.steps[0] + 1e-12

    return PotentialField(v=v, v_tilde=v_tilde, v_inf=float(v_inf), dv=dv,
                          x0_bound=x0_bound)


def extend_axis1(grid, potential, psi0, factor=3):
    """Embed a run into an axis‑1 box enlarged `factor`× on both sides.

    Used to build the Dirichlet surrogate that a transparent-boundary run is
    checked against: the potential is extended by the constant V∞ (never
    resampled) and the initial field is zero-padded, so both runs discretize
    identical data on the shared nodes.  `factor` must be an odd integer ≥ 3 so
    the padding is a whole number of original axis‑1 spans on each side.

    Returns (grid_ext, potential_ext, psi0_ext, offset) where `offset` is the
    axis‑1 index of the original x1 = 0 node inside the extended mesh.
    """
    if not (isinstance(factor, int) and factor >= 3 and factor % 2 == 1):
        raise ConfigError(f"enlargement factor must be an odd integer >= 3, got {factor}")
    j1 = grid.counts[0]
    pad = (factor - 1) // 2 * j1
    grid_ext = GridSpec(
        extents=(factor * grid.extents[0],) + grid.extents[1:],
        counts=(factor * j1,) + grid.counts[1:],
        tau=grid.tau,
        levels=grid.levels,
        left_boundary=DIRICHLET,
    )

    v_ext = np.full(grid_ext.shape, potential.v_inf)
    v_ext[pad:pad + j1 + 1] = potential.v
    vt_ext = np.full(grid_ext.shape[0], potential.v_inf)
    vt_ext[pad:pad + j1 + 1] = potential.v_tilde
    dv_ext = v_ext - vt_ext.reshape((-1,) + (1,) * (grid.n - 1))
    row_peak = np.abs(dv_ext).reshape(grid_ext.shape[0], -1).max(axis=1)
    inside = np.nonzero(row_peak >= SUPPORT_EPS)[0]
    i0 = int(inside[-1]) + 1 if inside.size else 0
    pot_ext = PotentialField(v=v_ext, v_tilde=vt_ext, v_inf=potential.v_inf,
                             dv=dv_ext, x0_bound=i0 * grid.steps[0])

    vals = np.zeros(grid_ext.shape, np.complex128)
    vals[pad:pad + j1 + 1] = psi0.values
    psi_ext = WaveField(vals, level=psi0.level, notes={"embedded_offset": pad})
    return grid_ext, pot_ext, psi_ext, pad
