"""Eigenvalue families of the compact-averaged mesh operators.

On the closed uniform mesh of [0, X1] × … × [0, Xn] with Dirichlet walls, the
tensor modes  e(p)_j = Π_k sin(π p_k j_k / J_k)  simultaneously diagonalize the
second differences and the fourth-order compact (Numerov) averages.  With
s2_k := sin²(π p_k h_k / (2 X_k)) = sin²(π p_k / (2 J_k)):

    −∂_k∂̄_k   →  λ_k = (2/h_k)² s2_k                (one-axis second difference)
    s_{Nk}     →  σ_k = 1 − s2_k/3  ∈ (2/3, 1)       (one-axis Numerov average)

and the assembled operators have eigenvalues

    s_N       →  lam_sN    = 1 − (1/3) Σ_k s2_k          (additive average)
    s̄_N      →  lam_sbarN = Π_k σ_k                      (split average)
    −Δ_h      →  lam_dh    = Σ_k λ_k
    −Δ_hN     →  lam_dhN   = Σ_k (1 − (1/3) Σ_{ℓ≠k} s2_ℓ) λ_k
    −Δ̄_hN    →  lam_dbarN = Σ_k (Π_{ℓ≠k} σ_ℓ) λ_k.

The split average is uniformly bounded below, (2/3)ⁿ ≤ lam_sbarN ≤ 1, and the
split Laplacian stays comparable to the plain one,
(2/3)^{n−1} lam_dh ≤ lam_dbarN ≤ lam_dh — for every n.  The additive average
does not: lam_sN ≥ 1/3 for n = 2, merely > 0 (but O(|h|²) small at the corner
mode) for n = 3, and goes negative for n ≥ 4; `spectral_survey` measures all of
this on concrete meshes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _sin2(q, count):
    """sin²(π q / (2 J)) for mode index q on a J-interval axis."""
    return np.sin(np.pi * np.asarray(q) / (2.0 * count)) ** 2


def transverse_eigenpair(q, count, step):
    """(λ_q, σ_q) of (−∂∂̄, s_N) for one Dirichlet axis.

    Parameters
    ----------
    q : int
        Mode index, 1 ≤ q ≤ J−1.
    count : int
        Interval count J of the axis.
    step : float
        Mesh step h of the axis.

    Returns
    -------
    (float, float)
        λ_q = (2/h)² sin²(πq/(2J)) ∈ (0, 4/h²) and σ_q = 1 − sin²(πq/(2J))/3,
        with σ_q ∈ (2/3, 1).
    """
    if not 1 <= q <= count - 1:
        raise ValueError(f"mode index {q} outside 1..{count - 1}")
    s2 = float(_sin2(q, count))
    return (2.0 / step) ** 2 * s2, 1.0 - s2 / 3.0


@dataclass(frozen=True)
class EigenReport:
    """All five eigenvalue families for one tensor mode."""

    mode: tuple
    lam_sN: float
    lam_sbarN: float
    lam_dh: float
    lam_dhN: float
    lam_dbarN: float


def _families(idx, sin2_ax, lam_ax):
    """Vectorized family evaluation for mode-index rows `idx` (N, n) of 0-based
    per-axis positions (mode q = idx + 1)."""
    n = idx.shape[1]
    s2 = np.stack([sin2_ax[k][idx[:, k]] for k in range(n)], axis=1)
    lam = np.stack([lam_ax[k][idx[:, k]] for k in range(n)], axis=1)
    sig = 1.0 - s2 / 3.0
    s2sum = s2.sum(axis=1)
    lam_sN = 1.0 - s2sum / 3.0
    lam_sbarN = sig.prod(axis=1)
    lam_dh = lam.sum(axis=1)
    lam_dhN = ((1.0 - (s2sum[:, None] - s2) / 3.0) * lam).sum(axis=1)
    lam_dbarN = ((lam_sbarN[:, None] / sig) * lam).sum(axis=1)
    return lam_sN, lam_sbarN, lam_dh, lam_dhN, lam_dbarN


def eigen_report(mode, counts, steps):
    """Eigenvalues of all five operators for one mode p = (p_1, …, p_n)."""
    mode = tuple(int(p) for p in mode)
    if len(mode) != len(counts):
        raise ValueError(f"mode has {len(mode)} entries for {len(counts)} axes")
    for p, j in zip(mode, counts):
        if not 1 <= p <= j - 1:
            raise ValueError(f"mode index {p} outside 1..{j - 1}")
    sin2_ax = [_sin2(np.arange(1, j), j) for j in counts]
    lam_ax = [(2.0 / h) ** 2 * s2 for h, s2 in zip(steps, sin2_ax)]
    idx = np.array([[p - 1 for p in mode]])
    vals = _families(idx, sin2_ax, lam_ax)
    return EigenReport(mode, *(float(v[0]) for v in vals))


@dataclass(frozen=True)
class SpectralSurvey:
    """Extremes of the eigenvalue families over (a sample of) all modes."""

    counts: tuple
    total_modes: int
    modes_checked: int
    enumerated: bool
    lam_sN_min: float
    lam_sN_max: float
    lam_sN_argmin: tuple
    lam_sbarN_min: float
    lam_sbarN_max: float
    ratio_dhN_min: float     # min over modes of lam_dhN / lam_dh
    ratio_dbarN_min: float   # min over modes of lam_dbarN / lam_dh
    corner_lam_sN: float     # additive-average eigenvalue at p = (J1−1, …, Jn−1)


def spectral_survey(counts, steps, *, rng=None, sample_budget=100_000,
                    enumerate_budget=2_000_000, chunk=200_000):
    """Scan the mode lattice for eigenvalue extremes.

    Enumerates every mode when the total count Π(J_k − 1) does not exceed
    `enumerate_budget`; otherwise draws `sample_budget` uniform random modes
    (deterministic for a seeded `rng`) and always includes the 2ⁿ extreme
    corners q_k ∈ {1, J_k − 1}, where the additive average is at its best and
    worst.
    """
    counts = tuple(int(j) for j in counts)
    steps = tuple(float(h) for h in steps)
    n = len(counts)
    sizes = np.array([j - 1 for j in counts], dtype=np.int64)
    total = int(sizes.prod())
    sin2_ax = [_sin2(np.arange(1, j), j) for j in counts]
    lam_ax = [(2.0 / h) ** 2 * s2 for h, s2 in zip(steps, sin2_ax)]

    enumerated = total <= enumerate_budget
    if enumerated:
        def batches():
            for start in range(0, total, chunk):
                flat = np.arange(start, min(start + chunk, total))
                yield np.stack(np.unravel_index(flat, sizes), axis=1)
        checked = total
    else:
        rng = rng or np.random.default_rng(0)

        def batches():
            corners = np.stack(np.meshgrid(
                *[np.array([0, j - 2]) for j in counts], indexing="ij"),
                axis=-1).reshape(-1, n)
            yield corners
            remaining = sample_budget
            while remaining > 0:
                m = min(chunk, remaining)
                yield np.stack([rng.integers(0, s, size=m) for s in sizes],
                               axis=1)
                remaining -= m
        checked = sample_budget + 2 ** n

    best = {
        "lam_sN_min": np.inf, "lam_sN_max": -np.inf,
        "lam_sbarN_min": np.inf, "lam_sbarN_max": -np.inf,
        "ratio_dhN_min": np.inf, "ratio_dbarN_min": np.inf,
    }
    argmin_sN = None
    for idx in batches():
        lam_sN, lam_sbarN, lam_dh, lam_dhN, lam_dbarN = _families(
            idx, sin2_ax, lam_ax)
        i = int(np.argmin(lam_sN))
        if lam_sN[i] < best["lam_sN_min"]:
            best["lam_sN_min"] = float(lam_sN[i])
            argmin_sN = tuple(int(v) + 1 for v in idx[i])
        best["lam_sN_max"] = max(best["lam_sN_max"], float(lam_sN.max()))
        best["lam_sbarN_min"] = min(best["lam_sbarN_min"], float(lam_sbarN.min()))
        best["lam_sbarN_max"] = max(best["lam_sbarN_max"], float(lam_sbarN.max()))
        best["ratio_dhN_min"] = min(best["ratio_dhN_min"],
                                    float((lam_dhN / lam_dh).min()))
        best["ratio_dbarN_min"] = min(best["ratio_dbarN_min"],
                                      float((lam_dbarN / lam_dh).min()))

    corner = eigen_report(tuple(j - 1 for j in counts), counts, steps)
    return SpectralSurvey(
        counts=counts, total_modes=total, modes_checked=checked,
        enumerated=enumerated, lam_sN_argmin=argmin_sN,
        corner_lam_sN=corner.lam_sN, **best)
