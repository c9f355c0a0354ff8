"""Discrete sine transforms and one-axis compact stencils.

The transverse Dirichlet axes are diagonalized by the asymmetric sine pair

    forward:   c_q = (2/J) Σ_{j=1}^{J−1} u_j sin(π q j / J),   q = 1..J−1,
    inverse:   u_j = Σ_{q=1}^{J−1} c_q sin(π q j / J),

built on Σ_j sin(πqj/J) sin(πq'j/J) = (J/2) δ_qq'.  Both directions share one
kernel  raw(u)_q = Σ_j u_j sin(πqj/J),  which satisfies raw∘raw = (J/2)·Id.

When scipy is installed, raw(u) is half the native type‑I sine transform of
scipy.fft, for any J.  Otherwise, for power-of-two J the kernel is evaluated
in O(J log J) through the classic odd extension: with
E = (0, u_1..u_{J−1}, 0, −u_{J−1}..−u_1) of length 2J, FFT(E)_q = −2i·raw(u)_q.
Remaining lengths fall back to a cached O(J²) sine matrix — correct but slow,
so the fallback logs a one-time warning per length.

`apply_axis1_stencil` provides the axis‑1 building blocks of the scheme as
explicit operations on closed-mesh vectors: the second difference ∂∂̄, the
Numerov average s_N = 1 + (h²/12)∂∂̄ with weights (1/12, 5/6, 1/12), and its
one-sided halves s_N∓ with weights (1/12, 5/12) reaching left/right, so that
s_N = s_N− + s_N+ at interior nodes.
"""

from __future__ import annotations

import logging

import numpy as np

try:  # optional fast path: native DST-I for any interval count
    import scipy.fft as _scipy_fft
except ImportError:
    _scipy_fft = None

logger = logging.getLogger(__name__)

_SINE_CACHE = {}
_WARNED_LENGTHS = set()


def _sine_matrix(count):
    mat = _SINE_CACHE.get(count)
    if mat is None:
        j = np.arange(1, count)
        mat = np.sin(np.pi * np.outer(j, j) / count)
        _SINE_CACHE[count] = mat
    return mat


def _raw_batch(arr, axis):
    """raw(u)_q = Σ_j u_j sin(πqj/J) along `axis` (length J−1)."""
    arr = np.asarray(arr)
    count = arr.shape[axis] + 1
    if count < 2:
        raise ValueError("transform needs at least one interior node")
    if _scipy_fft is not None:
        return 0.5 * _scipy_fft.dst(arr, type=1, axis=axis)
    work = np.moveaxis(arr, axis, -1)
    if count & (count - 1) == 0:
        ext = np.zeros(work.shape[:-1] + (2 * count,), np.complex128)
        ext[..., 1:count] = work
        ext[..., count + 1:] = -work[..., ::-1]
        out = 0.5j * np.fft.fft(ext, axis=-1)[..., 1:count]
        if not np.iscomplexobj(arr):
            out = out.real
    else:
        if count not in _WARNED_LENGTHS:
            _WARNED_LENGTHS.add(count)
            logger.warning(
                "interval count J=%d is not a power of two: transverse "
                "transforms use the direct O(J^2) path", count)
        out = work @ _sine_matrix(count)
    return np.moveaxis(out, -1, axis)


def dst_forward(vec, axis=-1):
    """Forward sine coefficients (2/J)·raw(u); input has the J−1 interior
    values along `axis`."""
    vec = np.asarray(vec)
    count = vec.shape[axis] + 1
    return (2.0 / count) * _raw_batch(vec, axis)


def dst_inverse(coeffs, axis=-1):
    """Inverse of `dst_forward` (the plain kernel raw(c))."""
    return _raw_batch(coeffs, axis)


def mode_analyze(values, grid):
    """Transverse sine coefficients of a closed-mesh field.

    The field must vanish on every transverse Dirichlet face.  Axis 1 is left
    untouched; each transverse axis k is reduced to its J_k−1 interior nodes
    and transformed, giving shape (J1+1, J2−1, …, Jn−1).
    """
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"field shape {values.shape} != mesh shape {grid.shape}")
    n = grid.n
    for k in range(1, n):
        sl = [slice(None)] * n
        for face in (0, grid.counts[k]):
            sl[k] = face
            if np.any(values[tuple(sl)] != 0):
                raise ValueError(
                    f"field does not vanish on the transverse face j{k + 1}={face}")
    out = values
    for k in range(1, n):
        sl = [slice(None)] * n
        sl[k] = slice(1, grid.counts[k])
        out = dst_forward(out[tuple(sl)], axis=k)
    return out


def mode_synthesize(coeffs, grid):
    """Inverse of `mode_analyze`: rebuild the closed-mesh field (zero faces)."""
    n = grid.n
    out = np.asarray(coeffs)
    for k in range(1, n):
        out = dst_inverse(out, axis=k)
    full = np.zeros(grid.shape, np.complex128)
    sl = tuple([slice(None)] + [slice(1, grid.counts[k]) for k in range(1, n)])
    full[sl] = out
    return full


_STENCILS = ("second_diff", "numerov_avg", "numerov_avg_left",
             "numerov_avg_right")


def apply_axis1_stencil(op, u, h):
    """Apply one axis‑1 stencil to a closed-mesh vector u of length J+1.

    op values and the range of the result:

    - 'second_diff':        (u_{j−1} − 2u_j + u_{j+1})/h²,     j = 1..J−1
    - 'numerov_avg':        u_j·5/6 + (u_{j−1} + u_{j+1})/12,  j = 1..J−1
    - 'numerov_avg_left':   u_j·5/12 + u_{j−1}/12,             j = 1..J
    - 'numerov_avg_right':  u_j·5/12 + u_{j+1}/12,             j = 0..J−1
    """
    u = np.asarray(u)
    if u.shape[0] < 3:
        raise ValueError("need at least 3 nodes along axis 1")
    if op == "second_diff":
        return (u[:-2] - 2.0 * u[1:-1] + u[2:]) / h ** 2
    if op == "numerov_avg":
        return u[1:-1] * (5.0 / 6.0) + (u[:-2] + u[2:]) / 12.0
    if op == "numerov_avg_left":
        return u[1:] * (5.0 / 12.0) + u[:-1] / 12.0
    if op == "numerov_avg_right":
        return u[:-1] * (5.0 / 12.0) + u[1:] / 12.0
    raise ValueError(f"unknown stencil {op!r}; expected one of {_STENCILS}")
