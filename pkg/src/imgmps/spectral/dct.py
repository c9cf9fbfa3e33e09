"""DCT-I and DCT-II of square grids and their mirrored-array DFT equivalents.

For a side ``N`` grid both transforms are computed in two independent ways:
directly from the cosine sums, and as (quarter-wave) DFTs of a mirrored
extension ``h`` of the grid.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "DCTExtension",
    "dct_type1",
    "idct_type1",
    "dct_type2",
    "idct_type2",
    "dct_extend_type1",
    "dct_extend_type2",
]


class DCTExtension(NamedTuple):
    """Mirrored array and its centered DFT coefficients.

    ``h[i, k]`` sits at signed position ``(b, a) = (i - off, k - off)`` and
    ``coeffs[i, k]`` at signed frequency ``(q, p)`` with the same offset.
    """

    h: np.ndarray
    coeffs: np.ndarray
    offset: int


def _square(f) -> np.ndarray:
    f = np.asarray(getattr(f, "pixels", f))
    if f.ndim != 2 or f.shape[0] != f.shape[1] or f.shape[0] < 2:
        raise ValueError(f"expected a square array with side >= 2, got {f.shape}")
    return f


def _cos1(N: int) -> np.ndarray:
    k = np.arange(N)
    return np.cos(np.pi * np.outer(k, k) / (N - 1))


def _cos2(N: int) -> np.ndarray:
    k = np.arange(N)
    return np.cos(np.pi * np.outer(k, k + 0.5) / N)


def dct_type1(f) -> np.ndarray:
    """``f_pq = (N-1)^-2 sum_ab f_ab cos(pi p a/(N-1)) cos(pi q b/(N-1)) / (w_a w_b)``
    with ``w_k = 1 + [k = 0] + [k = N-1]``; rows index q, columns p."""
    f = _square(f)
    N = f.shape[0]
    w = np.ones(N)
    w[0] = w[-1] = 2.0
    K = _cos1(N) / w[None, :] / (N - 1)
    return K @ f @ K.T


def idct_type1(coeffs) -> np.ndarray:
    """Inverse of :func:`dct_type1`."""
    c = _square(coeffs)
    N = c.shape[0]
    w = np.full(N, 2.0)
    w[0] = w[-1] = 1.0
    K = _cos1(N) * w[None, :]
    return K @ c @ K.T


def dct_type2(f) -> np.ndarray:
    """``f_pq = N^-2 sum_ab f_ab cos(pi p (a+1/2)/N) cos(pi q (b+1/2)/N)``."""
    f = _square(f)
    N = f.shape[0]
    K = _cos2(N) / N
    return K @ f @ K.T


def idct_type2(coeffs) -> np.ndarray:
    """Inverse of :func:`dct_type2`."""
    c = _square(coeffs)
    N = c.shape[0]
    w = np.full(N, 2.0)
    w[0] = 1.0
    K = _cos2(N).T * w[None, :]
    return K @ c @ K.T


def dct_extend_type1(grid) -> DCTExtension:
    """Mirror ``h_ab = f_{|a|,|b|}`` for ``a, b in [-(N-1), N-2]`` and take its DFT.

    The extension has side ``L = 2(N-1)``. Its DFT, normalized by ``1/L^2``,
    satisfies ``coeffs[q, p] = dct_type1(f)[|q|, |p|]``.
    """
    f = _square(grid)
    N = f.shape[0]
    L = 2 * (N - 1)
    idx = np.abs(np.arange(-(N - 1), N - 1))
    h = f[np.ix_(idx, idx)]
    coeffs = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(h))) / L**2
    return DCTExtension(h, coeffs, N - 1)


def dct_extend_type2(grid) -> DCTExtension:
    """Half-sample mirror ``h_a = f_a`` (a >= 0), ``f_{-a-1}`` (a < 0) and its quarter-wave DFT.

    The extension has side ``2N`` over ``a in [-N, N-1]``; the quarter-wave
    coefficients ``(2N)^-2 sum h_ab exp(-i pi (p(a+1/2) + q(b+1/2))/N)`` satisfy
    ``coeffs[q, p] = dct_type2(f)[|q|, |p|]`` and vanish on the ``p = -N`` column
    and ``q = -N`` row.
    """
    f = _square(grid)
    N = f.shape[0]
    a = np.arange(-N, N)
    idx = np.where(a >= 0, a, -a - 1)
    h = f[np.ix_(idx, idx)]
    raw = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(h))) / (2 * N) ** 2
    shift = np.exp(-1j * np.pi * a / (2 * N))
    coeffs = raw * shift[:, None] * shift[None, :]
    return DCTExtension(h, coeffs, N)
