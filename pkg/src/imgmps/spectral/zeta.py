"""Hurwitz zeta function by partial summation plus an Euler-Maclaurin tail."""

from __future__ import annotations

import numpy as np

__all__ = ["hurwitz_zeta", "harmonic_number"]

_TERMS = 64
# B_2, B_4, B_6, B_8 divided by (2k)!
_BERNOULLI = (1 / 6 / 2, -1 / 30 / 24, 1 / 42 / 720, -1 / 30 / 40320)


def hurwitz_zeta(s, a):
    """``zeta(s, a) = sum_{j>=0} (j + a)^-s`` for real ``s > 1`` and ``a > 0``.

    ``a`` may be an array; the result then has the same shape.

    Examples
    --------
    >>> round(hurwitz_zeta(2.0, 1.0), 12) == round(np.pi**2 / 6, 12)
    True
    """
    s = float(s)
    a_arr = np.asarray(a, dtype=float)
    if not s > 1:
        raise ValueError(f"hurwitz_zeta needs s > 1, got {s}")
    if np.any(~(a_arr > 0)):
        raise ValueError("hurwitz_zeta needs a > 0")
    j = np.arange(_TERMS, dtype=float)
    head = np.sum((a_arr[..., None] + j) ** (-s), axis=-1)
    x = a_arr + _TERMS
    tail = x ** (1 - s) / (s - 1) + 0.5 * x ** (-s)
    # Euler-Maclaurin corrections: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * x^(-s-2k+1)
    rising = s
    for k, coef in enumerate(_BERNOULLI, start=1):
        tail = tail + coef * rising * x ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    out = head + tail
    return float(out) if out.ndim == 0 else out


def harmonic_number(s: float, m) -> np.ndarray:
    """Generalized harmonic number ``H_s(m) = zeta(s, 1) - zeta(s, m + 1)``."""
    return hurwitz_zeta(s, 1.0) - hurwitz_zeta(s, np.asarray(m, dtype=float) + 1.0)
