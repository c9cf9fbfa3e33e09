"""Closed-form bounds on the weight of discarded Fourier coefficients.

For a decay envelope ``|F(k, l)| <= C u(k) v(l)`` the folded DFT coefficients
obey ``|f_pq| <= C S_u(p) S_v(q)`` with ``S_u(p) = sum_i u(p + i N)``. The
discarded weight over ``I_disc`` is bounded by

    W = C^2 [sum_all S_u^2 * sum_all S_v^2 - sum_appr S_u^2 * sum_appr S_v^2]

and the approximation error of the normalized states by ``2 sqrt(W) / ||g||``.
Both functions evaluate ``W`` at finite ``N = 2**n`` without asymptotic
simplification; the bound is attained by positive saturating spectra.
"""

from __future__ import annotations

import numpy as np

from .fourier import DecayModel, frequencies
from .zeta import hurwitz_zeta

__all__ = [
    "exp_axis_sums",
    "alg_axis_sums",
    "alg_fold_envelope",
    "discarded_weight_exponential",
    "discarded_weight_algebraic",
    "bound_exponential",
    "bound_algebraic",
    "bound",
]


def _check(n: int, lam: int):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if lam < 0 or 2 * lam + 1 > (1 << n):
        raise ValueError(f"need 0 <= 2*lam+1 <= 2**n, got lam={lam}, n={n}")


def exp_axis_sums(rate: float, n: int, lam: int) -> tuple[float, float]:
    """Per-axis sums for exponential decay.

    Returns
    -------
    s_appr : float
        ``sum_{|p|<=lam} S(p)^2``.
    s_disc : float
        ``sum_{p not in [-lam, lam]} S(p)^2``, evaluated directly rather than as
        a difference so that it stays accurate when it is tiny.
    """
    a = float(rate)
    N = 1 << n
    chi = 2 * lam + 1
    aN = a * N
    e_N = np.exp(-aN)
    coth = 1.0 / np.tanh(a)
    sh = np.sinh(a)
    r = 1.0 / np.expm1(aN)  # 1 / (e^{aN} - 1)
    log_em1 = aN + np.log1p(-e_N)

    # sum over retained p of e^{-2a|p|}, of the cross term and of the square term
    t1 = coth - np.exp(-a * chi) / sh
    t2 = 2 * r * (chi + t1)
    sinh_chi_r2 = 0.5 * (np.exp(a * chi - 2 * log_em1) - np.exp(-a * chi - 2 * log_em1))
    t3 = 2 * chi * r * r + 2 * sinh_chi_r2 / sh
    s_appr = t1 + t2 + t3

    d1 = np.exp(-a * chi) / sh - coth * e_N
    d2 = 2 * r * ((N - chi) + d1)
    # r^2 sinh(aN) = r (1 + e^{-aN}) / 2
    d3 = 2 * (N - chi) * r * r + 2 * coth * r * (1 + e_N) / 2 - 2 * sinh_chi_r2 / sh
    s_disc = d1 + d2 + d3
    return float(s_appr), float(s_disc)


def discarded_weight_exponential(model: DecayModel, n: int, lam: int) -> float:
    """Finite-``N`` closed form of ``W`` for exponential decay."""
    if model.kind != "exponential":
        raise ValueError("model must be exponential")
    _check(n, lam)
    ax_appr, ax_disc = exp_axis_sums(model.alpha, n, lam)
    bx_appr, bx_disc = exp_axis_sums(model.beta, n, lam)
    # all*all - appr*appr = disc_a*all_b + appr_a*disc_b
    w = ax_disc * (bx_appr + bx_disc) + ax_appr * bx_disc
    return float(model.C**2 * max(w, 0.0))


def alg_fold_envelope(rate: float, n: int) -> np.ndarray:
    """Folded algebraic envelope ``S(p)`` for every centered frequency ``p``.

    ``S(p) = (|p|+1)^-rate + N^-rate [zeta(rate, 1-(p-1)/N) + zeta(rate, 1+(p+1)/N)]``.
    """
    N = 1 << n
    p = frequencies(N).astype(float)
    wrap = hurwitz_zeta(rate, 1 - (p - 1) / N) + hurwitz_zeta(rate, 1 + (p + 1) / N)
    return (np.abs(p) + 1) ** (-rate) + wrap / float(N) ** rate


def alg_axis_sums(rate: float, n: int, lam: int, form: str = "exact") -> tuple[float, float]:
    """Per-axis ``(sum_appr S^2, sum_disc S^2)`` for algebraic decay.

    ``form="exact"`` folds the envelope frequency by frequency. ``"harmonic"``
    replaces the wrap-around term by its uniform maximum
    ``zeta(rate, 1/2) + zeta(rate, 1)`` and sums the result with generalized
    harmonic numbers; it is never smaller than the exact form.
    """
    N = 1 << n
    if form == "exact":
        s2 = alg_fold_envelope(rate, n) ** 2
        kept = np.abs(frequencies(N)) <= lam
        return float(s2[kept].sum()), float(s2[~kept].sum())
    if form != "harmonic":
        raise ValueError(f"unknown algebraic form {form!r}")
    s = float(rate)
    chi = 2 * lam + 1
    Z = hurwitz_zeta(s, 0.5) + hurwitz_zeta(s, 1.0)
    Ns = float(N) ** s
    half = N / 2 + 1

    def head(t):
        # sum_{|p|<=lam} (|p|+1)^-t
        return 2 * hurwitz_zeta(t, 1.0) - 2 * hurwitz_zeta(t, lam + 2.0) - 1

    def head_disc(t):
        # the remaining p in [-N/2, N/2 - 1]
        return half ** (-t) - 2 * hurwitz_zeta(t, half) + 2 * hurwitz_zeta(t, lam + 2.0)

    s_appr = head(2 * s) + 2 * Z / Ns * head(s) + chi * Z**2 / Ns**2
    s_disc = head_disc(2 * s) + 2 * Z / Ns * head_disc(s) + (N - chi) * Z**2 / Ns**2
    return float(s_appr), float(s_disc)


def discarded_weight_algebraic(model: DecayModel, n: int, lam: int, form: str = "exact") -> float:
    """Finite-``N`` value of ``W`` for algebraic decay."""
    if model.kind != "algebraic":
        raise ValueError("model must be algebraic")
    _check(n, lam)
    ax_appr, ax_disc = alg_axis_sums(model.alpha, n, lam, form)
    bx_appr, bx_disc = alg_axis_sums(model.beta, n, lam, form)
    w = ax_disc * (bx_appr + bx_disc) + ax_appr * bx_disc
    return float(model.C**2 * max(w, 0.0))


def _finish(weight: float, g_norm: float) -> float:
    if not g_norm > 0:
        raise ValueError(f"g_norm must be positive, got {g_norm}")
    return 2.0 * np.sqrt(weight) / g_norm


def bound_exponential(model: DecayModel, n: int, lam: int, g_norm: float) -> float:
    """Upper bound ``2 sqrt(W) / ||g||_F`` on the truncation error, exponential decay."""
    return _finish(discarded_weight_exponential(model, n, lam), g_norm)


def bound_algebraic(model: DecayModel, n: int, lam: int, g_norm: float, form: str = "exact") -> float:
    """Upper bound ``2 sqrt(W) / ||g||_F`` on the truncation error, algebraic decay."""
    return _finish(discarded_weight_algebraic(model, n, lam, form), g_norm)


def bound(model: DecayModel, n: int, lam: int, g_norm: float, **kwargs) -> float:
    """Dispatch on ``model.kind``."""
    if model.kind == "exponential":
        return bound_exponential(model, n, lam, g_norm)
    return bound_algebraic(model, n, lam, g_norm, **kwargs)
