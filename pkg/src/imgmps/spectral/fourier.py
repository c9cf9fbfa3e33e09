"""2-D DFT on power-of-two grids, spectral truncation and spectrum-to-MPS.

Coefficients are stored in a centered layout: ``coeffs[iq, ip]`` holds the
mode with signed frequencies ``q = iq - N/2`` (y) and ``p = ip - N/2`` (x),
where ``N = 2**n``. With this layout

    f[b, a] = sum_{p,q} coeffs[q, p] * exp(2j*pi*(p*a + q*b)/N)

holds exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..imageio import ImageGrid
from ..tensnet import MPS

__all__ = [
    "Spectrum",
    "TruncationSpec",
    "DecayModel",
    "frequencies",
    "dft2",
    "idft2",
    "truncate_spectrum",
    "spectrum_to_mps",
    "alias_fold",
    "master_spectrum",
    "hermitian_symmetrize",
]


def frequencies(side: int) -> np.ndarray:
    """Signed frequencies of a centered axis of even length ``side``."""
    return np.arange(side) - side // 2


@dataclass(eq=False)
class Spectrum:
    """Centered DFT coefficients of a ``2**n x 2**n`` grid."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        side = 1 << self.n
        if coeffs.shape != (side, side):
            raise ValueError(f"coeffs must have shape {(side, side)}, got {coeffs.shape}")
        self.coeffs = coeffs

    @property
    def side(self) -> int:
        return 1 << self.n

    @property
    def freqs(self) -> np.ndarray:
        return frequencies(self.side)

    def coefficient(self, p: int, q: int) -> complex:
        """Value of the mode with x-frequency ``p`` and y-frequency ``q``."""
        h = self.side // 2
        if not (-h <= p < h and -h <= q < h):
            raise IndexError(f"frequency ({p}, {q}) outside [-{h}, {h})")
        return complex(self.coeffs[q + h, p + h])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def to_json(self) -> str:
        flat = self.coeffs.ravel()
        return json.dumps(
            {
                "n": self.n,
                "layout": "centered",
                "coeffs": np.stack([flat.real, flat.imag], axis=1).tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Spectrum":
        obj = json.loads(text)
        if obj.get("layout", "centered") != "centered":
            raise ValueError(f"unsupported layout {obj.get('layout')!r}")
        n = int(obj["n"])
        pairs = np.asarray(obj["coeffs"], dtype=float).reshape(-1, 2)
        side = 1 << n
        return cls(n, (pairs[:, 0] + 1j * pairs[:, 1]).reshape(side, side))


@dataclass(frozen=True)
class TruncationSpec:
    """Square frequency cutoff ``|p|, |q| <= lam`` on a ``2**n`` grid."""

    lam: int
    n: int

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.lam}")
        if 2 * self.lam + 1 > (1 << self.n):
            raise ValueError(f"2*lam+1 = {2 * self.lam + 1} exceeds the grid side {1 << self.n}")

    @property
    def chi(self) -> int:
        return 2 * self.lam + 1

    def appr_mask(self) -> np.ndarray:
        """Boolean centered mask of the retained set ``I_appr``."""
        f = np.abs(frequencies(1 << self.n)) <= self.lam
        return f[:, None] & f[None, :]

    def disc_mask(self) -> np.ndarray:
        return ~self.appr_mask()


@dataclass(frozen=True)
class DecayModel:
    """Envelope ``|F(p, q)|`` of continuum Fourier coefficients.

    ``exponential``: ``C exp(-alpha|p|) exp(-beta|q|)``;
    ``algebraic``: ``C (|p|+1)^-alpha (|q|+1)^-beta``.
    ``alpha`` pairs with the x-frequency ``p`` and ``beta`` with ``q``.
    """

    kind: str
    C: float = 1.0
    alpha: float = 1.2
    beta: float = 1.2

    def __post_init__(self):
        kind = self.kind.lower()
        if kind in ("exp", "exponential"):
            kind = "exponential"
            lower = 0.0
        elif kind in ("alg", "algebraic"):
            kind = "algebraic"
            lower = 1.0
        else:
            raise ValueError(f"unknown decay model {self.kind!r}")
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        for name in ("alpha", "beta"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > lower):
                raise ValueError(f"{kind} decay needs {name} > {lower:g}, got {val}")
        object.__setattr__(self, "kind", kind)

    def axis_envelope(self, k, rate):
        k = np.abs(np.asarray(k, dtype=float))
        if self.kind == "exponential":
            return np.exp(-rate * k)
        return (k + 1.0) ** (-rate)

    def envelope(self, p, q) -> np.ndarray:
        return self.C * self.axis_envelope(p, self.alpha) * self.axis_envelope(q, self.beta)


def _pixels(grid) -> np.ndarray:
    return grid.pixels if isinstance(grid, ImageGrid) else np.asarray(grid)


def dft2(grid) -> Spectrum:
    """Forward DFT with ``1/N^2`` normalization, centered layout.

    Accepts an :class:`ImageGrid` or any square power-of-two array (complex
    allowed).
    """
    f = _pixels(grid)
    side = f.shape[0]
    n = side.bit_length() - 1
    if f.shape != (side, side) or (1 << n) != side:
        raise ValueError(f"expected a square power-of-two array, got shape {f.shape}")
    return Spectrum(n, np.fft.fftshift(np.fft.fft2(f)) / side**2)


def idft2(spec: Spectrum) -> np.ndarray:
    """Inverse of :func:`dft2`; returns a complex ``N x N`` array."""
    side = spec.side
    return np.fft.ifft2(np.fft.ifftshift(spec.coeffs)) * side**2


def truncate_spectrum(spec: Spectrum, t) -> tuple[Spectrum, float]:
    """Zero every mode outside ``I_appr``.

    Parameters
    ----------
    spec : Spectrum
    t : TruncationSpec or int
        The cutoff, or just ``lam``.

    Returns
    -------
    truncated : Spectrum
    discarded_weight : float
        ``sum_{I_disc} |f_pq|^2``.
    """
    if not isinstance(t, TruncationSpec):
        t = TruncationSpec(int(t), spec.n)
    if t.n != spec.n:
        raise ValueError(f"truncation spec is for n={t.n}, spectrum has n={spec.n}")
    mask = t.appr_mask()
    kept = np.where(mask, spec.coeffs, 0)
    weight = float(np.sum(np.abs(spec.coeffs[~mask]) ** 2))
    return Spectrum(spec.n, kept), weight


def _register_tensors(freqs: np.ndarray, n: int) -> list[np.ndarray]:
    """Diagonal plane-wave tensors for one n-qubit register, MSB first."""
    k = len(freqs)
    tensors = []
    for j in range(n):
        phase = np.exp(2j * np.pi * freqs / 2 ** (j + 1))
        t = np.zeros((k, 2, k), dtype=complex)
        idx = np.arange(k)
        t[idx, 0, idx] = 1.0
        t[idx, 1, idx] = phase
        tensors.append(t)
    return tensors


def spectrum_to_mps(spec: Spectrum, tol: float = 0.0) -> MPS:
    """Exact MPS of the (unnormalized) image reconstructed from a sparse spectrum.

    The qubit order is row-major: the first ``n`` sites carry the y-bits of
    ``b`` (most significant first), the last ``n`` sites the x-bits of ``a``.
    Only rows (q) and columns (p) containing a coefficient with modulus above
    ``tol`` are used, so the y-bonds have dimension ``#q`` and the x-bonds
    ``#p``.
    """
    n = spec.n
    active = np.abs(spec.coeffs) > tol
    rows = np.flatnonzero(active.any(axis=1))
    cols = np.flatnonzero(active.any(axis=0))
    if rows.size == 0:
        raise ValueError("spectrum has no nonzero coefficients")
    freqs = spec.freqs
    qs, ps = freqs[rows], freqs[cols]
    center = spec.coeffs[np.ix_(rows, cols)]

    ytens = _register_tensors(qs, n)
    xtens = _register_tensors(ps, n)
    ytens[0] = ytens[0].sum(axis=0, keepdims=True)
    ytens[-1] = np.einsum("asb,bc->asc", ytens[-1], center)
    xtens[-1] = xtens[-1].sum(axis=2, keepdims=True)
    return MPS(ytens + xtens)


def hermitian_symmetrize(coeffs: np.ndarray) -> np.ndarray:
    """Project a centered even-sided spectrum onto real-signal spectra.

    Uses ``(F[k] + conj(F[-k mod M])) / 2`` in the uncentered domain, which
    keeps the Nyquist row and column self-consistent.
    """
    unc = np.fft.ifftshift(coeffs)
    mirrored = np.roll(unc[::-1, ::-1], 1, axis=(0, 1))
    return np.fft.fftshift((unc + np.conj(mirrored)) / 2)


def master_spectrum(
    model: DecayModel,
    side_log: int,
    seed=None,
    random_phases: bool = True,
    cutoff: int | None = None,
) -> np.ndarray:
    """Centered ``2**side_log`` square of envelope values times random phases.

    Phases are ``exp(i*pi*x)`` with ``x`` standard normal. ``cutoff`` zeroes
    every mode with ``|p|`` or ``|q|`` above it.
    """
    side = 1 << side_log
    k = frequencies(side)
    env = model.envelope(k[None, :], k[:, None])
    if random_phases:
        rng = np.random.default_rng(seed)
        env = env * np.exp(1j * np.pi * rng.standard_normal((side, side)))
    else:
        env = env.astype(complex)
    if cutoff is not None:
        keep = np.abs(k) <= cutoff
        env = env * (keep[:, None] & keep[None, :])
    return env


def alias_fold(master, n: int) -> Spectrum:
    """Fold a centered master spectrum onto a ``2**n`` grid.

    Each coarse coefficient is the sum of all master modes congruent to it
    modulo ``2**n``; this is how sampling on a coarser grid aliases
    frequencies.
    """
    master = np.asarray(master, dtype=complex)
    big = master.shape[0]
    side = 1 << n
    if master.shape != (big, big) or big & (big - 1):
        raise ValueError(f"master must be square with power-of-two side, got {master.shape}")
    if big < 2 * side:
        raise ValueError(f"master side {big} must be at least twice the target side {side}")
    r = big // side
    unc = np.fft.ifftshift(master).reshape(r, side, r, side)
    return Spectrum(n, np.fft.fftshift(unc.sum(axis=(0, 2))))
