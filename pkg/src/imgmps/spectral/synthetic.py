"""Synthetic image corpora drawn from decay-model spectra.

A master spectrum (envelope times random phases) is made Hermitian so that
every alias-folded resolution is a real image; pixels are then mapped affinely
to ``[0, 1]``. The affine map only changes the zero-frequency coefficient, so
a hard cutoff in the master survives in every image.
"""

from __future__ import annotations

import numpy as np

from ..imageio import ImageGrid
from .fourier import DecayModel, Spectrum, alias_fold, hermitian_symmetrize, idft2, master_spectrum

__all__ = [
    "real_master",
    "image_from_master",
    "synthetic_image",
    "synthetic_corpus",
    "hard_cutoff_image",
]

DEFAULT_MASTER_LOG = 9


def real_master(model: DecayModel, side_log: int = DEFAULT_MASTER_LOG, seed=None, cutoff=None) -> np.ndarray:
    """Hermitian-symmetrized random-phase master spectrum."""
    return hermitian_symmetrize(master_spectrum(model, side_log, seed, cutoff=cutoff))


def _rescale(pixels: np.ndarray) -> np.ndarray:
    lo, hi = pixels.min(), pixels.max()
    if hi - lo <= 1e-15 * max(1.0, abs(hi)):
        return np.full_like(pixels, 0.5)
    return (pixels - lo) / (hi - lo)


def image_from_master(master: np.ndarray, n: int) -> ImageGrid:
    """Fold the master to ``2**n``, invert the DFT and rescale to ``[0, 1]``."""
    if master.shape[0] == 1 << n:
        spec = Spectrum(n, master)
    else:
        spec = alias_fold(master, n)
    return ImageGrid(n, _rescale(idft2(spec).real))


def synthetic_image(model: DecayModel, n: int, seed=None, master_log: int = DEFAULT_MASTER_LOG) -> ImageGrid:
    """One random image whose spectrum follows ``model``."""
    return image_from_master(real_master(model, max(master_log, n + 1), seed), n)


def synthetic_corpus(
    model: DecayModel,
    n_values,
    count: int,
    seed: int = 0,
    master_log: int = DEFAULT_MASTER_LOG,
):
    """``count`` images, each rendered at every resolution in ``n_values``.

    Returns
    -------
    dict
        ``{n: [ImageGrid, ...]}``; image ``i`` at every ``n`` comes from the same
        master spectrum.
    """
    n_values = [int(n) for n in np.atleast_1d(n_values)]
    master_log = max(master_log, max(n_values) + 1)
    seeds = np.random.SeedSequence(seed).spawn(count)
    out = {n: [] for n in n_values}
    for s in seeds:
        master = real_master(model, master_log, np.random.default_rng(s))
        for n in n_values:
            out[n].append(image_from_master(master, n))
    return out


def hard_cutoff_image(lam: int, n: int, seed=None, model: DecayModel | None = None) -> ImageGrid:
    """Real image whose spectrum vanishes outside ``|p|, |q| <= lam``.

    ``model`` shapes the retained coefficients (flat by default).
    """
    if 2 * lam + 1 > 1 << n:
        raise ValueError(f"cutoff {lam} does not fit a 2**{n} grid")
    model = model or DecayModel("exponential", 1.0, 1e-9, 1e-9)
    side_log = max(n + 1, int(np.ceil(np.log2(2 * lam + 2))) + 1)
    master = real_master(model, side_log, seed, cutoff=lam)
    return image_from_master(master, n)
