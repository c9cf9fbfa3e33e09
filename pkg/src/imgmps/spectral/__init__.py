"""Fourier and cosine spectra, truncation, spectrum-to-MPS and error bounds."""

from .bounds import (
    alg_axis_sums,
    alg_fold_envelope,
    bound,
    bound_algebraic,
    bound_exponential,
    discarded_weight_algebraic,
    discarded_weight_exponential,
    exp_axis_sums,
)
from .dct import (
    DCTExtension,
    dct_extend_type1,
    dct_extend_type2,
    dct_type1,
    dct_type2,
    idct_type1,
    idct_type2,
)
from .fourier import (
    DecayModel,
    Spectrum,
    TruncationSpec,
    alias_fold,
    dft2,
    frequencies,
    hermitian_symmetrize,
    idft2,
    master_spectrum,
    spectrum_to_mps,
    truncate_spectrum,
)
from .synthetic import hard_cutoff_image, image_from_master, real_master, synthetic_corpus, synthetic_image
from .zeta import harmonic_number, hurwitz_zeta

__all__ = [
    "DCTExtension",
    "DecayModel",
    "Spectrum",
    "TruncationSpec",
    "alg_axis_sums",
    "alg_fold_envelope",
    "alias_fold",
    "bound",
    "bound_algebraic",
    "bound_exponential",
    "dct_extend_type1",
    "dct_extend_type2",
    "dct_type1",
    "dct_type2",
    "dft2",
    "discarded_weight_algebraic",
    "discarded_weight_exponential",
    "exp_axis_sums",
    "frequencies",
    "hard_cutoff_image",
    "harmonic_number",
    "hermitian_symmetrize",
    "hurwitz_zeta",
    "idct_type1",
    "idct_type2",
    "idft2",
    "image_from_master",
    "master_spectrum",
    "real_master",
    "spectrum_to_mps",
    "synthetic_corpus",
    "synthetic_image",
    "truncate_spectrum",
]
