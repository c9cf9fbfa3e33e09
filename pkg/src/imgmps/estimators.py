"""scikit-learn style wrappers around the encoding and compression pipeline.

These are thin conveniences: each transformer works sample by sample, and
``fit`` only validates parameters (the compressors learn no shared state
across samples).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_images, check_is_fitted, check_positive_int, check_states
from .circuit import ansatz_mera, ansatz_seq1d, ansatz_seq2d, circuit_vector, default_layout, param_count
from .encode import EncodingSpec, encode_state
from .spectral import TruncationSpec, dft2, idft2, truncate_spectrum
from .tensnet import fidelity, mps_from_state, mps_to_vector
from .varopt import OptimizerConfig, optimize

__all__ = ["ImageEncoder", "MPSCompressor", "FourierTruncator", "CircuitApproximator"]


class ImageEncoder(TransformerMixin, BaseEstimator):
    """Map images to encoded state vectors.

    Parameters
    ----------
    kind : {"amplitude", "frqi", "neqr"}
    indexing : {"row", "hierarchical", "snake"}
    q : int
        NEQR color qubits.
    """

    def __init__(self, kind="amplitude", indexing="row", q=8):
        self.kind = kind
        self.indexing = indexing
        self.q = q

    def fit(self, X, y=None):
        self.spec_ = EncodingSpec(self.kind, self.indexing, self.q)
        images = check_images(X)
        self.n_ = images[0].n
        self.n_qubits_ = self.spec_.n_qubits(self.n_)
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        images = check_images(X)
        return np.stack([encode_state(g, self.spec_).amps for g in images])


class MPSCompressor(TransformerMixin, BaseEstimator):
    """Truncated-SVD MPS compression of each state (rows of ``X``).

    ``transform`` returns the compressed dense states; ``reports_`` holds the
    :class:`~imgmps.tensnet.CompressionReport` of the last call.
    """

    def __init__(self, chi_max=16):
        self.chi_max = chi_max

    def fit(self, X, y=None):
        check_positive_int(self.chi_max, "chi_max")
        check_states(X)
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        states = check_states(X)
        out, reports = [], []
        for psi in states:
            mps, rep = mps_from_state(psi, self.chi_max)
            out.append(mps_to_vector(mps))
            reports.append(rep)
        self.reports_ = reports
        return np.stack(out)

    def score(self, X, y=None):
        """Mean fidelity between inputs and their compressions."""
        states = check_states(X)
        approx = self.transform(states)
        return float(np.mean([fidelity(a, b) for a, b in zip(states, approx)]))


class FourierTruncator(TransformerMixin, BaseEstimator):
    """Keep only the modes ``|p|, |q| <= cutoff`` of each image.

    ``transform`` returns the (complex) reconstructed pixel arrays.
    """

    def __init__(self, cutoff=2):
        self.cutoff = cutoff

    def fit(self, X, y=None):
        check_positive_int(self.cutoff, "cutoff", minimum=0)
        images = check_images(X)
        TruncationSpec(self.cutoff, images[0].n)
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        out, weights = [], []
        for g in check_images(X):
            spec, w = truncate_spectrum(dft2(g), TruncationSpec(self.cutoff, g.n))
            out.append(idft2(spec))
            weights.append(w)
        self.discarded_weight_ = np.asarray(weights)
        return np.stack(out)


class CircuitApproximator(BaseEstimator):
    """Variationally fit one shallow circuit per target state.

    Parameters
    ----------
    ansatz : {"seq1d", "seq2d", "mera"}
    layers : int
        Ignored for MERA.
    steps, lr, seed : optimizer settings
    """

    def __init__(self, ansatz="seq1d", layers=1, steps=500, lr=5e-3, seed=0):
        self.ansatz = ansatz
        self.layers = layers
        self.steps = steps
        self.lr = lr
        self.seed = seed

    def _build(self, m):
        if self.ansatz == "seq1d":
            return ansatz_seq1d(m, self.layers, self.seed)
        if self.ansatz == "seq2d":
            return ansatz_seq2d(default_layout(m), self.layers, self.seed)
        if self.ansatz == "mera":
            return ansatz_mera(m, self.seed)
        raise ValueError(f"unknown ansatz {self.ansatz!r}")

    def fit(self, X, y=None):
        states = check_states(X)
        m = states.shape[1].bit_length() - 1
        config = OptimizerConfig(steps=self.steps, lr=self.lr, seed=self.seed)
        self.circuits_, self.infidelities_ = [], []
        for psi in states:
            best, trace = optimize(self._build(m), psi, config)
            self.circuits_.append(best)
            self.infidelities_.append(trace.final)
        self.n_params_ = param_count(self.circuits_[0])
        return self

    def predict(self, X=None):
        """Dense states prepared by the fitted circuits."""
        check_is_fitted(self, "circuits_")
        return np.stack([circuit_vector(c) for c in self.circuits_])

    def score(self, X, y=None):
        """Mean fidelity of the fitted circuits with the states in ``X``."""
        states = check_states(X)
        return float(np.mean([fidelity(a, b) for a, b in zip(states, self.predict())]))
