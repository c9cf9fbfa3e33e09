"""Matrix-product states: truncated-SVD compression, contraction and metrics.

Tensors have shape ``(chi_left, 2, chi_right)``; site 0 acts on qubit 0, the
most significant bit of the dense index.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .encode import StateVector

__all__ = [
    "MAX_DENSE_QUBITS",
    "MPS",
    "CompressionReport",
    "mps_from_state",
    "mps_to_state",
    "mps_to_vector",
    "entanglement_profile",
    "schmidt_values",
    "fidelity",
    "two_norm_distance",
    "random_normal_state",
    "random_mps",
    "REPORT_COLUMNS",
    "write_report_csv",
]

MAX_DENSE_QUBITS = 26
_ISO_TOL = 1e-10
_RANK_TOL = 1e-14


def _as_amps(x) -> np.ndarray:
    return x.amps if isinstance(x, StateVector) else np.asarray(x, dtype=complex).ravel()


@dataclass(eq=False)
class MPS:
    """Tensor train of rank-3 complex arrays.

    Parameters
    ----------
    tensors : sequence of np.ndarray
        Shapes ``(chi_j, 2, chi_{j+1})`` with ``chi_0 = chi_m = 1``.
    canonical : {"none", "left", "right"}
        Declared gauge; ``"left"`` and ``"right"`` are checked on construction.
    """

    tensors: list
    canonical: str = "none"

    def __post_init__(self):
        self.tensors = [np.asarray(t, dtype=complex) for t in self.tensors]
        if not self.tensors:
            raise ValueError("an MPS needs at least one tensor")
        for j, t in enumerate(self.tensors):
            if t.ndim != 3 or t.shape[1] != 2:
                raise ValueError(f"tensor {j} has shape {t.shape}; expected (chi, 2, chi')")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bond dimensions must be 1")
        for j in range(len(self.tensors) - 1):
            if self.tensors[j].shape[2] != self.tensors[j + 1].shape[0]:
                raise ValueError(f"bond mismatch between sites {j} and {j + 1}")
        if self.canonical not in ("none", "left", "right"):
            raise ValueError(f"unknown canonical flag {self.canonical!r}")
        if self.canonical != "none" and not self.is_canonical(self.canonical):
            raise ValueError(f"tensors are not {self.canonical}-canonical within {_ISO_TOL}")

    @property
    def m(self) -> int:
        return len(self.tensors)

    @property
    def bonds(self) -> list[int]:
        return [self.tensors[0].shape[0]] + [t.shape[2] for t in self.tensors]

    @property
    def max_bond(self) -> int:
        return max(self.bonds)

    def is_canonical(self, side: str = "left", tol: float = _ISO_TOL) -> bool:
        for t in self.tensors:
            cl, _, cr = t.shape
            if side == "left":
                mat = t.reshape(cl * 2, cr)
                gram = mat.conj().T @ mat
            else:
                mat = t.reshape(cl, 2 * cr)
                gram = mat @ mat.conj().T
            if not np.allclose(gram, np.eye(gram.shape[0]), atol=tol, rtol=0):
                return False
        return True

    def to_json(self) -> str:
        tensors = [np.stack([t.real, t.imag], axis=-1).tolist() for t in self.tensors]
        return json.dumps({"bonds": self.bonds, "canonical": self.canonical, "tensors": tensors})

    @classmethod
    def from_json(cls, text: str) -> "MPS":
        obj = json.loads(text)
        tensors = []
        for raw in obj["tensors"]:
            arr = np.asarray(raw, dtype=float)
            tensors.append(arr[..., 0] + 1j * arr[..., 1])
        mps = cls(tensors, obj.get("canonical", "none"))
        if mps.bonds != list(obj["bonds"]):
            raise ValueError("bond list does not match tensor shapes")
        return mps

    def __repr__(self):
        return f"MPS(m={self.m}, bonds={self.bonds}, canonical={self.canonical!r})"


@dataclass
class CompressionReport:
    """Diagnostics of one truncated-SVD sweep."""

    chi_max: int
    discarded_weight: list = field(default_factory=list)
    infidelity: float = 0.0
    two_norm_distance: float = 0.0

    @property
    def total_discarded(self) -> float:
        return float(sum(self.discarded_weight))


def _check_size(m: int):
    if m > MAX_DENSE_QUBITS:
        raise ValueError(f"dense materialization capped at {MAX_DENSE_QUBITS} qubits, got {m}")


def mps_from_state(state: StateVector, chi_max: int | None = None):
    """Left-to-right truncated-SVD sweep.

    Parameters
    ----------
    state : StateVector
    chi_max : int or None
        Maximal kept bond dimension; ``None`` means no truncation.

    Returns
    -------
    mps : MPS
        Left-canonical; the norm is absorbed (and renormalized) on the last site.
    report : CompressionReport
        Per-bond discarded weight is measured relative to the unit-norm input,
        so its sum equals ``||psi - psi_trunc||^2`` before renormalization.
    """
    if chi_max is not None and chi_max < 1:
        raise ValueError(f"chi_max must be >= 1, got {chi_max}")
    amps = _as_amps(state)
    m = amps.size.bit_length() - 1
    _check_size(m)
    limit = chi_max if chi_max is not None else 1 << m
    tensors = []
    weights = []
    rest = amps.reshape(1, -1)
    chi = 1
    for _ in range(m - 1):
        mat = rest.reshape(chi * 2, -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        # numerically null singular values never carry weight worth a bond index
        keep = max(1, min(limit, int(np.count_nonzero(s > _RANK_TOL * s[0]))))
        weights.append(float(np.sum(s[keep:] ** 2)))
        tensors.append(u[:, :keep].reshape(chi, 2, keep))
        rest = s[:keep, None] * vh[:keep]
        chi = keep
    last = rest.reshape(chi, 2, 1)
    norm = np.linalg.norm(last)
    if norm == 0:
        raise ValueError("truncation removed the entire state")
    tensors.append(last / norm)
    mps = MPS(tensors, "left")
    approx = mps_to_vector(mps)
    report = CompressionReport(
        chi_max=limit,
        discarded_weight=weights,
        infidelity=1.0 - fidelity(amps, approx),
        two_norm_distance=two_norm_distance(amps, approx),
    )
    return mps, report


def mps_to_vector(mps: MPS) -> np.ndarray:
    """Dense contraction without renormalization."""
    _check_size(mps.m)
    vec = mps.tensors[0].reshape(2, -1)
    for t in mps.tensors[1:]:
        cl, _, cr = t.shape
        vec = (vec @ t.reshape(cl, 2 * cr)).reshape(-1, cr)
    return vec.ravel()


def mps_to_state(mps: MPS) -> StateVector:
    """Contract the train into a normalized dense state."""
    return StateVector.from_amplitudes(mps_to_vector(mps))


def schmidt_values(amps, cut: int) -> np.ndarray:
    """Singular values across the cut after the first ``cut`` qubits."""
    amps = _as_amps(amps)
    return np.linalg.svd(amps.reshape(1 << cut, -1), compute_uv=False)


def _entropy(s: np.ndarray) -> float:
    p = s**2
    p = p[p > 0]
    val = float(-np.sum(p * np.log(p)))
    return 0.0 if val < 1e-12 else val


def entanglement_profile(state):
    """Von Neumann entropies (nats) at every contiguous cut.

    Returns
    -------
    entropies : np.ndarray
        ``m - 1`` values; entry ``k`` is the cut after qubit ``k``.
    max_entropy : float
    """
    amps = _as_amps(state)
    m = amps.size.bit_length() - 1
    _check_size(m)
    ent = np.array([_entropy(schmidt_values(amps, k)) for k in range(1, m)])
    return ent, float(ent.max()) if ent.size else 0.0


def fidelity(x, y) -> float:
    """``|<x|y>|^2``; accepts StateVectors or raw normalized arrays."""
    a, b = _as_amps(x), _as_amps(y)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def two_norm_distance(x, y) -> float:
    """``min_phi ||x - e^{i phi} y||``, attained when ``<x|y>`` is made real positive."""
    a, b = _as_amps(x), _as_amps(y)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def random_normal_state(m: int, seed=None) -> StateVector:
    """Real i.i.d. standard-normal amplitudes, normalized."""
    _check_size(m)
    rng = np.random.default_rng(seed)
    return StateVector.from_amplitudes(rng.standard_normal(1 << m))


def random_mps(m: int, chi: int, seed=None, canonical: str = "left") -> MPS:
    """Random complex MPS with bonds ``min(chi, 2**j, 2**(m-j))``.

    With ``canonical="left"`` every tensor is an isometry and the state has
    unit norm.
    """
    rng = np.random.default_rng(seed)
    bonds = [min(chi, 1 << j, 1 << (m - j)) for j in range(m + 1)]
    tensors = []
    for j in range(m):
        cl, cr = bonds[j], bonds[j + 1]
        raw = rng.standard_normal((cl * 2, cr)) + 1j * rng.standard_normal((cl * 2, cr))
        if canonical == "left":
            raw, _ = np.linalg.qr(raw)
        tensors.append(raw.reshape(cl, 2, cr))
    if canonical == "right":
        return MPS(_right_canonicalize(tensors), "right")
    return MPS(tensors, canonical)


def _right_canonicalize(tensors: Sequence[np.ndarray]) -> list:
    tensors = [t.copy() for t in tensors]
    for j in range(len(tensors) - 1, 0, -1):
        cl, _, cr = tensors[j].shape
        q, r = np.linalg.qr(tensors[j].reshape(cl, 2 * cr).T)
        k = q.shape[1]
        tensors[j] = q.T.reshape(k, 2, cr)
        tensors[j - 1] = np.einsum("asb,cb->asc", tensors[j - 1], r)
    tensors[0] = tensors[0] / np.linalg.norm(tensors[0])
    return tensors


REPORT_COLUMNS = ("image_id", "encoding", "indexing", "n", "chi", "infidelity", "two_norm", "max_entropy")


def write_report_csv(rows, path, version: str = "1") -> None:
    """Write compression rows (dicts keyed by ``REPORT_COLUMNS``), sorted by key."""
    rows = sorted(rows, key=lambda r: tuple(str(r[c]) if c in ("image_id", "encoding", "indexing") else r[c] for c in REPORT_COLUMNS[:5]))
    with open(path, "w", newline="") as fh:
        fh.write(f"# imgmps compress schema v{version}\n")
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
