"""Image-to-state encodings (amplitude, FRQI, NEQR) and pixel indexings.

Qubit 0 is the most significant bit of every basis index. Color qubits, when
present, sit in front of the address qubits, so the basis index of color value
``c`` at address ``j`` is ``c * 4**n + j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .imageio import ImageGrid

__all__ = [
    "KINDS",
    "INDEXINGS",
    "EncodingSpec",
    "StateVector",
    "pixel_index",
    "index_map",
    "encode_state",
    "decode_image",
    "quantize",
]

KINDS = ("amplitude", "frqi", "neqr")
INDEXINGS = ("row", "hierarchical", "snake")

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class EncodingSpec:
    """Encoding kind plus pixel indexing.

    Parameters
    ----------
    kind : {"amplitude", "frqi", "neqr"}
    indexing : {"row", "hierarchical", "snake"}
    q : int
        Color-qubit count; only used by NEQR, must lie in ``[1, 8]``.
    """

    kind: str = "amplitude"
    indexing: str = "row"
    q: int = 8

    def __post_init__(self):
        kind = self.kind.lower()
        indexing = self.indexing.lower()
        if indexing in ("rowmajor", "row-major", "row_major"):
            indexing = "row"
        if kind not in KINDS:
            raise ValueError(f"unknown encoding kind {self.kind!r}; expected one of {KINDS}")
        if indexing not in INDEXINGS:
            raise ValueError(f"unknown indexing {self.indexing!r}; expected one of {INDEXINGS}")
        if kind == "neqr" and not (1 <= int(self.q) <= 8):
            raise ValueError(f"NEQR color-qubit count must lie in [1, 8], got {self.q}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "indexing", indexing)
        object.__setattr__(self, "q", int(self.q))

    @property
    def color_qubits(self) -> int:
        return {"amplitude": 0, "frqi": 1, "neqr": self.q}[self.kind]

    def n_qubits(self, n: int) -> int:
        return 2 * n + self.color_qubits

    @property
    def label(self) -> str:
        return f"neqr{self.q}" if self.kind == "neqr" else self.kind

    @classmethod
    def parse(cls, text: str, indexing: str = "row") -> "EncodingSpec":
        """Parse labels such as ``"amplitude"``, ``"frqi"``, ``"neqr3"``."""
        text = text.strip().lower()
        if text.startswith("neqr"):
            rest = text[4:].strip("(): ")
            return cls("neqr", indexing, int(rest) if rest else 8)
        return cls(text, indexing)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over ``m`` qubits (qubit 0 most significant)."""

    m: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).ravel()
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if amps.size != 1 << self.m:
            raise ValueError(f"expected {1 << self.m} amplitudes for m={self.m}, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL * max(1.0, np.sqrt(amps.size)):
            raise ValueError(f"state is not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps) -> "StateVector":
        """Normalize an arbitrary nonzero vector of length ``2**m``."""
        amps = np.asarray(amps, dtype=complex).ravel()
        m = amps.size.bit_length() - 1
        if amps.size < 2 or (1 << m) != amps.size:
            raise ValueError(f"length must be a power of two >= 2, got {amps.size}")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(m, amps / norm)

    def to_json(self) -> str:
        pairs = np.stack([self.amps.real, self.amps.imag], axis=1)
        return json.dumps({"m": self.m, "amps": pairs.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "StateVector":
        obj = json.loads(text)
        pairs = np.asarray(obj["amps"], dtype=float).reshape(-1, 2)
        return cls(int(obj["m"]), pairs[:, 0] + 1j * pairs[:, 1])

    def __repr__(self):
        return f"StateVector(m={self.m})"


def _interleave(a: int, b: int, n: int) -> int:
    j = 0
    for k in range(n - 1, -1, -1):
        j = (j << 1) | ((b >> k) & 1)
        j = (j << 1) | ((a >> k) & 1)
    return j


def pixel_index(a: int, b: int, indexing: str, n: int) -> int:
    """Address integer of pixel ``(a, b)`` (x, y) under an indexing scheme.

    Examples
    --------
    >>> pixel_index(1, 1, "snake", 1)
    2
    >>> pixel_index(1, 0, "hierarchical", 2)
    1
    """
    side = 1 << n
    if not (0 <= a < side and 0 <= b < side):
        raise ValueError(f"pixel ({a}, {b}) outside a {side}x{side} grid")
    indexing = EncodingSpec("amplitude", indexing).indexing
    if indexing == "row":
        return b * side + a
    if indexing == "snake":
        return b * side + (side - 1 - a if b & 1 else a)
    return _interleave(a, b, n)


def index_map(indexing: str, n: int) -> np.ndarray:
    """Array ``J`` with ``J[b, a] = pixel_index(a, b, indexing, n)`` (vectorized)."""
    side = 1 << n
    b, a = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    indexing = EncodingSpec("amplitude", indexing).indexing
    if indexing == "row":
        return b * side + a
    if indexing == "snake":
        return b * side + np.where(b & 1, side - 1 - a, a)
    j = np.zeros_like(a)
    for k in range(n - 1, -1, -1):
        j = (j << 2) | (((b >> k) & 1) << 1) | ((a >> k) & 1)
    return j


def quantize(pixels: np.ndarray, q: int) -> np.ndarray:
    """Round-half-up of ``x * (2**q - 1)`` to integers."""
    levels = (1 << q) - 1
    return np.floor(np.asarray(pixels, dtype=float) * levels + 0.5).astype(np.int64)


def encode_state(grid: ImageGrid, spec: EncodingSpec) -> StateVector:
    """Encode an image as a quantum state vector.

    Parameters
    ----------
    grid : ImageGrid
    spec : EncodingSpec

    Returns
    -------
    StateVector
        ``2n`` qubits (amplitude), ``2n + 1`` (FRQI) or ``2n + q`` (NEQR).
    """
    n = grid.n
    n_addr = 1 << (2 * n)
    J = index_map(spec.indexing, n).ravel()
    f = grid.pixels.ravel()
    if spec.kind == "amplitude":
        norm = np.linalg.norm(f)
        if norm == 0:
            raise ValueError("amplitude encoding of an all-zero image is undefined")
        amps = np.zeros(n_addr, dtype=complex)
        amps[J] = f / norm
        return StateVector(2 * n, amps)
    scale = 1.0 / (1 << n)
    if spec.kind == "frqi":
        amps = np.zeros(2 * n_addr, dtype=complex)
        amps[J] = np.cos(np.pi * f / 2) * scale
        amps[n_addr + J] = np.sin(np.pi * f / 2) * scale
        return StateVector(2 * n + 1, amps)
    colors = quantize(f, spec.q)
    amps = np.zeros(n_addr << spec.q, dtype=complex)
    amps[colors * n_addr + J] = scale
    return StateVector(2 * n + spec.q, amps)


def decode_image(state: StateVector, spec: EncodingSpec, n: int) -> ImageGrid:
    """Best-effort image reconstruction from an encoded state."""
    if state.m != spec.n_qubits(n):
        raise ValueError(
            f"state has {state.m} qubits but {spec.label} at n={n} needs {spec.n_qubits(n)}"
        )
    n_addr = 1 << (2 * n)
    J = index_map(spec.indexing, n)
    planes = np.abs(state.amps).reshape(-1, n_addr)
    if spec.kind == "amplitude":
        mag = planes[0][J]
        top = mag.max()
        pixels = mag / top if top > 0 else mag
    elif spec.kind == "frqi":
        pixels = (2 / np.pi) * np.arctan2(planes[1], planes[0])[J]
    else:
        pixels = np.argmax(planes, axis=0)[J] / ((1 << spec.q) - 1)
    return ImageGrid(n, np.clip(pixels, 0.0, 1.0))
