"""Circuits: exact sequential circuits from MPS, variational ansaetze and a dense simulator.

A gate's matrix acts on its targets in listed order, the first target being
the most significant bit of the matrix index. Circuits act on ``|0...0>``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .encode import StateVector
from .tensnet import MAX_DENSE_QUBITS, MPS, mps_to_vector

__all__ = [
    "ANSATZ_KINDS",
    "Gate",
    "Circuit",
    "Layout2D",
    "default_layout",
    "apply_gate",
    "apply_circuit",
    "circuit_vector",
    "mps_to_circuit",
    "to_right_canonical",
    "merge_single_qubit_gates",
    "ansatz_seq1d",
    "ansatz_seq2d",
    "ansatz_mera",
    "mera_layer_sizes",
    "mera_schedule",
    "seq1d_schedule",
    "seq2d_schedule",
    "zero_state",
    "complete_isometry",
    "param_count",
    "fresh_inputs",
    "random_unitary",
    "near_identity",
]

ANSATZ_KINDS = ("mps", "seq1d", "seq2d", "mera", "custom")
_UNITARY_TOL = 1e-10
INIT_SCALE = 1e-2


def _is_unitary(u: np.ndarray, tol: float = _UNITARY_TOL) -> bool:
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0)


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary on an ordered tuple of distinct qubits."""

    targets: tuple
    matrix: np.ndarray

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        if not targets or len(set(targets)) != len(targets) or min(targets) < 0:
            raise ValueError(f"invalid targets {self.targets}")
        mat = np.array(self.matrix, dtype=complex)
        d = 1 << len(targets)
        if mat.shape != (d, d):
            raise ValueError(f"matrix must be {d}x{d} for {len(targets)} targets, got {mat.shape}")
        if not _is_unitary(mat):
            raise ValueError("gate matrix is not unitary within 1e-10")
        mat.setflags(write=False)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "matrix", mat)

    @property
    def k(self) -> int:
        return len(self.targets)

    def with_matrix(self, matrix) -> "Gate":
        return Gate(self.targets, matrix)


@dataclass(frozen=True)
class Layout2D:
    """Rectangular qubit lattice with some sites removed.

    Remaining sites receive qubit indices in row-major order.
    """

    rows: int
    cols: int
    removed: frozenset = frozenset()

    def __post_init__(self):
        removed = frozenset((int(r), int(c)) for r, c in self.removed)
        if self.rows < 1 or self.cols < 1:
            raise ValueError("layout needs at least one row and one column")
        for r, c in removed:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"removed site {(r, c)} outside the lattice")
        object.__setattr__(self, "removed", removed)
        if not self.sites:
            raise ValueError("layout has no sites")

    @property
    def sites(self) -> list:
        return [(r, c) for r in range(self.rows) for c in range(self.cols) if (r, c) not in self.removed]

    @property
    def m(self) -> int:
        return len(self.sites)

    def qubit_map(self) -> dict:
        return {site: q for q, site in enumerate(self.sites)}

    def is_connected(self) -> bool:
        sites = set(self.sites)
        start = self.sites[0]
        seen = {start}
        queue = deque([start])
        while queue:
            r, c = queue.popleft()
            for nb in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
                if nb in sites and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return len(seen) == len(sites)

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "removed": sorted(list(s) for s in self.removed)}

    @classmethod
    def from_dict(cls, obj) -> "Layout2D":
        return cls(int(obj["rows"]), int(obj["cols"]), frozenset(tuple(s) for s in obj.get("removed", [])))


def default_layout(m: int) -> Layout2D:
    """Near-square lattice for ``m`` qubits with sites removed from the top-left corner.

    10, 11, 12 and 13 qubits map to a 4x4 grid minus its upper-left triangle,
    3x4 minus one corner, a full 3x4 grid, and 4x4 minus three corner sites.
    """
    fixed = {
        10: Layout2D(4, 4, frozenset((r, c) for r in range(4) for c in range(4) if r + c < 3)),
        11: Layout2D(3, 4, frozenset({(0, 0)})),
        12: Layout2D(3, 4),
        13: Layout2D(4, 4, frozenset({(0, 0), (0, 1), (1, 0)})),
    }
    if m in fixed:
        return fixed[m]
    if m < 1:
        raise ValueError("m must be positive")
    rows = int(np.floor(np.sqrt(m)))
    cols = int(np.ceil(m / rows))
    extra = rows * cols - m
    # strip the surplus from the start of the first row
    return Layout2D(rows, cols, frozenset((0, c) for c in range(extra)))


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gates on ``m`` qubits plus ansatz metadata."""

    m: int
    gates: tuple = ()
    ansatz: str = "custom"
    layers: int | None = None
    layout: Layout2D | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            if not isinstance(g, Gate):
                raise TypeError("gates must be Gate instances")
            if max(g.targets) >= self.m:
                raise ValueError(f"gate targets {g.targets} exceed m={self.m}")
        if self.ansatz not in ANSATZ_KINDS:
            raise ValueError(f"unknown ansatz kind {self.ansatz!r}")
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)

    def with_matrices(self, matrices) -> "Circuit":
        gates = tuple(g.with_matrix(u) for g, u in zip(self.gates, matrices, strict=True))
        return Circuit(self.m, gates, self.ansatz, self.layers, self.layout, dict(self.info))

    def inverse(self) -> "Circuit":
        gates = tuple(Gate(g.targets, g.matrix.conj().T) for g in reversed(self.gates))
        return Circuit(self.m, gates, "custom")

    @property
    def schedule(self) -> list:
        return [g.targets for g in self.gates]

    def to_json(self) -> str:
        obj = {"m": self.m, "ansatz": self.ansatz, "layers": self.layers}
        if self.layout is not None:
            obj["layout"] = self.layout.to_dict()
        obj["gates"] = [
            {
                "targets": list(g.targets),
                "matrix": np.stack([g.matrix.real.ravel(), g.matrix.imag.ravel()], axis=1).tolist(),
            }
            for g in self.gates
        ]
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        obj = json.loads(text)
        gates = []
        for g in obj["gates"]:
            pairs = np.asarray(g["matrix"], dtype=float)
            d = 1 << len(g["targets"])
            gates.append(Gate(tuple(g["targets"]), (pairs[:, 0] + 1j * pairs[:, 1]).reshape(d, d)))
        layout = Layout2D.from_dict(obj["layout"]) if obj.get("layout") else None
        return cls(int(obj["m"]), tuple(gates), obj.get("ansatz", "custom"), obj.get("layers"), layout)

    def __repr__(self):
        return f"Circuit(m={self.m}, gates={len(self.gates)}, ansatz={self.ansatz!r})"


# simulation ---------------------------------------------------------------

def apply_gate(psi: np.ndarray, matrix: np.ndarray, targets) -> np.ndarray:
    """Apply a gate to a state tensor of shape ``(2,) * m``."""
    k = len(targets)
    u = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), list(targets)))
    return np.moveaxis(out, list(range(k)), list(targets))


def zero_state(m: int) -> np.ndarray:
    psi = np.zeros((2,) * m, dtype=complex)
    psi[(0,) * m] = 1.0
    return psi


def circuit_vector(circuit: Circuit, initial=None) -> np.ndarray:
    """Dense output vector of ``circuit`` applied to ``initial`` (default ``|0...0>``)."""
    m = circuit.m
    if m > MAX_DENSE_QUBITS:
        raise ValueError(f"dense simulation capped at {MAX_DENSE_QUBITS} qubits, got {m}")
    psi = zero_state(m) if initial is None else np.asarray(initial, dtype=complex).reshape((2,) * m)
    for g in circuit.gates:
        psi = apply_gate(psi, g.matrix, g.targets)
    return psi.ravel()


def apply_circuit(circuit: Circuit, initial=None) -> StateVector:
    """Simulate the circuit densely and return the output state."""
    return StateVector(circuit.m, circuit_vector(circuit, initial))


# unitary helpers ----------------------------------------------------------

def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-random ``d x d`` unitary."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def near_identity(d: int, rng, scale: float = INIT_SCALE) -> np.ndarray:
    """``exp(scale * K)`` for a random anti-Hermitian ``K`` with unit-variance entries."""
    if scale == 0:
        return np.eye(d, dtype=complex)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    u = expm(scale * (z - z.conj().T) / 2)
    q, r = np.linalg.qr(u)  # clean up rounding
    return q * (np.diag(r) / np.abs(np.diag(r)))


def complete_isometry(v: np.ndarray) -> np.ndarray:
    """Unitary whose leading columns equal the isometry ``v``."""
    d, k = v.shape
    q, _ = np.linalg.qr(v, mode="complete")
    u = q.copy()
    u[:, :k] = v
    # re-orthogonalize the completion against v to remove rounding
    if k < d:
        rest = u[:, k:] - v @ (v.conj().T @ u[:, k:])
        rest, _ = np.linalg.qr(rest)
        u[:, k:] = rest
    return u


# MPS -> circuit -----------------------------------------------------------

def _bits(chi: int) -> int:
    return int(np.ceil(np.log2(chi))) if chi > 1 else 0


def _reverse_bits_perm(k: int) -> np.ndarray:
    idx = np.arange(1 << k)
    rev = np.zeros_like(idx)
    for b in range(k):
        rev |= ((idx >> b) & 1) << (k - 1 - b)
    return rev


def to_right_canonical(mps: MPS) -> MPS:
    """Gauge transform into right-canonical form (same state, unit norm)."""
    tensors = [t.copy() for t in mps.tensors]
    for j in range(len(tensors) - 1, 0, -1):
        cl, _, cr = tensors[j].shape
        q, r = np.linalg.qr(tensors[j].reshape(cl, 2 * cr).T)
        tensors[j] = q.T.reshape(q.shape[1], 2, cr)
        tensors[j - 1] = np.einsum("asb,cb->asc", tensors[j - 1], r)
    tensors[0] = tensors[0] / np.linalg.norm(tensors[0])
    return MPS(tensors, "right")


def _mirror(mps: MPS) -> MPS:
    tensors = [np.transpose(t, (2, 1, 0)) for t in reversed(mps.tensors)]
    flag = {"left": "right", "right": "left"}.get(mps.canonical, "none")
    return MPS(tensors, flag)


def _left_circuit_gates(mps: MPS) -> list:
    m = mps.m
    bonds = mps.bonds
    bits = [_bits(c) for c in bonds]
    gates = []
    for j in range(m - 1, -1, -1):
        t = mps.tensors[j]
        cl, _, cr = t.shape
        k = bits[j] + 1
        d = 1 << k
        v = np.zeros((d, cr), dtype=complex)
        # output row index alpha * 2 + sigma, alpha on the leading bits
        rows = (np.arange(cl)[:, None] * 2 + np.arange(2)[None, :]).ravel()
        v[rows, :] = t.reshape(cl * 2, cr)
        if not np.allclose(v.conj().T @ v, np.eye(cr), atol=_UNITARY_TOL, rtol=0):
            raise ValueError(f"site {j} is not an isometry; the MPS must be canonical")
        u = complete_isometry(v)
        gates.append(Gate(tuple(range(j - bits[j], j + 1)), u))
    return gates


def mps_to_circuit(mps: MPS) -> Circuit:
    """Exact sequential circuit preparing a canonical MPS from ``|0...0>``.

    Each site becomes one ``(ceil(log2 chi_j) + 1)``-qubit gate; isometries
    are embedded into unitaries by orthonormal completion. Left-canonical
    input yields a staircase running from the last qubit to the first,
    right-canonical input one running from the first qubit to the last.

    Raises
    ------
    ValueError
        If the MPS is not flagged canonical or a tensor is not isometric.
    """
    if mps.canonical == "left":
        gates = _left_circuit_gates(mps)
    elif mps.canonical == "right":
        m = mps.m
        mirrored = _left_circuit_gates(_mirror(mps))
        gates = []
        for g in mirrored:
            perm = _reverse_bits_perm(g.k)
            targets = tuple(sorted(m - 1 - t for t in g.targets))
            gates.append(Gate(targets, g.matrix[np.ix_(perm, perm)]))
    else:
        raise ValueError("mps_to_circuit needs a left- or right-canonical MPS")
    return Circuit(mps.m, tuple(gates), "mps", info={"bonds": mps.bonds, "canonical": mps.canonical})


def _embed(matrix: np.ndarray, targets: tuple, into: tuple) -> np.ndarray:
    """Express a gate on ``targets`` as a matrix on the superset ``into``."""
    k = len(into)
    rest = [q for q in into if q not in targets]
    full = np.kron(matrix, np.eye(1 << len(rest)))
    order = list(targets) + rest
    # permute tensor legs from `order` to `into`
    full = full.reshape((2,) * (2 * k))
    perm = [order.index(q) for q in into]
    full = np.transpose(full, perm + [p + k for p in perm])
    return full.reshape(1 << k, 1 << k)


def merge_single_qubit_gates(circuit: Circuit) -> Circuit:
    """Absorb every single-qubit gate into an adjacent multi-qubit gate on that qubit.

    A single-qubit gate is merged into the latest earlier gate that touches
    its qubit, or failing that into the next later one; gates left without
    such a neighbour are kept.
    """
    gates = [[g.targets, g.matrix] for g in circuit.gates]
    i = 0
    while i < len(gates):
        targets, mat = gates[i]
        if len(targets) != 1:
            i += 1
            continue
        q = targets[0]
        prev = next((j for j in range(i - 1, -1, -1) if q in gates[j][0]), None)
        if prev is not None and len(gates[prev][0]) > 1:
            gates[prev][1] = _embed(mat, targets, gates[prev][0]) @ gates[prev][1]
            del gates[i]
            continue
        nxt = next((j for j in range(i + 1, len(gates)) if q in gates[j][0]), None)
        if prev is None and nxt is not None and len(gates[nxt][0]) > 1:
            gates[nxt][1] = gates[nxt][1] @ _embed(mat, targets, gates[nxt][0])
            del gates[i]
            continue
        i += 1
    kind = circuit.ansatz
    merged = tuple(Gate(t, u) for t, u in gates)
    return Circuit(circuit.m, merged, kind, circuit.layers, circuit.layout, dict(circuit.info))


# ansaetze -----------------------------------------------------------------

def _init_gates(schedule, seed, scale):
    rng = np.random.default_rng(seed)
    return tuple(Gate(t, near_identity(1 << len(t), rng, scale)) for t in schedule)


def seq1d_schedule(m: int, layers: int) -> list:
    return [(i, i + 1) for _ in range(layers) for i in range(m - 1)]


def ansatz_seq1d(m: int, layers: int = 1, seed=None, init_scale: float = INIT_SCALE) -> Circuit:
    """Sparse sequential circuit: ``layers`` staircases of gates on ``(i, i+1)``."""
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    if m < 2:
        raise ValueError(f"need at least two qubits, got {m}")
    gates = _init_gates(seq1d_schedule(m, layers), seed, init_scale)
    return Circuit(m, gates, "seq1d", layers)


def seq2d_schedule(layout: Layout2D, layers: int) -> list:
    """Per layer: anti-diagonals from the top-left, each with horizontal then vertical gates."""
    if not layout.is_connected():
        raise ValueError("layout is not connected")
    qmap = layout.qubit_map()
    one = []
    for d in range(layout.rows + layout.cols - 1):
        cells = [(r, d - r) for r in range(layout.rows) if 0 <= d - r < layout.cols and (r, d - r) in qmap]
        for r, c in cells:
            if (r, c + 1) in qmap:
                one.append((qmap[(r, c)], qmap[(r, c + 1)]))
        for r, c in cells:
            if (r + 1, c) in qmap:
                one.append((qmap[(r, c)], qmap[(r + 1, c)]))
    return one * layers


def ansatz_seq2d(layout: Layout2D, layers: int = 1, seed=None, init_scale: float = INIT_SCALE) -> Circuit:
    """Two-dimensional sequential circuit over a qubit lattice."""
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    gates = _init_gates(seq2d_schedule(layout, layers), seed, init_scale)
    return Circuit(layout.m, gates, "seq2d", layers, layout)


def mera_layer_sizes(m: int) -> list:
    """Qubit counts per MERA layer, coarsest first (e.g. 11 -> [2, 3, 6, 11])."""
    if m < 2:
        raise ValueError(f"MERA needs at least two qubits, got {m}")
    sizes = [m]
    while sizes[-1] > 2:
        t = sizes[-1]
        sizes.append(t // 2 if t % 2 == 0 else (t - 1) // 2 + 1)
    return sizes[::-1]


def mera_schedule(m: int) -> list:
    sizes = mera_layer_sizes(m)
    # wire positions of each layer, finest first
    positions = [list(range(m))]
    for _ in sizes[:-1][::-1]:
        prev = positions[-1]
        t = len(prev)
        coarse = [prev[2 * i] for i in range(t // 2)]
        if t % 2:
            coarse.append(prev[t - 1])
        positions.append(coarse)
    positions = positions[::-1]
    schedule = [tuple(positions[0])]
    for coarse, fine in zip(positions[:-1], positions[1:]):
        t = len(fine)
        schedule += [(fine[2 * i], fine[2 * i + 1]) for i in range(t // 2)]
        schedule += [(fine[i], fine[i + 1]) for i in range(1, t - 1, 2)]
        if t % 2 == 0 and t > 2:
            schedule.append((fine[t - 1], fine[0]))
    return schedule


def ansatz_mera(m: int, seed=None, init_scale: float = INIT_SCALE) -> Circuit:
    """MERA-like circuit generated top-down; odd layers leave the last qubit unpaired."""
    gates = _init_gates(mera_schedule(m), seed, init_scale)
    return Circuit(m, gates, "mera", 1, info={"layer_sizes": mera_layer_sizes(m)})


# parameter accounting -----------------------------------------------------

def fresh_inputs(circuit: Circuit) -> list:
    """Per gate, the number of inputs still in ``|0>`` (untouched by earlier gates)."""
    touched = set()
    out = []
    for g in circuit.gates:
        out.append(sum(1 for q in g.targets if q not in touched))
        touched.update(g.targets)
    return out


def param_count(circuit: Circuit) -> int:
    """Independent real parameters, counting each gate as an isometry.

    A ``k``-qubit gate with ``f`` fresh inputs acts as a ``2^k x 2^(k-f)``
    isometry, which has ``2 D P - P^2`` real parameters (7, 12 and 16 for a
    two-qubit gate with two, one or no fresh inputs).
    """
    if circuit.ansatz not in ANSATZ_KINDS:
        raise ValueError(f"unknown ansatz kind {circuit.ansatz!r}")
    total = 0
    for g, f in zip(circuit.gates, fresh_inputs(circuit)):
        D = 1 << g.k
        P = 1 << (g.k - f)
        total += 2 * D * P - P * P
    return total
