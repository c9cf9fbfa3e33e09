"""Fidelity maximization over circuit gates with a Riemannian Adam optimizer.

The cost is the infidelity ``1 - |<target|psi(U_1..U_K)>|^2``. Euclidean
gradients come from one forward and one backward sweep over the circuit; they
are projected onto the tangent space of the unitary group, combined into Adam
moments and retracted back onto the group.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, apply_gate, zero_state
from .encode import StateVector

__all__ = [
    "OptimizerConfig",
    "OptTrace",
    "AdamState",
    "fidelity_gradient",
    "project_tangent",
    "retract",
    "riemannian_step",
    "optimize",
    "write_trace_csv",
]

_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class OptimizerConfig:
    """Hyperparameters of the Riemannian Adam loop.

    ``tol`` and ``patience`` stop the run once the best infidelity has not
    improved by more than ``tol`` during ``patience`` consecutive steps.
    """

    steps: int = 2000
    lr: float = 5e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    tol: float = 1e-9
    patience: int = 200
    retraction: str = "qr"

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not self.lr >= 0:
            raise ValueError(f"lr must be non-negative, got {self.lr}")
        for name in ("beta1", "beta2"):
            val = getattr(self, name)
            if not 0 <= val < 1:
                raise ValueError(f"{name} must lie in [0, 1), got {val}")
        if self.eps <= 0 or self.patience < 1:
            raise ValueError("eps must be positive and patience >= 1")
        if self.retraction not in ("qr", "polar"):
            raise ValueError(f"unknown retraction {self.retraction!r}")


@dataclass
class OptTrace:
    """Per-step infidelities and the best circuit seen."""

    infidelity: list = field(default_factory=list)
    best_infidelity: list = field(default_factory=list)
    best_circuit: Circuit | None = None
    wall_time: float = 0.0
    converged: bool = False

    @property
    def final(self) -> float:
        return self.best_infidelity[-1] if self.best_infidelity else float("nan")


@dataclass
class AdamState:
    """First moment (a tangent vector) and scalar second moment for one gate."""

    m: np.ndarray
    v: float = 0.0
    t: int = 0

    @classmethod
    def zeros(cls, d: int) -> "AdamState":
        return cls(np.zeros((d, d), dtype=complex))


def _target_amps(target, m: int) -> np.ndarray:
    amps = target.amps if isinstance(target, StateVector) else np.asarray(target, dtype=complex).ravel()
    if amps.size != 1 << m:
        raise ValueError(f"target has {amps.size} amplitudes, circuit needs {1 << m}")
    return amps


def _env_matrix(lam: np.ndarray, phi: np.ndarray, targets) -> np.ndarray:
    """``sum_rest lam[i, rest] * conj(phi[j, rest])`` with targets moved to the front."""
    k = len(targets)
    m = lam.ndim
    rest = [a for a in range(m) if a not in targets]
    order = list(targets) + rest
    L = np.transpose(lam, order).reshape(1 << k, -1)
    P = np.transpose(phi, order).reshape(1 << k, -1)
    return L @ P.conj().T


def fidelity_gradient(circuit: Circuit, target, matrices=None):
    """Fidelity and its Euclidean gradient with respect to every gate.

    Parameters
    ----------
    circuit : Circuit
    target : StateVector or array
    matrices : list of np.ndarray, optional
        Override the circuit's gate matrices (used inside the optimizer).

    Returns
    -------
    fidelity : float
    grads : list of np.ndarray
        ``G_k`` with ``dF = Re tr(G_k^H dU_k)``, i.e. ``2 dF/dconj(U_k)``.
    """
    m = circuit.m
    t = _target_amps(target, m).reshape((2,) * m)
    mats = [g.matrix for g in circuit.gates] if matrices is None else matrices
    targets = [g.targets for g in circuit.gates]

    forward = []
    psi = zero_state(m)
    for u, tg in zip(mats, targets):
        forward.append(psi)
        psi = apply_gate(psi, u, tg)
    overlap = np.vdot(t, psi)
    fid = float(abs(overlap) ** 2)

    grads = [None] * len(mats)
    lam = t
    for k in range(len(mats) - 1, -1, -1):
        grads[k] = 2 * overlap * _env_matrix(lam, forward[k], targets[k])
        lam = apply_gate(lam, mats[k].conj().T, targets[k])
    return fid, grads


def project_tangent(u: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Riemannian gradient under the canonical metric: ``(G - U G^H U) / 2``."""
    return 0.5 * (g - u @ g.conj().T @ u)


def retract(u: np.ndarray, xi: np.ndarray, method: str = "qr") -> np.ndarray:
    """Map ``U + xi`` back onto the unitary group."""
    y = u + xi
    if method == "polar":
        w, _, vh = np.linalg.svd(y)
        return w @ vh
    q, r = np.linalg.qr(y)
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
    return q * phases


def riemannian_step(u, euclid_grad, state: AdamState, config: OptimizerConfig):
    """One Adam update of a single gate, descending the infidelity.

    Parameters
    ----------
    u : np.ndarray
        Current unitary.
    euclid_grad : np.ndarray
        Euclidean gradient of the fidelity (ascent direction), as returned by
        :func:`fidelity_gradient`.
    state : AdamState
        Updated in place.
    config : OptimizerConfig

    Returns
    -------
    np.ndarray
        New unitary.
    """
    u = np.asarray(u, dtype=complex)
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-8, rtol=0):
        raise ValueError("riemannian_step needs a unitary input")
    # descend the infidelity = ascend the fidelity
    rgrad = -project_tangent(u, np.asarray(euclid_grad, dtype=complex))
    state.t += 1
    state.m = config.beta1 * state.m + (1 - config.beta1) * rgrad
    state.v = config.beta2 * state.v + (1 - config.beta2) * float(np.vdot(rgrad, rgrad).real)
    m_hat = state.m / (1 - config.beta1**state.t)
    v_hat = state.v / (1 - config.beta2**state.t)
    step = -config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
    if not np.any(step):
        return u
    new = retract(u, step, config.retraction)
    # transport the momentum to the new tangent space
    state.m = project_tangent(new, state.m)
    return new


def optimize(circuit: Circuit, target, config: OptimizerConfig | None = None):
    """Maximize the fidelity of ``circuit`` with ``target``.

    Returns
    -------
    best : Circuit
        Best circuit encountered (not necessarily the last iterate).
    trace : OptTrace
    """
    config = config or OptimizerConfig()
    start = time.perf_counter()
    mats = [g.matrix.copy() for g in circuit.gates]
    states = [AdamState.zeros(u.shape[0]) for u in mats]
    trace = OptTrace()
    best = float("inf")
    best_mats = [u.copy() for u in mats]
    last_improvement = 0
    for step in range(config.steps):
        fid, grads = fidelity_gradient(circuit, target, mats)
        inf = max(0.0, 1.0 - fid)
        if inf < best - config.tol:
            last_improvement = step
        if inf < best:
            best = inf
            best_mats = [u.copy() for u in mats]
        trace.infidelity.append(inf)
        trace.best_infidelity.append(best)
        if step - last_improvement >= config.patience:
            trace.converged = True
            break
        if step == config.steps - 1:
            break
        mats = [riemannian_step(u, g, s, config) for u, g, s in zip(mats, grads, states)]
    trace.best_circuit = circuit.with_matrices(best_mats)
    trace.wall_time = time.perf_counter() - start
    return trace.best_circuit, trace


def write_trace_csv(trace: OptTrace, path, version: str = "1") -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# imgmps optimize-trace schema v{version}\n")
        writer = csv.writer(fh)
        writer.writerow(["step", "infidelity", "best_infidelity"])
        for i, (a, b) in enumerate(zip(trace.infidelity, trace.best_infidelity)):
            writer.writerow([i, repr(a), repr(b)])
