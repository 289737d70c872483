"""Entanglement structure of four-qubit channel states.

Pairwise positive-partial-transpose analysis, the triad decomposition into
two orthogonal maximal-GHZ components, the three-tangle, and a GHZ-witness
minimization over local rotations (steepest descent, multi-start).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import CHANNEL_LABELS
from .tensor import (
    ATOL,
    ContractError,
    DensityMatrix,
    LabelError,
    QubitRegister,
    SIGMA_Y,
    SIGMA_Z,
    StateVector,
    _as_complex,
    hermitian_eigenvalues,
    partial_transpose,
    reduced_density,
    require_hermitian,
)

#: a pair is declared entangled iff its minimum PT eigenvalue is below this
PPT_VERDICT_TOL = -1e-10

#: branch signs (l1, l2, l3, l4) of the two GHZ components of each triad
#: marginal of the Bell-transformed reference channel
TRIAD_COMPONENT_SIGNS = {
    ("A1", "A2", "B1"): (-1, 1, -1, 1),
    ("A1", "A2", "B2"): (1, 1, -1, -1),
    ("A1", "B1", "B2"): (-1, 1, 1, -1),
    ("A2", "B1", "B2"): (-1, -1, 1, 1),
}

#: all six unordered pairs / four triads of the channel register
CHANNEL_PAIRS = (
    ("A1", "A2"), ("A1", "B1"), ("A1", "B2"),
    ("A2", "B1"), ("A2", "B2"), ("B1", "B2"),
)
CHANNEL_TRIADS = tuple(TRIAD_COMPONENT_SIGNS)

MAX_ITERATIONS = 10_000
GRAD_NORM_TOL = 1e-8
ARMIJO_C = 1e-4


@dataclass(frozen=True)
class PairReport:
    """Two-qubit marginal with its partial-transpose verdict."""

    pair: tuple[str, str]
    reduced: DensityMatrix
    min_pt_eigenvalue: float
    entangled: bool


@dataclass(frozen=True)
class TriadReport:
    """Three-qubit marginal matched against its two reference GHZ components."""

    triad: tuple[str, str, str]
    reduced: DensityMatrix
    ghz_component_fidelities: tuple[float, float]
    three_tangles: tuple[float, float]


@dataclass(frozen=True)
class WitnessSearchResult:
    """Best witness value found over all restarts."""

    min_value: float
    parameters: tuple[float, ...]
    restarts: int
    converged_fraction: float

    def __post_init__(self):
        if not -1.0 - 1e-9 <= self.min_value <= 0.75 + 1e-9:
            raise ContractError(
                f"witness value {self.min_value} outside the admissible range"
            )
        if len(self.parameters) != 9:
            raise ContractError("witness parameters are 9 rotation angles")


def pair_analysis(state: StateVector, pair) -> PairReport:
    """Reduce to the named pair and apply the PT separability test."""
    if state.register.size != 4:
        raise ContractError("pair analysis expects a four-qubit state")
    pair = tuple(pair)
    reduced = reduced_density(state, pair)
    pt = partial_transpose(reduced, (reduced.register.labels[1],))
    min_eig = float(hermitian_eigenvalues(pt).min())
    return PairReport(pair, reduced, min_eig, min_eig < PPT_VERDICT_TOL)


def triad_component_states(triad) -> tuple[np.ndarray, np.ndarray]:
    """The two orthonormal GHZ-class components of a reference triad marginal."""
    key = tuple(triad)
    try:
        l1, l2, l3, l4 = TRIAD_COMPONENT_SIGNS[key]
    except KeyError:
        raise LabelError(
            f"no reference components for triad {key}; "
            f"known triads: {CHANNEL_TRIADS}"
        ) from None
    comp0 = np.zeros(8, dtype=complex)
    comp0[0b000], comp0[0b011], comp0[0b101], comp0[0b110] = 1.0, l1, 1.0, l2
    comp1 = np.zeros(8, dtype=complex)
    comp1[0b001], comp1[0b010], comp1[0b100], comp1[0b111] = l3, l4, 1.0, 1.0
    return comp0 / 2.0, comp1 / 2.0


def triad_analysis(state: StateVector, triad) -> TriadReport:
    """Reduce to the named triad and match its rank-2 eigenspace against the
    reference GHZ components.

    Fidelities are the weights of each reference component inside the span of
    the two leading eigenvectors; tangles are evaluated on the normalized
    projections (deterministic even when the leading eigenvalue is degenerate).
    """
    if state.register.size != 4:
        raise ContractError("triad analysis expects a four-qubit state")
    triad = tuple(triad)
    reduced = reduced_density(state, triad)
    refs = triad_component_states(triad)
    _, vectors = np.linalg.eigh(reduced.matrix)
    top = vectors[:, -2:]
    fidelities = []
    tangles = []
    for ref in refs:
        weights = top.conj().T @ ref
        fid = float(np.real(np.vdot(weights, weights)))
        fidelities.append(fid)
        if fid < 1e-12:
            tangles.append(0.0)
            continue
        projection = top @ weights
        tangles.append(three_tangle(projection / np.linalg.norm(projection)))
    return TriadReport(triad, reduced, tuple(fidelities), tuple(tangles))


def three_tangle(state) -> float:
    """Residual tangle of a three-qubit pure state via the 2x2x2 hyperdeterminant.

    Equals 1 exactly for maximal GHZ states up to local unitaries and 0 for
    any state in the W class; invariant under local unitaries.
    """
    amps = state.amplitudes if isinstance(state, StateVector) else (
        _as_complex(state, "state").reshape(-1)
    )
    if amps.size != 8:
        raise ContractError("three_tangle expects a three-qubit state")
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > ATOL:
        raise ContractError(f"state is not normalized: |psi| = {norm!r}")
    a = amps.reshape(2, 2, 2)
    d1 = (
        a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2
        + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
        + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2
        + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2
    )
    d2 = (
        a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
        + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1]
    )
    d3 = (
        a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
        + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0]
    )
    tau = 4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3)
    return float(min(max(tau, 0.0), 1.0))


def symmetric_w_state(labels=CHANNEL_LABELS) -> StateVector:
    """Four-qubit single-excitation symmetric state (pairwise-entangled control)."""
    amps = np.zeros(16, dtype=complex)
    amps[[1, 2, 4, 8]] = 0.5
    return StateVector(QubitRegister(tuple(labels)), amps)


# --- GHZ witness over local rotations --------------------------------------

_GHZ3 = np.zeros(8, dtype=complex)
_GHZ3[0] = _GHZ3[7] = 1.0 / np.sqrt(2.0)
_HALF_Z = -0.5j * SIGMA_Z
_HALF_Y = -0.5j * SIGMA_Y


def _rotation(a: float, b: float, c: float) -> np.ndarray:
    """Z-Y-Z Euler rotation; the witness never sees the global phase."""
    cb, sb = np.cos(0.5 * b), np.sin(0.5 * b)
    ea, ec = np.exp(-0.5j * a), np.exp(-0.5j * c)
    return np.array(
        [
            [ea * ec * cb, -ea * np.conj(ec) * sb],
            [np.conj(ea) * ec * sb, np.conj(ea * ec) * cb],
        ]
    )


def _split_params(rotation_params) -> np.ndarray:
    params = np.asarray(rotation_params, dtype=float).reshape(-1)
    if params.size != 9:
        raise ContractError("expected 9 rotation parameters (3 per qubit)")
    return params


def witness_state(rotation_params) -> np.ndarray:
    """(R1 (x) R2 (x) R3)(|000> + |111>)/sqrt2 for 9 stacked Euler angles."""
    params = _split_params(rotation_params)
    rots = [_rotation(*params[3 * k : 3 * k + 3]) for k in range(3)]
    branch0 = np.kron(np.kron(rots[0][:, 0], rots[1][:, 0]), rots[2][:, 0])
    branch1 = np.kron(np.kron(rots[0][:, 1], rots[1][:, 1]), rots[2][:, 1])
    return (branch0 + branch1) / np.sqrt(2.0)


def _density8(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        if rho.register.size != 3:
            raise ContractError("the witness acts on three-qubit density matrices")
        return rho.matrix
    m = require_hermitian(rho, what="density matrix")
    if m.shape != (8, 8):
        raise ContractError("the witness acts on 8x8 density matrices")
    return m


def witness_value(rho, rotation_params) -> float:
    """Witness expectation 3/4 - <phi|rho|phi> at the given rotation angles."""
    m = _density8(rho)
    phi = witness_state(rotation_params)
    return float(0.75 - np.real(np.vdot(phi, m @ phi)))


def _euler_columns(params2d: np.ndarray) -> np.ndarray:
    """Rotations for stacked angle rows: (n, 9) -> (n, 3, 2, 2)."""
    p = params2d.reshape(-1, 3, 3)
    a, b, c = p[..., 0], p[..., 1], p[..., 2]
    cb, sb = np.cos(0.5 * b), np.sin(0.5 * b)
    ea, ec = np.exp(-0.5j * a), np.exp(-0.5j * c)
    rots = np.empty(p.shape[:2] + (2, 2), dtype=complex)
    rots[..., 0, 0] = ea * ec * cb
    rots[..., 0, 1] = -ea * np.conj(ec) * sb
    rots[..., 1, 0] = np.conj(ea) * ec * sb
    rots[..., 1, 1] = np.conj(ea * ec) * cb
    return rots


def _batch_states(rots: np.ndarray) -> np.ndarray:
    """Witness states for a rotation stack: (n, 3, 2, 2) -> (n, 8)."""
    phi = np.einsum("nas,nbs,ncs->nabc", rots[:, 0], rots[:, 1], rots[:, 2])
    return phi.reshape(-1, 8) / np.sqrt(2.0)


def _batch_value(m: np.ndarray, params2d: np.ndarray) -> np.ndarray:
    phi = _batch_states(_euler_columns(params2d))
    y = phi @ m.T
    return 0.75 - np.real(np.einsum("ni,ni->n", phi.conj(), y))


def _batch_value_grad(m: np.ndarray, params2d: np.ndarray):
    rots = _euler_columns(params2d)
    phi = _batch_states(rots)
    y = phi @ m.T
    value = 0.75 - np.real(np.einsum("ni,ni->n", phi.conj(), y))
    yc = y.conj().reshape(-1, 2, 2, 2)
    pt = phi.reshape(-1, 2, 2, 2)
    overlaps = (
        np.einsum("npbc,nqbc->npq", yc, pt),
        np.einsum("napc,naqc->npq", yc, pt),
        np.einsum("nabp,nabq->npq", yc, pt),
    )
    half_diag = np.array([-0.5j, 0.5j])
    grad = np.empty((params2d.shape[0], 9))
    for k in range(3):
        ov = overlaps[k]
        # left generators of the three Euler angles of qubit k
        grad[:, 3 * k] = -2.0 * np.real(np.einsum("npq,pq->n", ov, _HALF_Z))
        eia = np.exp(-1j * params2d[:, 3 * k])
        mid = ov[:, 0, 1] * (-0.5 * eia) + ov[:, 1, 0] * (0.5 * np.conj(eia))
        grad[:, 3 * k + 1] = -2.0 * np.real(mid)
        gen_c = np.einsum(
            "nps,s,nqs->npq", rots[:, k], half_diag, rots[:, k].conj()
        )
        grad[:, 3 * k + 2] = -2.0 * np.real(np.einsum("npq,npq->n", ov, gen_c))
    return value, grad


def witness_gradient(rho, rotation_params) -> np.ndarray:
    """Analytic gradient of witness_value in the 9 rotation angles."""
    m = _density8(rho)
    params = _split_params(rotation_params)
    _, grad = _batch_value_grad(m, params[None, :])
    return grad[0]


def _descend_batch(m: np.ndarray, starts: np.ndarray):
    """Steepest descent with backtracking (halving) line search.

    All rows advance in lock step; each row sees exactly the serial
    algorithm (Armijo acceptance, step doubling capped at 4, stop when its
    gradient norm drops below GRAD_NORM_TOL or no representable descent
    direction remains), and frozen rows stop consuming work.
    """
    params = np.array(starts, dtype=float)
    value, grad = _batch_value_grad(m, params)
    step = np.ones(params.shape[0])
    active = np.linalg.norm(grad, axis=1) >= GRAD_NORM_TOL
    for _ in range(MAX_ITERATIONS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        g = grad[idx]
        gsq = np.einsum("nj,nj->n", g, g)
        t = step[idx].copy()
        cand = params[idx] - t[:, None] * g
        cval = _batch_value(m, cand)
        retry = (cval > value[idx] - ARMIJO_C * t * gsq) & (t >= 1e-18)
        while np.any(retry):
            t[retry] *= 0.5
            cand[retry] = params[idx[retry]] - t[retry, None] * g[retry]
            cval[retry] = _batch_value(m, cand[retry])
            retry = (cval > value[idx] - ARMIJO_C * t * gsq) & (t >= 1e-18)
        ok = t >= 1e-18
        active[idx[~ok]] = False  # no descent representable at double precision
        moved = idx[ok]
        if moved.size:
            params[moved] = cand[ok]
            mval, mgrad = _batch_value_grad(m, params[moved])
            value[moved] = mval
            grad[moved] = mgrad
            step[moved] = np.minimum(2.0 * t[ok], 4.0)
            done = np.linalg.norm(mgrad, axis=1) < GRAD_NORM_TOL
            active[moved[done]] = False
    return value, params


def minimize_witness(rho, restarts: int = 64, seed: int = 0) -> WitnessSearchResult:
    """Multi-start steepest descent on the witness angles.

    Each restart draws its starting point from its own stream derived from
    (seed, restart index), so results do not depend on execution order.
    """
    if restarts < 1:
        raise ContractError("restarts must be >= 1")
    m = _density8(rho)
    starts = np.stack(
        [
            np.random.default_rng([seed, i]).uniform(0.0, 2.0 * np.pi, 9)
            for i in range(restarts)
        ]
    )
    finals, ends = _descend_batch(m, starts)
    best = int(np.argmin(finals))
    converged = float(np.mean(finals <= finals[best] + 1e-6))
    return WitnessSearchResult(
        float(finals[best]),
        tuple(float(x) for x in ends[best]),
        int(restarts),
        converged,
    )
