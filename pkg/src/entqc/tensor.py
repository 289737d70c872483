"""Dense linear algebra over small labeled qubit registers.

Every other module leans on the conventions fixed here: slot 0 of a register
is the most significant bit of the basis-state index (so a two-qubit ket
|i,j> sits at index 2*i + j), amplitudes are dense complex128 vectors, and
the two global tolerances below are used for all algebraic checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

ATOL = 1e-12  # algebraic identities: norms, unitarity, hermiticity, traces
EIG_ATOL = 1e-10  # anything that passed through an eigensolver or SVD

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# Single-qubit operator basis in the fixed order (identity, x, y, z); code
# elsewhere indexes outcomes 1..4 into this tuple.
PAULIS = (I2, SIGMA_X, SIGMA_Y, SIGMA_Z)


class LabelError(ValueError):
    """A qubit label is unknown, duplicated, or inconsistent between registers."""


class ContractError(ValueError):
    """An input violates a documented precondition (norm, unitarity, shape...)."""


def _as_complex(a, what: str = "array") -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{what} contains non-finite entries")
    return arr


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more vectors/matrices, left to right."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (_as_complex(f) for f in factors))


def require_unitary(m, *, tol: float = ATOL, what: str = "matrix") -> np.ndarray:
    """Validate U†U = 1 within `tol` and return a read-only complex copy."""
    u = _as_complex(m, what).copy()
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ContractError(f"{what} is not square: shape {u.shape}")
    dev = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if dev > tol:
        raise ContractError(f"{what} is not unitary: deviation {dev:.3e} > {tol:g}")
    u.setflags(write=False)
    return u


def require_hermitian(m, *, tol: float = ATOL, what: str = "matrix") -> np.ndarray:
    """Validate M = M† within `tol` and return a read-only complex copy."""
    h = _as_complex(m, what).copy()
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractError(f"{what} is not square: shape {h.shape}")
    dev = np.abs(h - h.conj().T).max()
    if dev > tol:
        raise ContractError(f"{what} is not Hermitian: deviation {dev:.3e} > {tol:g}")
    h.setflags(write=False)
    return h


@dataclass(frozen=True)
class QubitRegister:
    """An ordered collection of named qubits; order fixes bit significance."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise LabelError("a register needs at least one qubit")
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate qubit labels in {labels}")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return 2 ** len(self.labels)

    def axes(self, labels) -> tuple[int, ...]:
        """Tensor-axis positions of the given labels, in the order given."""
        out = []
        for lab in labels:
            if lab not in self.labels:
                raise LabelError(
                    f"unknown qubit label {lab!r}; register has {self.labels}"
                )
            out.append(self.labels.index(lab))
        if len(set(out)) != len(out):
            raise LabelError(f"repeated qubit label in {tuple(labels)}")
        return tuple(out)


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state over a labeled register."""

    register: QubitRegister
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex(self.amplitudes, "amplitudes").reshape(-1).copy()
        if amps.size != self.register.dim:
            raise ContractError(
                f"register {self.register.labels} needs {self.register.dim} "
                f"amplitudes, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise ContractError(f"state is not normalized: |psi| = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @staticmethod
    def from_raw(labels, raw) -> "StateVector":
        """Normalize a raw amplitude vector; error on a (near-)zero vector."""
        raw = _as_complex(raw, "amplitudes").reshape(-1)
        norm = np.linalg.norm(raw)
        if norm < 1e-14:
            raise ContractError("cannot normalize a zero amplitude vector")
        return StateVector(QubitRegister(tuple(labels)), raw / norm)

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.register.size)

    def permuted(self, new_order) -> "StateVector":
        """Same state with register slots reordered to `new_order`."""
        axes = self.register.axes(new_order)
        if len(axes) != self.register.size:
            raise LabelError("permutation must mention every label exactly once")
        t = np.transpose(self.tensor_view(), axes)
        return StateVector(QubitRegister(tuple(new_order)), t.reshape(-1))

    def relabeled(self, mapping) -> "StateVector":
        """Rename labels without touching amplitudes."""
        labels = tuple(mapping.get(lab, lab) for lab in self.register.labels)
        return StateVector(QubitRegister(labels), self.amplitudes)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product of two states on disjoint registers."""
    shared = set(a.register.labels) & set(b.register.labels)
    if shared:
        raise LabelError(f"registers overlap on {sorted(shared)}")
    return StateVector(
        QubitRegister(a.register.labels + b.register.labels),
        np.kron(a.amplitudes, b.amplitudes),
    )


def apply_unitary(state: StateVector, matrix, targets) -> StateVector:
    """Apply a unitary to the named qubits, returning a new state."""
    axes = state.register.axes(targets)
    k = len(axes)
    u = require_unitary(matrix, what="operator")
    if u.shape != (2**k, 2**k):
        raise ContractError(f"operator shape {u.shape} does not fit {k} qubit(s)")
    t = np.tensordot(
        u.reshape((2,) * (2 * k)), state.tensor_view(),
        axes=(tuple(range(k, 2 * k)), axes),
    )
    t = np.moveaxis(t, tuple(range(k)), axes)
    return StateVector(state.register, t.reshape(-1))


def partial_inner(bra: StateVector, ket: StateVector):
    """Contract <bra| against |ket> over their shared labels.

    Returns (ket_only_labels, bra_only_labels, block) where block has shape
    (2**len(ket_only), 2**len(bra_only)); a 1x1 block is an ordinary inner
    product.  Ket-only rows map the bra-only columns, each in register order.
    """
    ket_set = set(ket.register.labels)
    shared = [lab for lab in bra.register.labels if lab in ket_set]
    if not shared:
        raise LabelError("no shared labels to contract")
    bra_only = tuple(lab for lab in bra.register.labels if lab not in ket_set)
    ket_only = tuple(lab for lab in ket.register.labels if lab not in set(shared))
    letter = {}
    for lab in ket.register.labels + bra_only:
        letter[lab] = chr(ord("a") + len(letter))
    ket_sub = "".join(letter[lab] for lab in ket.register.labels)
    bra_sub = "".join(letter[lab] for lab in bra.register.labels)
    out_sub = "".join(letter[lab] for lab in ket_only + bra_only)
    block = np.einsum(
        f"{ket_sub},{bra_sub}->{out_sub}",
        ket.tensor_view(), bra.tensor_view().conj(),
    )
    return ket_only, bra_only, block.reshape(2 ** len(ket_only), 2 ** len(bra_only))


@dataclass(frozen=True)
class DensityMatrix:
    """A unit-trace positive-semidefinite operator over a labeled register."""

    register: QubitRegister
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex(self.matrix, "density matrix").copy()
        if m.shape != (self.register.dim, self.register.dim):
            raise ContractError(
                f"density matrix shape {m.shape} does not match register "
                f"{self.register.labels}"
            )
        if np.abs(m - m.conj().T).max() > ATOL:
            raise ContractError("density matrix is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > ATOL:
            raise ContractError(f"density matrix trace {tr} is not 1")
        if np.linalg.eigvalsh(m).min() < -EIG_ATOL:
            raise ContractError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @staticmethod
    def from_state(state: StateVector) -> "DensityMatrix":
        return DensityMatrix(
            state.register, np.outer(state.amplitudes, state.amplitudes.conj())
        )


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every qubit not named in `keep`; output follows `keep` order."""
    keep = tuple(keep)
    kaxes = rho.register.axes(keep)
    n = rho.register.size
    taxes = [i for i in range(n) if i not in kaxes]
    t = rho.matrix.reshape((2,) * (2 * n))
    perm = [*kaxes, *taxes, *(n + i for i in kaxes), *(n + i for i in taxes)]
    dk, dt = 2 ** len(kaxes), 2 ** len(taxes)
    t = np.transpose(t, perm).reshape(dk, dt, dk, dt)
    return DensityMatrix(QubitRegister(keep), np.einsum("abcb->ac", t))


def reduced_density(state: StateVector, keep) -> DensityMatrix:
    """Reduced density matrix of a pure state, without the full projector."""
    keep = tuple(keep)
    kaxes = state.register.axes(keep)
    taxes = [i for i in range(state.register.size) if i not in kaxes]
    psi = state.tensor_view()
    block = np.tensordot(psi, psi.conj(), axes=(taxes, taxes))
    # tensordot leaves kept axes in register order; restore the caller's order
    rank = {a: r for r, a in enumerate(sorted(kaxes))}
    perm = [rank[a] for a in kaxes]
    k = len(kaxes)
    block = np.transpose(block, perm + [k + p for p in perm])
    dk = 2**k
    return DensityMatrix(QubitRegister(keep), block.reshape(dk, dk))


def partial_transpose(rho: DensityMatrix, part) -> np.ndarray:
    """Transpose row/column indices of the named qubits; may be non-PSD."""
    paxes = rho.register.axes(part)
    n = rho.register.size
    t = rho.matrix.reshape((2,) * (2 * n))
    perm = list(range(2 * n))
    for a in paxes:
        perm[a], perm[n + a] = perm[n + a], perm[a]
    return np.transpose(t, perm).reshape(rho.register.dim, rho.register.dim)


def hermitian_eigenvalues(m) -> np.ndarray:
    """Real eigenvalues in ascending order; input must be Hermitian."""
    h = require_hermitian(m, tol=EIG_ATOL)
    return np.linalg.eigvalsh(h)


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for equal-dimension pure states (labels may differ)."""
    if a.register.dim != b.register.dim:
        raise ContractError(
            f"dimension mismatch: {a.register.labels} vs {b.register.labels}"
        )
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def _resolve_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_unitary(n_qubits: int, seed) -> np.ndarray:
    """Haar-distributed unitary on `n_qubits` (Ginibre QR with phase fix).

    `seed` is an integer (PCG64 stream) or an existing Generator.
    """
    rng = _resolve_rng(seed)
    dim = 2**n_qubits
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    u = q * (d / np.abs(d))
    u.setflags(write=False)
    return u


def haar_random_state(n_qubits: int, seed) -> np.ndarray:
    """Uniformly random pure-state amplitudes on `n_qubits`."""
    rng = _resolve_rng(seed)
    dim = 2**n_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def schmidt_coefficients(state: StateVector, part) -> np.ndarray:
    """Singular values (descending) across the (part | rest) bipartition."""
    paxes = state.register.axes(part)
    rest = [i for i in range(state.register.size) if i not in paxes]
    if not paxes or not rest:
        raise LabelError("a bipartition needs qubits on both sides")
    t = np.transpose(state.tensor_view(), [*paxes, *rest])
    return np.linalg.svd(t.reshape(2 ** len(paxes), -1), compute_uv=False)


def schmidt_rank(state: StateVector, part, tol: float = EIG_ATOL) -> int:
    return int(np.count_nonzero(schmidt_coefficients(state, part) > tol))


def operator_schmidt_coefficients(m) -> np.ndarray:
    """Singular values of a two-qubit operator reshuffled across its factors.

    A product operator X (x) Y has exactly one nonzero coefficient.
    """
    m = _as_complex(m, "operator")
    if m.shape != (4, 4):
        raise ContractError("expected a two-qubit (4x4) operator")
    r = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return np.linalg.svd(r, compute_uv=False)


def operator_schmidt_rank(m, tol: float = EIG_ATOL) -> int:
    return int(np.count_nonzero(operator_schmidt_coefficients(m) > tol))
