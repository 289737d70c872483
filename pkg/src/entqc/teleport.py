"""The sixteen-outcome joint measurement and the full teleportation protocol.

Roles by register: the unknown input lives on (U1,U2), the sender keeps
(A1,A2), the receiver holds (B1,B2). Measurement bases are four-qubit states
on (A1,A2,U1,U2); the protocol itself is simulated as an honest six-qubit
contraction, with no algebraic shortcuts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, dressed_channel
from .tensor import (
    ATOL,
    EIG_ATOL,
    ContractError,
    LabelError,
    PAULIS,
    QubitRegister,
    StateVector,
    _as_complex,
    apply_unitary,
    haar_random_state,
    kron,
    partial_inner,
    reduced_density,
    require_unitary,
    schmidt_rank,
    tensor,
)

UNKNOWN_LABELS = ("U1", "U2")
MEASURED_LABELS = ("A1", "A2", "U1", "U2")

#: outcome alphabet: (alpha, beta) with 1..4 meaning (identity, x, y, z)
OUTCOMES = tuple((a, b) for a in range(1, 5) for b in range(1, 5))
_OUTCOME_INDEX = {g: i for i, g in enumerate(OUTCOMES)}

#: the two admissible sender/input pairings for separability questions
BASIS_SPLITS = ((("A1", "U1"), ("A2", "U2")), (("A1", "U2"), ("A2", "U1")))

POVM_ATOL = 1e-10
SCHMIDT_TOL = 1e-10


def pauli_pair(alpha: int, beta: int) -> np.ndarray:
    """sigma_alpha (x) sigma_beta with indices 1..4 = (identity, x, y, z)."""
    if alpha not in (1, 2, 3, 4) or beta not in (1, 2, 3, 4):
        raise ContractError(f"outcome indices must lie in 1..4, got {(alpha, beta)}")
    return kron(PAULIS[alpha - 1], PAULIS[beta - 1])


@dataclass(frozen=True)
class UnknownState:
    """The two-qubit input to be teleported: amplitudes (c00, c01, c10, c11)."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = _as_complex(self.coefficients, "coefficients").reshape(-1).copy()
        if c.size != 4:
            raise ContractError("an unknown state has four amplitudes")
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > ATOL:
            raise ContractError(f"unknown state is not normalized: |c| = {norm!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @staticmethod
    def from_reals(reals) -> "UnknownState":
        """Build from 8 reals read as 4 [re, im] pairs."""
        arr = np.asarray(reals, dtype=float).reshape(-1)
        if arr.size != 8:
            raise ContractError("expected 8 reals (4 [re, im] pairs)")
        return UnknownState(arr[0::2] + 1j * arr[1::2])

    @staticmethod
    def random(seed) -> "UnknownState":
        return UnknownState(haar_random_state(2, seed))

    def as_state(self, labels=UNKNOWN_LABELS) -> StateVector:
        return StateVector(QubitRegister(tuple(labels)), self.coefficients)


@dataclass(frozen=True)
class MeasurementBasis:
    """Sixteen joint-measurement kets on (A1,A2,U1,U2), in OUTCOMES order."""

    kets: tuple[StateVector, ...]

    def __post_init__(self):
        kets = tuple(self.kets)
        if len(kets) != 16:
            raise ContractError(f"a measurement basis has 16 kets, got {len(kets)}")
        for ket in kets:
            if ket.register.labels != MEASURED_LABELS:
                raise ContractError(
                    f"basis kets must live on {MEASURED_LABELS}, got "
                    f"{ket.register.labels}"
                )
        stack = np.stack([k.amplitudes for k in kets])
        gram_dev = np.abs(stack @ stack.conj().T - np.eye(16)).max()
        if gram_dev > ATOL:
            raise ContractError(f"basis is not orthonormal: deviation {gram_dev:.3e}")
        complete_dev = np.abs(stack.T @ stack.conj() - np.eye(16)).max()
        if complete_dev > ATOL:
            raise ContractError(
                f"basis projectors do not resolve the identity: {complete_dev:.3e}"
            )
        object.__setattr__(self, "kets", kets)

    def ket(self, outcome) -> StateVector:
        key = tuple(outcome)
        if key not in _OUTCOME_INDEX:
            raise ContractError(f"unknown outcome {key}; both indices run 1..4")
        return self.kets[_OUTCOME_INDEX[key]]

    def items(self):
        return zip(OUTCOMES, self.kets)


@dataclass(frozen=True)
class CorrectionTable:
    """The receiver's per-outcome recovery unitaries, in OUTCOMES order."""

    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(self.ops)
        if len(ops) != 16:
            raise ContractError(f"a correction table has 16 entries, got {len(ops)}")
        checked = []
        for op in ops:
            u = require_unitary(op, what="correction")
            if u.shape != (4, 4):
                raise ContractError("corrections act on two qubits (4x4)")
            checked.append(u)
        object.__setattr__(self, "ops", tuple(checked))

    def op(self, outcome) -> np.ndarray:
        key = tuple(outcome)
        if key not in _OUTCOME_INDEX:
            raise ContractError(f"unknown outcome {key}; both indices run 1..4")
        return self.ops[_OUTCOME_INDEX[key]]

    def items(self):
        return zip(OUTCOMES, self.ops)


@dataclass(frozen=True)
class TeleportOutcome:
    """One of the sixteen measurement results and the receiver's states."""

    outcome: tuple[int, int]
    probability: float
    bob_state: StateVector
    corrected_state: StateVector


def _epr_pairs_on(labels) -> StateVector:
    """Two EPR pairs pairing slots (0,2) and (1,3) of the given labels."""
    amps = np.zeros(16, dtype=complex)
    for i in range(2):
        for j in range(2):
            amps[(i << 3) | (j << 2) | (i << 1) | j] = 0.5
    return StateVector(QubitRegister(tuple(labels)), amps)


def measurement_basis(channel: ChannelSpec) -> MeasurementBasis:
    """The sixteen kets (1 (x) sigma-pair . dressing) |EPR pairs> on (A,U)."""
    base = apply_unitary(
        _epr_pairs_on(MEASURED_LABELS), channel.dressing, UNKNOWN_LABELS
    )
    kets = tuple(
        apply_unitary(base, pauli_pair(a, b), UNKNOWN_LABELS) for a, b in OUTCOMES
    )
    return MeasurementBasis(kets)


def standard_corrections() -> CorrectionTable:
    """Recovery table for the dressed protocol: plain sigma-pairs."""
    return CorrectionTable(tuple(pauli_pair(a, b) for a, b in OUTCOMES))


def partial_inner_transfer(
    basis_ket: StateVector, channel_state: StateVector
) -> np.ndarray:
    """Contract a basis ket against a channel state over their shared labels.

    For a ket on (A,U) and a channel on (A,B) this is the 4x4 block mapping
    input amplitudes on U to receiver amplitudes on B; for the standard
    protocol it equals 1/4 times the inverse correction.
    """
    try:
        ket_only, bra_only, block = partial_inner(basis_ket, channel_state)
    except LabelError as exc:
        raise ContractError(f"register mismatch: {exc}") from exc
    if block.shape != (4, 4):
        raise ContractError(
            "register mismatch: expected two shared and two private qubits per "
            f"side, got leftovers {ket_only} / {bra_only}"
        )
    return block


def corrections_from(
    basis: MeasurementBasis, channel_state: StateVector
) -> CorrectionTable:
    """Recovery unitaries implied by a basis/channel pairing: (4 . transfer)†.

    Fails (non-unitary transfer) when the channel is not maximally entangled.
    """
    ops = []
    for ket in basis.kets:
        block = 4.0 * partial_inner_transfer(ket, channel_state)
        ops.append(block.conj().T)
    return CorrectionTable(tuple(ops))


def run_protocol(
    unknown: UnknownState,
    basis: MeasurementBasis,
    channel_state: StateVector,
    corrections: CorrectionTable,
) -> list[TeleportOutcome]:
    """Simulate all sixteen outcomes of one protocol variant end to end."""
    psi = tensor(unknown.as_state(), channel_state)
    results = []
    for (outcome, ket), (_, op) in zip(basis.items(), corrections.items()):
        rest, _, block = partial_inner(ket, psi)
        raw = block.reshape(-1)
        probability = float(np.real(np.vdot(raw, raw)))
        bob = StateVector.from_raw(rest, raw)
        corrected = apply_unitary(bob, op, rest)
        results.append(TeleportOutcome(outcome, probability, bob, corrected))
    return results


def teleport_all_outcomes(
    unknown: UnknownState, channel: ChannelSpec
) -> list[TeleportOutcome]:
    """The standard protocol: dressed basis, dressed channel, sigma corrections."""
    return run_protocol(
        unknown,
        measurement_basis(channel),
        dressed_channel(channel),
        standard_corrections(),
    )


def invariance_transform(
    basis: MeasurementBasis,
    corrections: CorrectionTable,
    w_l,
    w_r,
) -> tuple[MeasurementBasis, tuple[StateVector, ...]]:
    """Conjugate every basis/channel pair by (w_r^T on the sender pair, w_l on
    the other pair).

    The sixteen channel states are generated from the corrections table as
    (1 (x) C_g)|channel>, with the bare channel read off the (1,1) basis ket;
    per-pair transfer blocks and protocol statistics are unchanged.
    """
    wl = require_unitary(w_l, what="w_l")
    wr = require_unitary(w_r, what="w_r")
    if wl.shape != (4, 4) or wr.shape != (4, 4):
        raise ContractError("w_l and w_r must be two-qubit (4x4) unitaries")
    wrt = wr.T
    bare = basis.ket((1, 1)).relabeled({"U1": "B1", "U2": "B2"})
    new_kets = []
    new_channels = []
    for (_, ket), (_, op) in zip(basis.items(), corrections.items()):
        t_ket = apply_unitary(ket, wrt, ("A1", "A2"))
        t_ket = apply_unitary(t_ket, wl, UNKNOWN_LABELS)
        chan = apply_unitary(bare, op, ("B1", "B2"))
        chan = apply_unitary(chan, wrt, ("A1", "A2"))
        chan = apply_unitary(chan, wl, ("B1", "B2"))
        new_kets.append(t_ket)
        new_channels.append(chan)
    return MeasurementBasis(tuple(new_kets)), tuple(new_channels)


def series_form(channel: ChannelSpec) -> tuple[MeasurementBasis, CorrectionTable]:
    """Push the dressing out of the joint measurement into the corrections.

    The returned basis is built on bare EPR pairs (every ket is a product
    across (A1,U1)|(A2,U2)); each correction picks up the inverse dressing and
    is generally nonlocal across (B1,B2). Run against the *unchanged* dressed
    channel, the protocol still achieves unit fidelity.
    """
    inverse = channel.dressing.conj().T
    basis, _ = invariance_transform(
        measurement_basis(channel),
        standard_corrections(),
        np.eye(4, dtype=complex),
        inverse,
    )
    table = CorrectionTable(
        tuple(pauli_pair(a, b) @ inverse for a, b in OUTCOMES)
    )
    return basis, table


def is_separable_basis(basis: MeasurementBasis) -> dict:
    """Per-split verdicts: does every ket factor across that pairing?

    Keys are the two admissible splits in BASIS_SPLITS; a ket factors when its
    Schmidt coefficients beyond the first vanish (below 1e-10).
    """
    verdicts = {}
    for split in BASIS_SPLITS:
        part = split[0]
        verdicts[split] = all(
            schmidt_rank(ket, part, tol=SCHMIDT_TOL) == 1 for ket in basis.kets
        )
    return verdicts


def povm_check(unitary_set, channel_state: StateVector) -> tuple[bool, float]:
    """Does averaging (1 (x) U)|phi><phi|(1 (x) U)† over the set give 1/16?

    `channel_state` must be maximally entangled across its first-two/last-two
    split; the unitaries act on the last two qubits. Returns (ok, deviation).
    """
    if channel_state.register.size != 4:
        raise ContractError("povm_check expects a four-qubit state")
    first = channel_state.register.labels[:2]
    marginal = reduced_density(channel_state, first).matrix
    if np.abs(marginal - np.eye(4) / 4.0).max() > EIG_ATOL:
        raise ContractError(
            "povm_check expects a maximally entangled state across its "
            "first-two/last-two split"
        )
    ops = [require_unitary(u, what="set member") for u in unitary_set]
    if not ops:
        raise ContractError("the unitary set must be non-empty")
    last = channel_state.register.labels[2:]
    acc = np.zeros((16, 16), dtype=complex)
    for u in ops:
        twirled = apply_unitary(channel_state, u, last).amplitudes
        acc += np.outer(twirled, twirled.conj())
    acc /= len(ops)
    deviation = float(np.abs(acc - np.eye(16) / 16.0).max())
    return deviation <= POVM_ATOL, deviation
