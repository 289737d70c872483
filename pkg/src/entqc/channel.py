"""Four-qubit channel construction and validation.

The channel register is ordered (A1, A2, B1, B2): the first pair stays with
the sender, the second travels to the receiver. A channel is usable for
teleportation exactly when both two-qubit marginals are maximally mixed.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .tensor import (
    ATOL,
    ContractError,
    I2,
    LabelError,
    QubitRegister,
    StateVector,
    _as_complex,
    apply_unitary,
    kron,
    reduced_density,
    require_unitary,
)

CHANNEL_LABELS = ("A1", "A2", "B1", "B2")
SENDER_LABELS = ("A1", "A2")
RECEIVER_LABELS = ("B1", "B2")

# Looser than construction tolerance so accumulated products still validate.
VALID_CHANNEL_ATOL = 1e-10

BUILTIN_CHANNELS = ("epr", "bell-transformed", "ghz")


@dataclass(frozen=True)
class ChannelSpec:
    """A two-qubit dressing applied to the receiver half of the EPR-pair channel.

    Only the net dressing is stored: the protocol cannot distinguish how it
    was factored. `label_map` names the four slots, sender pair first.
    """

    dressing: np.ndarray
    name: str = ""
    label_map: tuple[str, str, str, str] = CHANNEL_LABELS

    def __post_init__(self):
        d = require_unitary(self.dressing, what="channel dressing")
        if d.shape != (4, 4):
            raise ContractError("channel dressing must be a two-qubit (4x4) operator")
        object.__setattr__(self, "dressing", d)
        lm = tuple(self.label_map)
        if len(lm) != 4 or len(set(lm)) != 4:
            raise LabelError(f"label_map must name four distinct qubits, got {lm}")
        object.__setattr__(self, "label_map", lm)


def epr_pair_channel() -> StateVector:
    """Two EPR pairs, (A1,B1) and (A2,B2), as a single four-qubit channel."""
    amps = np.zeros(16, dtype=complex)
    for i in range(2):
        for j in range(2):
            amps[(i << 3) | (j << 2) | (i << 1) | j] = 0.5
    return StateVector(QubitRegister(CHANNEL_LABELS), amps)


def dressed_channel(spec: ChannelSpec) -> StateVector:
    """The EPR-pair channel with `spec.dressing` applied to the receiver pair."""
    state = apply_unitary(epr_pair_channel(), spec.dressing, RECEIVER_LABELS)
    if spec.label_map != CHANNEL_LABELS:
        state = StateVector(QubitRegister(spec.label_map), state.amplitudes)
    return state


def bell_transform_matrix() -> np.ndarray:
    """The dressing that turns the product basis into the Bell basis.

    Columns send |00>, |01>, |10>, |11> to (|00>-|11>)/sqrt2, (|01>-|10>)/sqrt2,
    (|01>+|10>)/sqrt2, (|00>+|11>)/sqrt2. Dressing the EPR-pair channel with it
    yields the reference inseparable channel used throughout the test suite.
    """
    s = 1.0 / np.sqrt(2.0)
    m = np.array(
        [
            [s, 0.0, 0.0, s],
            [0.0, s, s, 0.0],
            [0.0, -s, s, 0.0],
            [-s, 0.0, 0.0, s],
        ],
        dtype=complex,
    )
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class GhzSpec:
    """Two-branch generalized GHZ state of four qubits.

    `amplitudes` weights the two branches; `local_bases` gives one 2x2 unitary
    per qubit whose columns are that qubit's branch-0 and branch-1 kets
    (defaults to the computational basis on every qubit).
    """

    amplitudes: tuple[float, float] = (1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0))
    local_bases: tuple = ()

    def __post_init__(self):
        lam = np.asarray(self.amplitudes, dtype=float)
        if lam.shape != (2,) or np.any(lam < 0.0):
            raise ContractError("amplitudes must be two nonnegative reals")
        if abs(lam[0] ** 2 + lam[1] ** 2 - 1.0) > ATOL:
            raise ContractError("branch amplitudes must satisfy l0^2 + l1^2 = 1")
        object.__setattr__(self, "amplitudes", (float(lam[0]), float(lam[1])))
        bases = self.local_bases or (I2, I2, I2, I2)
        if len(bases) != 4:
            raise ContractError("need one basis pair per qubit (four total)")
        bases = tuple(
            require_unitary(b, what="local basis pair") for b in bases
        )
        for b in bases:
            if b.shape != (2, 2):
                raise ContractError("local basis pairs must be 2x2")
        object.__setattr__(self, "local_bases", bases)


def generalized_ghz(spec: GhzSpec = GhzSpec()) -> StateVector:
    """Sum of two orthogonal product branches with the spec's amplitudes."""
    branch0 = kron(*(b[:, 0] for b in spec.local_bases))
    branch1 = kron(*(b[:, 1] for b in spec.local_bases))
    amps = spec.amplitudes[0] * branch0 + spec.amplitudes[1] * branch1
    return StateVector(QubitRegister(CHANNEL_LABELS), amps)


def is_valid_channel(state: StateVector) -> tuple[bool, float]:
    """Maximal-entanglement check across the sender/receiver split.

    Returns (ok, max_deviation): ok iff both two-qubit marginals equal I/4
    within 1e-10, with the worst entrywise deviation reported either way.
    """
    if state.register.size != 4:
        raise ContractError("a channel state must have exactly four qubits")
    target = np.eye(4) / 4.0
    dev = 0.0
    for keep in (state.register.labels[:2], state.register.labels[2:]):
        marginal = reduced_density(state, keep).matrix
        dev = max(dev, float(np.abs(marginal - target).max()))
    return dev <= VALID_CHANNEL_ATOL, dev


@dataclass(frozen=True)
class ResolvedChannel:
    """A named channel ready for use: spec (when dressed) plus its state."""

    name: str
    spec: ChannelSpec | None
    state: StateVector


def builtin_channel(name: str) -> ResolvedChannel:
    if name == "epr":
        spec = ChannelSpec(np.eye(4, dtype=complex), name="epr")
    elif name == "bell-transformed":
        spec = ChannelSpec(bell_transform_matrix(), name="bell-transformed")
    elif name == "ghz":
        return ResolvedChannel("ghz", None, generalized_ghz())
    else:
        raise ContractError(
            f"unknown channel {name!r}; built-ins: {', '.join(BUILTIN_CHANNELS)}"
        )
    return ResolvedChannel(name, spec, dressed_channel(spec))


def _complex_from_pair(node, what: str) -> complex:
    if (
        not isinstance(node, (list, tuple))
        or len(node) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in node)
    ):
        raise ContractError(f"{what}: complex entries must be [re, im] pairs")
    return complex(node[0], node[1])


def _matrix_from_json(node, what: str) -> np.ndarray:
    """Accept 16 [re,im] pairs row-major, or four rows of four pairs."""
    if not isinstance(node, list):
        raise ContractError(f"{what} must be a JSON array")
    if len(node) == 16:
        flat = [_complex_from_pair(x, what) for x in node]
    elif len(node) == 4 and all(isinstance(r, list) and len(r) == 4 for r in node):
        flat = [_complex_from_pair(x, what) for row in node for x in row]
    else:
        raise ContractError(
            f"{what} must be 16 [re, im] pairs (row-major) or a 4x4 nesting of them"
        )
    return _as_complex(flat, what).reshape(4, 4)


def load_channel_json(path: str) -> ChannelSpec:
    """Parse a channel spec document; raises ContractError on malformed input."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ContractError(f"cannot read channel file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ContractError(f"channel file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ContractError(f"channel file {path!r} must hold a JSON object")
    name = doc.get("name", os.path.splitext(os.path.basename(path))[0])
    if not isinstance(name, str):
        raise ContractError("channel name must be a string")
    if "dressing" in doc:
        dressing = _matrix_from_json(doc["dressing"], "dressing")
    elif "u" in doc and "v" in doc:
        # factored form: net dressing = v . u^T, multiplied out immediately
        u = _matrix_from_json(doc["u"], "u")
        v = _matrix_from_json(doc["v"], "v")
        dressing = v @ u.T
    else:
        raise ContractError(
            'channel file needs a "dressing" matrix (or factored "u" and "v")'
        )
    return ChannelSpec(dressing, name=name)


def resolve_channel(arg: str) -> ResolvedChannel:
    """Map a CLI-style channel argument (built-in name or JSON path)."""
    if arg in BUILTIN_CHANNELS:
        return builtin_channel(arg)
    if arg.endswith(".json") or os.path.exists(arg):
        spec = load_channel_json(arg)
        return ResolvedChannel(spec.name, spec, dressed_channel(spec))
    raise ContractError(
        f"unknown channel {arg!r}; built-ins: {', '.join(BUILTIN_CHANNELS)} "
        "(or pass a .json spec file)"
    )
