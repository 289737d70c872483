"""Built-in verification suite.

Every quantitative claim the package makes is re-checked here at its pinned
tolerance and collected into a plain-dict report that the CLI serializes.
Sections are deterministic functions of (seed, restarts, tol) only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    ChannelSpec,
    GhzSpec,
    bell_transform_matrix,
    builtin_channel,
    dressed_channel,
    epr_pair_channel,
    generalized_ghz,
    is_valid_channel,
)
from .entanglement import (
    CHANNEL_PAIRS,
    CHANNEL_TRIADS,
    minimize_witness,
    pair_analysis,
    symmetric_w_state,
    triad_analysis,
    triad_component_states,
    witness_gradient,
    witness_state,
    witness_value,
)
from .tensor import (
    ContractError,
    DensityMatrix,
    fidelity_pure,
    haar_random_unitary,
    hermitian_eigenvalues,
    operator_schmidt_rank,
    reduced_density,
    schmidt_coefficients,
    schmidt_rank,
)
from .teleport import (
    OUTCOMES,
    UnknownState,
    corrections_from,
    invariance_transform,
    is_separable_basis,
    measurement_basis,
    partial_inner_transfer,
    pauli_pair,
    povm_check,
    run_protocol,
    series_form,
    standard_corrections,
    teleport_all_outcomes,
)

DEFAULT_SEED = 7
DEFAULT_RESTARTS = 64
DEFAULT_WITNESS_TOL = 1e-3

# Expected pair marginals of the Bell-transformed reference channel. The
# (A1,B1) block differs from the (A2,B2) one by the sign of its cross terms;
# both share the PT spectrum (0, 0, 1/2, 1/2).
PAIR_A1B1 = 0.25 * np.array(
    [[1, 0, 0, 1], [0, 1, -1, 0], [0, -1, 1, 0], [1, 0, 0, 1]], dtype=complex
)
PAIR_A2B2 = 0.25 * np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=complex
)

# Nonzero amplitudes of the Bell-transformed channel on (A1,A2,B1,B2).
BELL_CHANNEL_SIGNS = {
    0b0000: 1, 0b0011: -1, 0b0101: 1, 0b0110: -1,
    0b1001: 1, 0b1010: 1, 0b1100: 1, 0b1111: 1,
}


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = DEFAULT_SEED
    restarts: int = DEFAULT_RESTARTS
    tol: float = DEFAULT_WITNESS_TOL
    teleport_trials: int = 1000
    invariance_trials: int = 100
    gradient_points: int = 100


def check(name, value, target=None, tolerance=None):
    """One report row; numeric rows compare |value - target| to tolerance."""
    if isinstance(value, (bool, np.bool_)):
        value = bool(value)
        passed = None if target is None else value == bool(target)
        return {"name": name, "value": value, "target": target,
                "tolerance": None, "pass": passed}
    if isinstance(value, (int, np.integer)) and tolerance is None and target is not None:
        value = int(value)
        return {"name": name, "value": value, "target": int(target),
                "tolerance": 0, "pass": value == int(target)}
    if isinstance(value, (list, tuple)):
        return {"name": name, "value": list(value), "target": target,
                "tolerance": tolerance, "pass": None}
    value = float(value)
    passed = None
    if target is not None and tolerance is not None:
        passed = abs(value - float(target)) <= tolerance
    return {"name": name, "value": value, "target": target,
            "tolerance": tolerance, "pass": passed}


def section(name, checks):
    gates = [c["pass"] for c in checks if c["pass"] is not None]
    return {"name": name, "checks": checks, "pass": all(gates) if gates else True}


def _bitstring(index, width=4):
    return format(index, f"0{width}b")


def section_channel(cfg: SuiteConfig):
    checks = []
    dressing = bell_transform_matrix()
    unit_dev = float(np.abs(dressing.conj().T @ dressing - np.eye(4)).max())
    checks.append(check("dressing unitarity deviation", unit_dev, 0.0, 1e-15))

    state = dressed_channel(ChannelSpec(dressing, name="bell-transformed"))
    amp = 1.0 / (2.0 * np.sqrt(2.0))
    zero_dev = 0.0
    for idx in range(16):
        if idx in BELL_CHANNEL_SIGNS:
            target = BELL_CHANNEL_SIGNS[idx] * amp
            checks.append(
                check(
                    f"amplitude[{_bitstring(idx)}]",
                    float(np.real(state.amplitudes[idx])),
                    target,
                    1e-15,
                )
            )
        else:
            zero_dev = max(zero_dev, float(abs(state.amplitudes[idx])))
    checks.append(check("max amplitude off the eight-term support", zero_dev, 0.0, 1e-15))

    identity_dev = float(
        np.abs(
            dressed_channel(ChannelSpec(np.eye(4))).amplitudes
            - epr_pair_channel().amplitudes
        ).max()
    )
    checks.append(check("identity dressing reproduces bare channel", identity_dev, 0.0, 1e-12))

    for name in ("epr", "bell-transformed"):
        ok, dev = is_valid_channel(builtin_channel(name).state)
        checks.append(check(f"{name} marginal deviation from I/4", dev, 0.0, 1e-10))
        checks.append(check(f"{name} is a valid channel", ok, True))

    checks.append(
        check(
            "epr Schmidt rank across (A1,B1)|(A2,B2)",
            schmidt_rank(epr_pair_channel(), ("A1", "B1")),
            1,
        )
    )
    checks.append(
        check(
            "bell-transformed cross-pair Schmidt rank exceeds 1",
            schmidt_rank(state, ("A1", "B1")) > 1,
            True,
        )
    )
    return section("channel", checks)


def section_measurement(cfg: SuiteConfig):
    checks = []
    for name in ("epr", "bell-transformed"):
        basis = measurement_basis(builtin_channel(name).spec)
        stack = np.stack([k.amplitudes for k in basis.kets])
        gram_dev = float(np.abs(stack @ stack.conj().T - np.eye(16)).max())
        complete_dev = float(np.abs(stack.T @ stack.conj() - np.eye(16)).max())
        checks.append(check(f"{name} basis Gram deviation from identity", gram_dev, 0.0, 1e-12))
        checks.append(check(f"{name} projector-sum deviation from identity", complete_dev, 0.0, 1e-12))

    epr_splits = is_separable_basis(measurement_basis(builtin_channel("epr").spec))
    bell_splits = is_separable_basis(
        measurement_basis(builtin_channel("bell-transformed").spec)
    )
    checks.append(
        check("epr basis factors across (A1,U1)(A2,U2)",
              epr_splits[(("A1", "U1"), ("A2", "U2"))], True)
    )
    for split, ok in bell_splits.items():
        label = "".join(str(s) for s in split)
        checks.append(check(f"bell-transformed basis factors across {label}", ok, False))

    paulis = [pauli_pair(a, b) for a, b in OUTCOMES]
    epr_au = builtin_channel("epr").state.relabeled({"B1": "U1", "B2": "U2"})
    ok, dev = povm_check(paulis, epr_au)
    checks.append(check("sigma-pair twirl deviation from I/16", dev, 0.0, 1e-10))
    checks.append(check("sigma-pair set is a complete POVM", ok, True))
    single_ok, _ = povm_check([np.eye(4)], epr_au)
    checks.append(check("a single projector is not a complete POVM", single_ok, False))
    return section("measurement", checks)


def _sweep_teleport(cfg: SuiteConfig):
    rng = np.random.default_rng([cfg.seed, 1])
    max_prob_dev = 0.0
    max_infidelity = 0.0
    max_sum_dev = 0.0
    max_nosignal_dev = 0.0
    quarter = np.eye(4) / 4.0
    for _ in range(cfg.teleport_trials):
        spec = ChannelSpec(haar_random_unitary(2, rng))
        unknown = UnknownState.random(rng)
        target = unknown.as_state()
        outcomes = teleport_all_outcomes(unknown, spec)
        total = 0.0
        marginal = np.zeros((4, 4), dtype=complex)
        for out in outcomes:
            total += out.probability
            max_prob_dev = max(max_prob_dev, abs(out.probability - 1.0 / 16.0))
            max_infidelity = max(
                max_infidelity, abs(1.0 - fidelity_pure(out.corrected_state, target))
            )
            amps = out.bob_state.amplitudes
            marginal += out.probability * np.outer(amps, amps.conj())
        max_sum_dev = max(max_sum_dev, abs(total - 1.0))
        max_nosignal_dev = max(
            max_nosignal_dev, float(np.abs(marginal - quarter).max())
        )
    return max_prob_dev, max_infidelity, max_sum_dev, max_nosignal_dev


def section_teleport(cfg: SuiteConfig):
    checks = []
    prob_dev, infid, sum_dev, nosignal = _sweep_teleport(cfg)
    n = cfg.teleport_trials
    checks.append(check(f"max |probability - 1/16| over {n} random runs", prob_dev, 0.0, 1e-10))
    checks.append(check(f"max corrected infidelity over {n} random runs", infid, 0.0, 1e-10))
    checks.append(check("max |sum of probabilities - 1|", sum_dev, 0.0, 1e-10))
    checks.append(check("max no-signaling marginal deviation from I/4", nosignal, 0.0, 1e-10))

    basis_state = UnknownState([1.0, 0.0, 0.0, 0.0])
    outs = teleport_all_outcomes(basis_state, builtin_channel("epr").spec)
    dev = max(
        abs(1.0 - fidelity_pure(o.corrected_state, basis_state.as_state())) for o in outs
    )
    checks.append(check("teleporting |00> through epr: max infidelity", dev, 0.0, 1e-10))

    entangled = UnknownState(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0))
    outs = teleport_all_outcomes(entangled, builtin_channel("bell-transformed").spec)
    dev = max(
        abs(1.0 - fidelity_pure(o.corrected_state, entangled.as_state())) for o in outs
    )
    checks.append(
        check("teleporting a maximally entangled input through bell-transformed: "
              "max infidelity", dev, 0.0, 1e-10)
    )
    return section("teleport", checks)


def section_ghz(cfg: SuiteConfig):
    checks = []
    state = generalized_ghz(GhzSpec())
    ok, dev = is_valid_channel(state)
    checks.append(check("canonical GHZ accepted as channel", ok, False))
    checks.append(check("GHZ marginal deviation from I/4", dev, 0.25, 1e-12))
    eigs = hermitian_eigenvalues(reduced_density(state, ("A1", "A2")).matrix)
    nonzero = eigs[np.abs(eigs) > 1e-10]
    checks.append(check("nonzero eigenvalues of the sender marginal", nonzero.size, 2))
    branch_dev = float(np.abs(np.sort(nonzero) - np.array([0.5, 0.5])).max())
    checks.append(check("nonzero eigenvalues match branch weights", branch_dev, 0.0, 1e-10))
    return section("ghz", checks)


def section_pairs(cfg: SuiteConfig):
    checks = []
    state = builtin_channel("bell-transformed").state
    half = np.eye(2) / 2.0
    for label in state.register.labels:
        dev = float(np.abs(reduced_density(state, (label,)).matrix - half).max())
        checks.append(check(f"single-qubit marginal {label} deviation from I/2", dev, 0.0, 1e-12))

    quarter = np.eye(4) / 4.0
    expected = {("A1", "B1"): PAIR_A1B1, ("A2", "B2"): PAIR_A2B2}
    pt_target = np.array([0.0, 0.0, 0.5, 0.5])
    for pair in CHANNEL_PAIRS:
        rep = pair_analysis(state, pair)
        tag = f"({pair[0]},{pair[1]})"
        if pair in expected:
            dev = float(np.abs(rep.reduced.matrix - expected[pair]).max())
            checks.append(check(f"pair {tag} matches its reference marginal", dev, 0.0, 1e-12))
            from .tensor import partial_transpose  # local import to avoid cycle noise

            spectrum = hermitian_eigenvalues(partial_transpose(rep.reduced, (pair[1],)))
            pt_dev = float(np.abs(np.sort(spectrum) - pt_target).max())
            checks.append(check(f"pair {tag} PT spectrum deviation from (0,0,1/2,1/2)", pt_dev, 0.0, 1e-10))
        else:
            dev = float(np.abs(rep.reduced.matrix - quarter).max())
            checks.append(check(f"pair {tag} deviation from I/4", dev, 0.0, 1e-12))
        checks.append(check(f"pair {tag} entangled", rep.entangled, False))
    return section("pairs", checks)


def section_wstate(cfg: SuiteConfig):
    checks = []
    state = symmetric_w_state()
    target = (1.0 - np.sqrt(2.0)) / 4.0
    for pair in CHANNEL_PAIRS:
        rep = pair_analysis(state, pair)
        tag = f"({pair[0]},{pair[1]})"
        checks.append(check(f"W-state pair {tag} min PT eigenvalue", rep.min_pt_eigenvalue, target, 1e-10))
        checks.append(check(f"W-state pair {tag} entangled", rep.entangled, True))
    return section("wstate", checks)


def section_triads(cfg: SuiteConfig):
    checks = []
    state = builtin_channel("bell-transformed").state
    for triad in CHANNEL_TRIADS:
        rep = triad_analysis(state, triad)
        tag = f"({triad[0]},{triad[1]},{triad[2]})"
        for i, fid in enumerate(rep.ghz_component_fidelities):
            checks.append(check(f"triad {tag} component {i} fidelity", fid, 1.0, 1e-10))
        for i, tau in enumerate(rep.three_tangles):
            checks.append(check(f"triad {tag} component {i} three-tangle", tau, 1.0, 1e-8))
        comp0, comp1 = triad_component_states(triad)
        recon = 0.5 * np.outer(comp0, comp0.conj()) + 0.5 * np.outer(comp1, comp1.conj())
        recon_dev = float(np.abs(rep.reduced.matrix - recon).max())
        checks.append(check(f"triad {tag} reconstruction deviation", recon_dev, 0.0, 1e-10))
        eigs = np.sort(hermitian_eigenvalues(rep.reduced.matrix))
        eig_target = np.array([0.0] * 6 + [0.5, 0.5])
        eig_dev = float(np.abs(eigs - eig_target).max())
        checks.append(check(f"triad {tag} eigenvalue deviation from (1/2,1/2,0,...)", eig_dev, 0.0, 1e-10))
    return section("triads", checks)


def section_witness(cfg: SuiteConfig):
    checks = []
    state = builtin_channel("bell-transformed").state
    for triad in CHANNEL_TRIADS:
        reduced = reduced_density(state, triad)
        result = minimize_witness(reduced, restarts=cfg.restarts, seed=cfg.seed)
        tag = f"({triad[0]},{triad[1]},{triad[2]})"
        checks.append(check(f"triad {tag} witness minimum", result.min_value, 0.25, cfg.tol))

    plant_rng = np.random.default_rng([cfg.seed, 4242])
    planted_params = plant_rng.uniform(0.0, 2.0 * np.pi, 9)
    phi = witness_state(planted_params)
    planted = np.outer(phi, phi.conj())
    result = minimize_witness(planted, restarts=cfg.restarts, seed=cfg.seed)
    checks.append(check("planted rotated-GHZ witness minimum", result.min_value, -0.25, 1e-4))

    flat = minimize_witness(np.eye(8) / 8.0, restarts=cfg.restarts, seed=cfg.seed)
    checks.append(check("maximally mixed witness minimum", flat.min_value, 0.625, 1e-6))
    checks.append(check("maximally mixed landscape converged fraction", flat.converged_fraction, 1.0, 1e-12))
    return section("witness", checks)


def section_invariance(cfg: SuiteConfig):
    checks = []
    spec = builtin_channel("bell-transformed").spec
    basis = measurement_basis(spec)
    corrections = standard_corrections()
    _, base_channels = invariance_transform(
        basis, corrections, np.eye(4), np.eye(4)
    )
    base_blocks = [
        partial_inner_transfer(ket, chan)
        for ket, chan in zip(basis.kets, base_channels)
    ]
    rng = np.random.default_rng([cfg.seed, 2])
    max_block_dev = 0.0
    max_infidelity = 0.0
    for _ in range(cfg.invariance_trials):
        w_l = haar_random_unitary(2, rng)
        w_r = haar_random_unitary(2, rng)
        t_basis, t_channels = invariance_transform(basis, corrections, w_l, w_r)
        for ket, chan, ref in zip(t_basis.kets, t_channels, base_blocks):
            block = partial_inner_transfer(ket, chan)
            max_block_dev = max(max_block_dev, float(np.abs(block - ref).max()))
        unknown = UnknownState.random(rng)
        target = unknown.as_state()
        physical = t_channels[0]
        t_corrections = corrections_from(t_basis, physical)
        for out in run_protocol(unknown, t_basis, physical, t_corrections):
            max_infidelity = max(
                max_infidelity, abs(1.0 - fidelity_pure(out.corrected_state, target))
            )
    n = cfg.invariance_trials
    checks.append(
        check(f"max transfer-block change over {n} random transforms", max_block_dev, 0.0, 1e-12)
    )
    checks.append(
        check(f"max corrected infidelity over {n} transformed runs", max_infidelity, 0.0, 1e-10)
    )
    return section("invariance", checks)


def section_series(cfg: SuiteConfig):
    checks = []
    for name in ("bell-transformed", "epr"):
        resolved = builtin_channel(name)
        basis, table = series_form(resolved.spec)
        excess = max(
            float(schmidt_coefficients(ket, ("A1", "U1"))[1:].max())
            for ket in basis.kets
        )
        checks.append(check(f"{name} series basis max excess Schmidt coefficient", excess, 0.0, 1e-10))
        ranks = [operator_schmidt_rank(op) for op in table.ops]
        if name == "bell-transformed":
            checks.append(check("bell-transformed series has a nonlocal correction", max(ranks) > 1, True))
        else:
            checks.append(check("epr series corrections all local", max(ranks) == 1, True))
            pauli_dev = max(
                float(np.abs(op - pauli_pair(a, b)).max())
                for (a, b), op in table.items()
            )
            checks.append(check("epr series corrections equal sigma-pairs", pauli_dev, 0.0, 1e-12))
        unknown = UnknownState.random(np.random.default_rng([cfg.seed, 5]))
        target = unknown.as_state()
        outs = run_protocol(unknown, basis, resolved.state, table)
        infid = max(
            abs(1.0 - fidelity_pure(o.corrected_state, target)) for o in outs
        )
        checks.append(check(f"{name} series protocol max infidelity", infid, 0.0, 1e-10))
    return section("series", checks)


def section_gradient(cfg: SuiteConfig):
    state = builtin_channel("bell-transformed").state
    rho = reduced_density(state, ("A1", "A2", "B1"))
    rng = np.random.default_rng([cfg.seed, 3])
    step = 1e-5
    max_dev = 0.0
    for _ in range(cfg.gradient_points):
        params = rng.uniform(0.0, 2.0 * np.pi, 9)
        analytic = witness_gradient(rho, params)
        numeric = np.empty(9)
        for j in range(9):
            up = params.copy()
            down = params.copy()
            up[j] += step
            down[j] -= step
            numeric[j] = (witness_value(rho, up) - witness_value(rho, down)) / (2 * step)
        max_dev = max(max_dev, float(np.abs(analytic - numeric).max()))
    checks = [
        check(
            f"max |analytic - central-difference| over {cfg.gradient_points} points",
            max_dev, 0.0, 1e-6,
        )
    ]
    return section("gradient", checks)


SECTION_BUILDERS = {
    "channel": section_channel,
    "measurement": section_measurement,
    "teleport": section_teleport,
    "ghz": section_ghz,
    "pairs": section_pairs,
    "wstate": section_wstate,
    "triads": section_triads,
    "witness": section_witness,
    "invariance": section_invariance,
    "series": section_series,
    "gradient": section_gradient,
}


def build_report(cfg: SuiteConfig, only=None) -> dict:
    """Run the verification sections (all, or the `only` subset, in order)."""
    if only:
        unknown = [name for name in only if name not in SECTION_BUILDERS]
        if unknown:
            raise ContractError(
                f"unknown section(s) {unknown}; available: {list(SECTION_BUILDERS)}"
            )
        selected = [name for name in SECTION_BUILDERS if name in set(only)]
    else:
        selected = list(SECTION_BUILDERS)
    sections = [SECTION_BUILDERS[name](cfg) for name in selected]
    return {
        "report": "verification",
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "tol": cfg.tol,
        "sections": sections,
        "pass": all(s["pass"] for s in sections),
    }
