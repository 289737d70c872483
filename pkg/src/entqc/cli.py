"""Command-line front end.

Subcommands:
  teleport  run the sixteen-outcome protocol on a channel and report fidelities
  analyze   entanglement analysis of a channel state (pairs, triads, witness)
  repro     run the built-in verification suite and report pass/fail

JSON is the canonical output format (floats at 17 significant digits, complex
numbers as [re, im] pairs); the text format is rendered from the same document.
Exit codes: 0 success, 1 a numeric check failed, 2 malformed input or usage.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .channel import is_valid_channel, resolve_channel
from .entanglement import (
    CHANNEL_PAIRS,
    CHANNEL_TRIADS,
    minimize_witness,
    pair_analysis,
    triad_analysis,
)
from .report import (
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_WITNESS_TOL,
    SuiteConfig,
    build_report,
    check,
    section,
)
from .tensor import (
    ContractError,
    LabelError,
    fidelity_pure,
    hermitian_eigenvalues,
    reduced_density,
)
from .teleport import UnknownState, teleport_all_outcomes

FIDELITY_ATOL = 1e-10
STATE_NORM_LIMIT = 1e-6


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _emit(value, out):
    if value is None:
        out.append("null")
    elif isinstance(value, (bool, np.bool_)):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(format(float(value), ".17g"))
    elif isinstance(value, (complex, np.complexfloating)):
        _emit([float(value.real), float(value.imag)], out)
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        out.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    elif isinstance(value, np.ndarray):
        _emit(value.tolist(), out)
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def render_json(doc) -> str:
    """Deterministic JSON: insertion order, floats as %.17g."""
    out: list[str] = []
    _emit(doc, out)
    return "".join(out) + "\n"


def _verdict(passed) -> str:
    if passed is None:
        return "info"
    return "PASS" if passed else "FAIL"


def _fmt_scalar(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    if isinstance(value, (list, tuple, dict)):
        out: list[str] = []
        _emit(value, out)
        return "".join(out)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_text(doc) -> str:
    kind = doc.get("report", "report")
    lines = [f"entqc {kind} report"]
    meta = [
        f"{key}={_fmt_scalar(value)}"
        for key, value in doc.items()
        if key not in ("report", "sections", "pass")
    ]
    if meta:
        lines.append("  ".join(meta))
    for sec in doc.get("sections", ()):
        lines.append("")
        lines.append(f"[{_verdict(sec['pass'])}] section {sec['name']}")
        for row in sec["checks"]:
            piece = f"  [{_verdict(row['pass'])}] {row['name']}: value={_fmt_scalar(row['value'])}"
            if row.get("target") is not None:
                piece += f" target={_fmt_scalar(row['target'])}"
            if row.get("tolerance") is not None:
                piece += f" tolerance={_fmt_scalar(row['tolerance'])}"
            lines.append(piece)
    if "pass" in doc:
        lines.append("")
        lines.append(f"overall: {_verdict(doc['pass'])}")
    return "\n".join(lines) + "\n"


def _write_document(doc, args) -> None:
    text = render_text(doc) if args.format == "text" else render_json(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Shared argument handling
# ---------------------------------------------------------------------------

def _resolve_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is None:
        env = os.environ.get("ENTQC_SEED")
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ContractError(f"ENTQC_SEED must be an integer, got {env!r}")
        else:
            seed = DEFAULT_SEED
    if seed < 0:
        raise ContractError(f"seed must be non-negative, got {seed}")
    return seed


def _parse_state_arg(text: str) -> UnknownState:
    parts = text.split(",")
    if len(parts) != 8:
        raise ContractError(
            "--state needs 8 comma-separated reals (4 [re, im] pairs), "
            f"got {len(parts)} fields"
        )
    try:
        reals = [float(p) for p in parts]
    except ValueError as exc:
        raise ContractError(f"--state entries must be numbers: {exc}") from exc
    vec = np.array(reals[0::2]) + 1j * np.array(reals[1::2])
    norm = float(np.linalg.norm(vec))
    dev = abs(norm - 1.0)
    if dev > STATE_NORM_LIMIT:
        raise ContractError(
            f"--state norm {norm:.9g} is off by {dev:.3g} (limit {STATE_NORM_LIMIT:g}); "
            "pass a normalized state"
        )
    if dev > 1e-12:
        sys.stderr.write(
            f"warning: normalizing --state (norm off by {dev:.3g})\n"
        )
        vec = vec / norm
    return UnknownState(vec)


def _pairs(vec) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec).reshape(-1)]


def _tag(labels) -> str:
    return "(" + ",".join(labels) + ")"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_teleport(args) -> int:
    resolved = resolve_channel(args.channel)
    ok, dev = is_valid_channel(resolved.state)
    if not ok or resolved.spec is None:
        sys.stderr.write(
            f"error: channel {resolved.name!r} cannot carry the protocol: both "
            "two-qubit halves must be maximally entangled with the far side "
            f"(every pair marginal I/4); worst marginal deviation {dev:.6g}\n"
        )
        return 1

    doc = {"report": "teleport", "channel": resolved.name}
    if args.state is not None:
        unknown = _parse_state_arg(args.state)
    else:
        seed = _resolve_seed(args)
        doc["seed"] = seed
        unknown = UnknownState.random(seed)
    doc["unknown_state"] = _pairs(unknown.coefficients)

    target = unknown.as_state()
    checks = []
    for out in teleport_all_outcomes(unknown, resolved.spec):
        tag = f"outcome ({out.outcome[0]},{out.outcome[1]})"
        checks.append(check(f"{tag} probability", out.probability, 1.0 / 16.0, FIDELITY_ATOL))
        fid = fidelity_pure(out.corrected_state, target)
        checks.append(check(f"{tag} corrected fidelity", fid, 1.0, FIDELITY_ATOL))
        checks.append(check(f"{tag} receiver state", _pairs(out.bob_state.amplitudes)))
    outcomes = section("outcomes", checks)
    doc["sections"] = [outcomes]
    doc["pass"] = outcomes["pass"]
    _write_document(doc, args)
    return 0 if doc["pass"] else 1


def cmd_analyze(args) -> int:
    resolved = resolve_channel(args.channel)
    seed = _resolve_seed(args)
    state = resolved.state

    ok, dev = is_valid_channel(state)
    channel_checks = [
        check("valid teleportation resource", bool(ok)),
        check("max two-qubit marginal deviation from I/4", dev),
    ]

    marginal_checks = []
    for label in state.register.labels:
        eigs = hermitian_eigenvalues(reduced_density(state, (label,)).matrix)
        marginal_checks.append(
            check(f"single-qubit marginal {label} eigenvalues", [float(x) for x in eigs])
        )

    pair_checks = []
    for pair in CHANNEL_PAIRS:
        rep = pair_analysis(state, pair)
        tag = _tag(pair)
        pair_checks.append(check(f"pair {tag} min PT eigenvalue", rep.min_pt_eigenvalue))
        pair_checks.append(check(f"pair {tag} entangled", rep.entangled))

    triad_checks = []
    for triad in CHANNEL_TRIADS:
        rep = triad_analysis(state, triad)
        tag = _tag(triad)
        eigs = hermitian_eigenvalues(rep.reduced.matrix)
        triad_checks.append(check(f"triad {tag} eigenvalues", [float(x) for x in eigs]))
        triad_checks.append(
            check(f"triad {tag} component fidelities", list(rep.ghz_component_fidelities))
        )
        triad_checks.append(check(f"triad {tag} three-tangles", list(rep.three_tangles)))

    witness_checks = []
    for triad in CHANNEL_TRIADS:
        result = minimize_witness(
            reduced_density(state, triad), restarts=args.restarts, seed=seed
        )
        tag = _tag(triad)
        witness_checks.append(check(f"triad {tag} witness minimum", result.min_value))
        witness_checks.append(
            check(f"triad {tag} witness parameters", [float(x) for x in result.parameters])
        )
        witness_checks.append(
            check(f"triad {tag} witness converged fraction", result.converged_fraction)
        )

    doc = {
        "report": "analyze",
        "channel": resolved.name,
        "seed": seed,
        "restarts": args.restarts,
        "sections": [
            section("channel", channel_checks),
            section("marginals", marginal_checks),
            section("pairs", pair_checks),
            section("triads", triad_checks),
            section("witness", witness_checks),
        ],
    }
    doc["pass"] = all(s["pass"] for s in doc["sections"])
    _write_document(doc, args)
    return 0


def cmd_repro(args) -> int:
    cfg = SuiteConfig(seed=_resolve_seed(args), restarts=args.restarts, tol=args.tol)
    doc = build_report(cfg, only=args.section)
    _write_document(doc, args)
    return 0 if doc["pass"] else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(sub, with_channel=None, with_search=False):
    if with_channel is not None:
        sub.add_argument(
            "--channel",
            default=with_channel,
            help="built-in channel name or a .json dressing file "
            f"(default: {with_channel})",
        )
    sub.add_argument("--seed", type=int, default=None,
                     help="PRNG seed (fallback: ENTQC_SEED env var, then "
                     f"{DEFAULT_SEED})")
    if with_search:
        sub.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS,
                         help="witness-search restarts")
        sub.add_argument("--tol", type=float, default=DEFAULT_WITNESS_TOL,
                         help="tolerance for witness-bound checks")
    sub.add_argument("--output", default=None, help="write the report to a file")
    sub.add_argument("--format", choices=("json", "text"), default="json",
                     help="output format (json is canonical)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entqc",
        description="Two-qubit teleportation through four-qubit entangled "
        "channels: simulation, entanglement analysis, verification report.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    tele = commands.add_parser(
        "teleport", help="run the sixteen-outcome protocol and check fidelities"
    )
    _add_common(tele, with_channel="epr")
    tele.add_argument(
        "--state",
        default=None,
        help="unknown input state as 8 comma-separated reals (4 [re, im] pairs); "
        "omitted: a seeded random state",
    )
    tele.set_defaults(func=cmd_teleport)

    ana = commands.add_parser(
        "analyze", help="pairwise/triad entanglement analysis plus witness search"
    )
    _add_common(ana, with_channel="bell-transformed", with_search=True)
    ana.set_defaults(func=cmd_analyze)

    rep = commands.add_parser(
        "repro", help="run the built-in verification suite"
    )
    _add_common(rep, with_search=True)
    rep.add_argument(
        "--section",
        action="append",
        default=None,
        metavar="NAME",
        help="run only the named section (repeatable)",
    )
    rep.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ContractError, LabelError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
