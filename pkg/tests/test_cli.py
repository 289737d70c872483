import json

import numpy as np
import pytest

from entqc.cli import main, render_json, render_text

BELL_DRESSING_PAIRS = [
    [0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0],
    [0.0, 0.0], [0.7071067811865476, 0.0], [0.7071067811865476, 0.0], [0.0, 0.0],
    [0.0, 0.0], [-0.7071067811865476, 0.0], [0.7071067811865476, 0.0], [0.0, 0.0],
    [-0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0],
]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_teleport_epr_seeded_run_passes(capsys):
    code, out, err = run(capsys, ["teleport", "--channel", "epr", "--seed", "7"])
    assert code == 0
    doc = json.loads(out)
    assert doc["report"] == "teleport"
    assert doc["pass"] is True
    checks = doc["sections"][0]["checks"]
    fidelities = [c for c in checks if c["name"].endswith("corrected fidelity")]
    assert len(fidelities) == 16
    assert all(abs(c["value"] - 1.0) <= 1e-10 for c in fidelities)
    probabilities = [c for c in checks if c["name"].endswith("probability")]
    assert all(abs(c["value"] - 1 / 16) <= 1e-10 for c in probabilities)


def test_teleport_ghz_rejected_with_explanation(capsys):
    code, out, err = run(capsys, ["teleport", "--channel", "ghz"])
    assert code == 1
    assert out == ""
    assert "maximally entangled" in err
    assert "0.25" in err


def test_teleport_unknown_channel_lists_builtins(capsys):
    code, out, err = run(capsys, ["teleport", "--channel", "wat"])
    assert code == 2
    assert "epr" in err and "bell-transformed" in err and "ghz" in err


def test_teleport_explicit_basis_state(capsys):
    code, out, err = run(
        capsys, ["teleport", "--channel", "epr", "--state", "1,0,0,0,0,0,0,0"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["unknown_state"] == [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
    receiver_rows = [
        c["value"] for c in doc["sections"][0]["checks"]
        if c["name"].endswith("receiver state")
    ]
    # corrected outputs are all |00> again; receivers differ only pre-correction
    assert len(receiver_rows) == 16


def test_teleport_state_near_normalized_warns(capsys):
    code, out, err = run(
        capsys,
        ["teleport", "--channel", "epr", "--state", "1.0000001,0,0,0,0,0,0,0"],
    )
    assert code == 0
    assert "normalizing" in err


def test_teleport_state_far_from_normalized_fails(capsys):
    code, out, err = run(
        capsys, ["teleport", "--channel", "epr", "--state", "2,0,0,0,0,0,0,0"]
    )
    assert code == 2
    assert "norm" in err


@pytest.mark.parametrize(
    "state",
    ["1,0,0,0", "a,0,0,0,0,0,0,0", "1,0,0,0,0,0,0,0,0"],
)
def test_teleport_state_malformed(capsys, state):
    code, out, err = run(capsys, ["teleport", "--channel", "epr", "--state", state])
    assert code == 2


def test_teleport_env_seed_fallback(capsys, monkeypatch):
    monkeypatch.setenv("ENTQC_SEED", "12")
    code, out_env, _ = run(capsys, ["teleport", "--channel", "epr"])
    assert code == 0
    monkeypatch.delenv("ENTQC_SEED")
    code, out_flag, _ = run(capsys, ["teleport", "--channel", "epr", "--seed", "12"])
    assert code == 0
    assert out_env == out_flag


def test_teleport_flag_overrides_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("ENTQC_SEED", "12")
    code, out, _ = run(capsys, ["teleport", "--channel", "epr", "--seed", "3"])
    doc = json.loads(out)
    assert doc["seed"] == 3


def test_bad_env_seed_is_a_usage_error(capsys, monkeypatch):
    monkeypatch.setenv("ENTQC_SEED", "pony")
    code, out, err = run(capsys, ["teleport", "--channel", "epr"])
    assert code == 2
    assert "ENTQC_SEED" in err


def test_negative_seed_rejected(capsys):
    code, out, err = run(capsys, ["teleport", "--channel", "epr", "--seed", "-4"])
    assert code == 2


def test_teleport_custom_channel_file(capsys, tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps({"dressing": BELL_DRESSING_PAIRS}))
    code, out, _ = run(capsys, ["teleport", "--channel", str(path), "--seed", "1"])
    assert code == 0
    assert json.loads(out)["channel"] == "custom"


def test_teleport_malformed_channel_file(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{oops")
    code, out, err = run(capsys, ["teleport", "--channel", str(path)])
    assert code == 2
    assert "JSON" in err


def test_analyze_reference_channel(capsys):
    code, out, _ = run(
        capsys, ["analyze", "--restarts", "4", "--seed", "2"]
    )
    assert code == 0
    doc = json.loads(out)
    names = [s["name"] for s in doc["sections"]]
    assert names == ["channel", "marginals", "pairs", "triads", "witness"]
    pair_rows = doc["sections"][2]["checks"]
    verdicts = [c["value"] for c in pair_rows if c["name"].endswith("entangled")]
    assert verdicts == [False] * 6
    witness_rows = doc["sections"][4]["checks"]
    minima = [c["value"] for c in witness_rows if c["name"].endswith("witness minimum")]
    assert len(minima) == 4
    assert all(abs(v - 0.25) < 1e-2 for v in minima)


def test_analyze_epr_channel_pairs(capsys):
    code, out, _ = run(
        capsys, ["analyze", "--channel", "epr", "--restarts", "2", "--seed", "2"]
    )
    assert code == 0
    doc = json.loads(out)
    rows = {c["name"]: c["value"] for c in doc["sections"][2]["checks"]}
    assert abs(rows["pair (A1,B1) min PT eigenvalue"] + 0.5) < 1e-10
    assert abs(rows["pair (A2,B2) min PT eigenvalue"] + 0.5) < 1e-10
    assert rows["pair (A1,B1) entangled"] is True
    assert abs(rows["pair (A1,A2) min PT eigenvalue"] - 0.25) < 1e-10


def test_analyze_ghz_channel_is_informational(capsys):
    code, out, _ = run(
        capsys, ["analyze", "--channel", "ghz", "--restarts", "2", "--seed", "2"]
    )
    assert code == 0
    doc = json.loads(out)
    channel_rows = {c["name"]: c["value"] for c in doc["sections"][0]["checks"]}
    assert channel_rows["valid teleportation resource"] is False


def test_analyze_unknown_channel(capsys):
    code, out, err = run(capsys, ["analyze", "--channel", "zzz"])
    assert code == 2
    assert "built-ins" in err


def test_repro_single_section_passes(capsys):
    code, out, _ = run(capsys, ["repro", "--section", "channel"])
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    assert [s["name"] for s in doc["sections"]] == ["channel"]
    for sec in doc["sections"]:
        for check in sec["checks"]:
            if check["pass"] is not None and check["tolerance"] is not None:
                assert check["target"] is not None


def test_repro_unknown_section_lists_options(capsys):
    code, out, err = run(capsys, ["repro", "--section", "nope"])
    assert code == 2
    assert "witness" in err and "pairs" in err


def test_repro_section_filter_order_is_canonical(capsys):
    code, out, _ = run(
        capsys, ["repro", "--section", "ghz", "--section", "channel"]
    )
    assert code == 0
    doc = json.loads(out)
    assert [s["name"] for s in doc["sections"]] == ["channel", "ghz"]


def test_repro_byte_identical_reports(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["repro", "--section", "pairs", "--output", str(a)]) == 0
    assert main(["repro", "--section", "pairs", "--output", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_repro_seed_override_keeps_verdicts(capsys):
    code, out, _ = run(capsys, ["repro", "--section", "invariance", "--seed", "123"])
    assert code == 0
    assert json.loads(out)["seed"] == 123


def test_text_format_renders_sections(capsys):
    code, out, _ = run(
        capsys, ["repro", "--section", "channel", "--format", "text"]
    )
    assert code == 0
    assert "section channel" in out
    assert "[PASS]" in out
    assert "overall: PASS" in out


def test_output_flag_writes_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code = main(["repro", "--section", "ghz", "--output", str(path)])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out == ""
    doc = json.loads(path.read_text())
    assert doc["sections"][0]["name"] == "ghz"


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2


def test_render_json_is_canonical():
    doc = {"x": 0.1, "flag": True, "none": None, "list": [1.0, 2], "s": "hi"}
    text = render_json(doc)
    assert text == '{"x": 0.10000000000000001, "flag": true, "none": null, "list": [1, 2], "s": "hi"}\n'
    assert json.loads(text) == {
        "x": 0.1, "flag": True, "none": None, "list": [1.0, 2], "s": "hi"
    }


def test_render_json_handles_numpy_scalars():
    text = render_json({"a": np.float64(0.5), "b": np.int64(3), "c": np.bool_(False)})
    assert json.loads(text) == {"a": 0.5, "b": 3, "c": False}


def test_render_text_marks_failures():
    doc = {
        "report": "demo",
        "sections": [
            {
                "name": "s",
                "checks": [
                    {"name": "bad", "value": 1.0, "target": 0.0,
                     "tolerance": 0.1, "pass": False},
                    {"name": "note", "value": [1.0], "target": None,
                     "tolerance": None, "pass": None},
                ],
                "pass": False,
            }
        ],
        "pass": False,
    }
    text = render_text(doc)
    assert "[FAIL] bad" in text
    assert "[info] note" in text
    assert "overall: FAIL" in text
