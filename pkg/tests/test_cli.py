import json
import subprocess
import sys

import pytest

from plgroups.cli import ConfigError, RunConfig, dumps, main, parse_symbols, parse_tol


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_list_counts(capsys):
    code, out, _ = run(["list", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert len(data["groups"]) == 9
    code, out, _ = run(["list", "--group", "A3_2", "--format", "json"], capsys)
    (g,) = json.loads(out)["groups"]
    assert len(g["families"]) == 1 and len(g["table"]) == 4
    code, out, _ = run(["list", "--group", "A3_1", "--format", "json"], capsys)
    assert len(json.loads(out)["groups"][0]["families"]) == 3


def test_list_text_default(capsys):
    code, out, _ = run(["list"], capsys)
    assert code == 0
    assert out.count("\n") == 9 and out.startswith("A3_1: 3 families")


def test_verify_single_entry(capsys):
    code, out, _ = run(["verify", "--group", "A3_2", "--entry", "13", "--seed", "0"], capsys)
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"tool_version", "seed", "group", "entries", "pass"}
    (entry,) = data["entries"]
    assert entry["id"] == "A3_2:13" and entry["pass"]
    for c in entry["checks"]:
        assert set(c) == {"name", "residual", "tolerance", "samples", "pass"}


def test_verify_a39_has_one_entry(capsys):
    code, out, _ = run(["verify", "--group", "A3_9", "--samples", "20"], capsys)
    assert code == 0
    assert len(json.loads(out)["entries"]) == 1


@pytest.mark.parametrize("argv", [
    ["verify", "--group", "BAD"],
    ["verify", "--group", "A3_2", "--samples", "5"],
    ["verify", "--group", "A3_2", "--symbols", "lam=0"],
    ["verify", "--group", "A3_5", "--symbols", "rho=1"],
    ["verify", "--group", "A3_2", "--entry", "99"],
    ["verify", "--entry", "13"],
    ["verify", "--group", "A3_2", "--family", "3"],
    ["verify", "--group", "A3_2", "--tol", "jacobi=abc"],
    ["verify", "--group", "A3_2", "--tol", "nonsense=1e-3"],
    ["list", "--group", "A3_10"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("error:")


def test_failure_exit_1(capsys):
    # an impossible tolerance makes the row fail honestly
    code, out, _ = run(["verify", "--group", "A3_2", "--entry", "13", "--samples", "10", "--tol", "multiplicativity=0"],
                       capsys)
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["verify", "--group", "A3_7", "--samples", "20", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\ngroup = A3_2\nentry = 12\nseed = 5\nsamples = 15\nsymbols = omega=2, swap12=1\n")
    code, out, _ = run(["verify", "--config", str(cfg)], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["seed"] == 5 and data["entries"][0]["id"] == "A3_2:12"
    code, out, _ = run(["verify", "--config", str(cfg), "--seed", "6"], capsys)
    assert json.loads(out)["seed"] == 6
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(["verify", "--config", str(bad)], capsys)[0] == 2


def test_text_format(capsys):
    code, out, _ = run(["verify", "--group", "A3_2", "--entry", "(8)", "--samples", "10", "--format", "text"],
                       capsys)
    assert code == 0
    assert out.startswith("PASS  A3_2:(8)")
    assert "1/1 entries pass" in out


def test_derive_reports(capsys):
    code, out, _ = run(["derive", "--group", "A3_2"], capsys)
    assert code == 0
    data = json.loads(out)
    (block,) = data["derive"]
    assert block["jacobi_dimension"] == 3
    assert all(f["projection_residual"] <= 1e-8 for f in block["families"])
    for gid, fam in (("A3_4", "A3_4/2"), ("A3_6", "A3_6/2")):
        code, out, _ = run(["derive", "--group", gid], capsys)
        (block,) = json.loads(out)["derive"]
        missing = [f for f in block["families"] if not f["in_ansatz"]]
        assert [f["family"] for f in missing] == [fam]
        assert "outside the quadratic Ansatz" in missing[0]["note"]


def test_parsers():
    tol = parse_tol("1e-7")
    assert tol["jacobi"] == 1e-7 and "best_fit_r" not in tol
    assert parse_tol("casimir=1e-6") == {"casimir": 1e-6}
    assert parse_symbols("lam=2, swap12=1") == ({"lam": 2.0}, True)
    with pytest.raises(ConfigError):
        parse_symbols("lam")
    with pytest.raises(ConfigError):
        RunConfig(group="A3_2", samples=3).validate()


def test_dumps():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(1.0) == "1.0"
    assert dumps(float("inf")) == "Infinity"
    assert dumps({"a": [1, True, None]}) == '{\n  "a": [\n    1,\n    true,\n    null\n  ]\n}'
    assert json.loads(dumps({"x": 1e-300, "ρ": "χ"})) == {"x": 1e-300, "ρ": "χ"}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "plgroups", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "A3_9" in proc.stdout
