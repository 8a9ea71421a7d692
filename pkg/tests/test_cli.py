import json
import subprocess
import sys
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from anongames import io
from anongames.cli import EXIT_ERROR, EXIT_OK, EXIT_REJECT, run
from anongames.polymatrix import PolymatrixGame, matching_pennies


def call(capsys, *args):
    code = run([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_and_verify_canonical(tmp_path, capsys):
    g = tmp_path / "g.json"
    assert call(capsys, "gen-radix", "--n", 2, "--N", 4, "--out", g)[0] == EXIT_OK
    code, out, _ = call(capsys, "verify", "--game", g, "--profile", "canonical", "--eps", 0, "--mode", "wsne")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "accept"


def test_verify_reject_emits_witness(tmp_path, capsys):
    g, x = tmp_path / "g.json", tmp_path / "x.json"
    call(capsys, "gen-radix", "--n", 2, "--N", 4, "--out", g, "--profile-out", x)
    prof = json.loads(x.read_text())
    prof["x"][0] = ["1/8", "7/8", "0", "0", "0", "0"]
    x.write_text(json.dumps(prof))
    code, out, _ = call(capsys, "verify", "--game", g, "--profile", x, "--eps", 0)
    cert = json.loads(out)
    assert code == EXIT_REJECT and cert["verdict"] == "reject" and cert["witnesses"]


def test_compile_bundle_and_verify(tmp_path, capsys):
    a = tmp_path / "zero.json"
    io.write_json(a, io.polymatrix_to_json(PolymatrixGame.zeros(2)))
    bundle = tmp_path / "bundle"
    assert call(capsys, "compile", "--A", a, "--n", 2, "--out", bundle)[0] == EXIT_OK
    assert sorted(p.name for p in bundle.iterdir()) == ["A.json", "GA.json", "GA_norm.json", "coeffs.json", "params.json"]
    eps = json.loads((bundle / "params.json").read_text())["epsilon"]
    code, _, _ = call(capsys, "verify", "--game", bundle / "GA.json", "--profile", "canonical", "--eps", eps)
    assert code == EXIT_OK


def test_compile_shape_mismatch(tmp_path, capsys):
    a = tmp_path / "a.json"
    io.write_json(a, io.polymatrix_to_json(matching_pennies()))
    code, _, err = call(capsys, "compile", "--A", a, "--n", 3, "--out", tmp_path / "b")
    assert code == EXIT_ERROR and "shape mismatch" in err


def test_compile_single_player_infeasible(tmp_path, capsys):
    a = tmp_path / "a.json"
    io.write_json(a, io.polymatrix_to_json(PolymatrixGame.zeros(1)))
    code, _, err = call(capsys, "compile", "--A", a, "--out", tmp_path / "b")
    assert code == EXIT_ERROR and "tau" in err


def test_decode_and_pad_and_wsne(tmp_path, capsys):
    g, x = tmp_path / "g.json", tmp_path / "x.json"
    call(capsys, "gen-genradix", "--n", 2, "--N", 4, "--out", g, "--profile-out", x)
    code, out, _ = call(capsys, "decode", "--profile", x)
    assert code == EXIT_OK and json.loads(out)["y"] == ["1/1", "0/1", "1/1", "0/1"]
    p, px = tmp_path / "p.json", tmp_path / "px.json"
    gr, xr = tmp_path / "gr.json", tmp_path / "xr.json"
    call(capsys, "gen-radix", "--n", 1, "--N", 2, "--out", gr, "--profile-out", xr)
    assert call(capsys, "pad", "--game", gr, "--t", "2", "--out", p, "--profile", xr, "--profile-out", px)[0] == EXIT_OK
    assert call(capsys, "verify", "--game", p, "--profile", px, "--eps", 0)[0] == EXIT_OK
    code, out, _ = call(capsys, "wsne-from-approx", "--game", gr, "--profile", xr, "--eps", "1/10")
    assert code == EXIT_OK and json.loads(out)["certificate"]["verdict"] == "accept"


def test_estimate_calibrate_oracle(capsys):
    code, out, _ = call(capsys, "estimate", "--n", 2, "--l", 1, "--r", 2)
    assert code == EXIT_OK and json.loads(out)["B"]["entries"] == [{"k1": 1, "k2": 0, "value": "1/1"}]
    code, out, _ = call(capsys, "calibrate", "--n", 3, "--trials", 3)
    assert code == EXIT_OK and len(json.loads(out)["constants"]) == 6
    code, out, _ = call(capsys, "calibrate", "--n", 3, "--trials", 3, "--emit-latex-table")
    assert code == EXIT_OK and out.startswith("\\begin{tabular}")
    code, out, _ = call(capsys, "oracle-dp", "--n", 3, "--alpha", 3, "--trials", 10)
    assert code == EXIT_OK and json.loads(out)["mismatches"] == 0


def test_nashmap(tmp_path, capsys):
    g, x = tmp_path / "g.json", tmp_path / "x.json"
    io.write_json(g, {"n": 1, "alpha": 2, "payoff_bounds": ["0", "1"], "payoffs": [[["1"], ["0"]]]})
    io.write_json(x, {"x": [["0", "1"]]})
    code, out, _ = call(capsys, "nashmap", "--game", g, "--profile", x)
    assert code == EXIT_OK and json.loads(out)["residual"] == "1/2"
    code, out, _ = call(capsys, "nashmap", "--game", g, "--iterate", "--target", "1/1024")
    assert code == EXIT_OK
    assert call(capsys, "nashmap", "--game", g)[0] == EXIT_ERROR


@pytest.mark.parametrize("argv", [[], ["bogus"], ["verify"], ["gen-radix", "--n", "x", "--N", "2", "--out", "o"],
                                  ["verify", "--game", "missing.json", "--profile", "canonical"]])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_ERROR


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-3, 3) | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(
        st.sampled_from(["n", "alpha", "payoffs", "payoff_bounds", "x", "A"]), inner, max_size=4),
    max_leaves=12,
)


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(json_values)
def test_fuzzed_inputs_exit_one(tmp_path, capsys, obj):
    g = tmp_path / "fuzz.json"
    g.write_text(json.dumps(obj))
    for argv in (["verify", "--game", g, "--profile", "canonical"], ["compile", "--A", g, "--out", tmp_path / "b"],
                 ["decode", "--profile", g]):
        assert run([str(a) for a in argv]) == EXIT_ERROR
    capsys.readouterr()


def test_console_entry_points(tmp_path):
    g = tmp_path / "g.json"
    subprocess.run([sys.executable, "-m", "anongames", "gen-radix", "--n", "1", "--N", "2", "--out", str(g)], check=True)
    res = subprocess.run([sys.executable, "-m", "anongames", "verify", "--game", str(g), "--profile", "canonical"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    res = subprocess.run([sys.executable, "-m", "anongames", "nope"], capture_output=True, text=True)
    assert res.returncode == 1
