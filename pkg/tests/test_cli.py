import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffbound.cli import decimal_str, run

CUBIC = "d1 x1 = x1^2\nd2 x1 = x1^3 + a1\n"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_alpha():
    assert call("alpha", "--m", "2", "--ell", "16")[:2] == (0, "153\n")


def test_tbound():
    assert call("tbound", "--m", "2", "--n", "2", "--seq", "geometric:r=1")[:2] == (0, "21\n")


def test_integrability(tmp_path):
    path = tmp_path / "sys.txt"
    path.write_text(CUBIC)
    assert call("integrability", "--input", str(path))[:2] == (0, "x1^4 - 2*a1*x1 + a1_[1,0]\n")


def test_big_integer_formats():
    assert call("Tbound", "--m", "2", "--n", "3", "--bits")[1] == "2097175\n"
    assert call("Tbound", "--m", "2", "--n", "2", "--hex")[1] == "0x200000\n"
    assert call("Tbound", "--m", "2", "--n", "2")[1] == "2097152\n"


def test_json_is_one_object():
    code, out, _ = call("gamma", "--m", "2", "--ell", "1", "--json")
    assert code == 0
    assert json.loads(out) == {"count": 3, "ell": 1, "indices": [[0, 0], [1, 0], [0, 1]], "m": 2}
    assert out.count("\n") == 1


def test_prolong_json(tmp_path):
    path = tmp_path / "gens.txt"
    path.write_text("x1^2\n")
    code, out, _ = call("prolong", "--input", str(path), "--ell", "1", "--method", "both", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["coords"] == ["x1", "x1_[1]"]
    assert [e["poly"] for e in data["equations"]] == ["x1^2", "2*x1*x1_[1]"]


def test_nabla():
    code, out, _ = call("nabla", "--point", "x1=t1^2", "--ell", "2")
    assert code == 0
    assert out.splitlines() == ["x1 = t1^2", "x1_[1] = 2*t1", "x1_[2] = 2"]


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["bound", "first-order", "--m", "1", "--n", "1", "--d", "1", "--degV", "2", "--degW", "3"], "12"),
        (["bound", "positive-dim", "--m", "1", "--n", "3", "--d", "3", "--d0", "2", "--degV", "2", "--degW", "3"], "12"),
        (["bound", "higher-order", "--m", "1", "--n", "1", "--ell", "2", "--d", "1", "--degV", "2", "--degW", "3"], "6912"),
        (["bound", "generators", "--m", "1", "--n", "1", "--D", "2", "--r", "1", "--s", "1"], "256"),
        (["bound", "isogeny", "--degV", "1", "--d", "1"], "279936"),
    ],
)
def test_bounds(argv, expected):
    assert call(*argv)[:2] == (0, expected + "\n")


def test_bound_magnitude_json():
    code, out, _ = call("bound", "first-order", "--m", "2", "--n", "1", "--d", "1", "--degV", "2", "--degW", "2", "--json")
    data = json.loads(out)
    assert code == 0 and data["value"]["log_height"] == 1 and data["meta"]["T"] == "16"


def test_oracle_commands(tmp_path):
    code, out, _ = call("oracle", "chain", "--m", "2", "--n", "1", "--seq", "geometric:r=1", "--json")
    assert code == 0 and json.loads(out)["max_strict_steps"] == 3
    code, out, _ = call("oracle", "tsound", "--m", "2", "--n", "2", "--seq", "linear:start=1,step=1")
    assert code == 0 and out.startswith("pass")
    code, out, _ = call("oracle", "case1", "--sigma", "1,2", "--box", "6", "--json")
    assert code == 0 and json.loads(out)["ok"] is True
    path = tmp_path / "par.txt"
    path.write_text("x2 - x1^2\n")
    code, out, _ = call("oracle", "prolong-points", "--input", str(path), "--point", "x1=t1;x2=t1^2", "--ell", "2")
    assert code == 0 and out.startswith("ok")


def test_exit_codes(tmp_path):
    assert call("alpha", "--m", "2")[0] == 1
    assert call("bogus")[0] == 1
    assert call("alpha", "--m", "0", "--ell", "1")[0] == 2
    assert call("Tbound", "--m", "2", "--n", "4")[0] == 3
    assert call("alpha", "--m", "1", "--ell", "1", "--bit-guard", "0")[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("d1 x1 = x1 +\n")
    assert call("integrability", "--input", str(bad))[0] == 2


def test_usage_error_prints_subcommand_help():
    code, _, err = call("alpha", "--m", "2")
    assert code == 1 and "usage: diffbound alpha" in err


def test_errors_in_json_mode():
    code, out, _ = call("Tbound", "--m", "2", "--n", "4", "--json")
    assert code == 3 and json.loads(out)["error"] == "budget"
    code, out, _ = call("tbound", "--m", "2", "--n", "1", "--seq", "nope", "--json")
    assert code == 2 and json.loads(out)["error"] == "domain"


def test_budget_env(monkeypatch):
    monkeypatch.setenv("DIFFBOUND_BIT_GUARD", "1000")
    assert call("Tbound", "--m", "2", "--n", "2")[0] == 0
    assert call("Tbound", "--m", "2", "--n", "3")[0] == 3
    assert call("Tbound", "--m", "2", "--n", "3", "--bit-guard", str(2**22))[0] == 0
    monkeypatch.setenv("DIFFBOUND_BIT_GUARD", "-5")
    assert call("alpha", "--m", "1", "--ell", "1")[0] == 1


def test_deterministic():
    first = call("selftest", "--criteria", "4,8", "--json")
    second = call("selftest", "--criteria", "4,8", "--json")
    strip = lambda s: [{k: v for k, v in c.items() if k != "seconds" and k != "detail"} for c in json.loads(s)["criteria"]]
    assert first[0] == second[0] == 0
    assert strip(first[1]) == strip(second[1])
    assert call("bound", "isogeny", "--degV", "2", "--d", "1", "--json") == call("bound", "isogeny", "--degV", "2", "--d", "1", "--json")


@given(st.integers(0, 400_000), st.integers(-1, 1))
def test_decimal_str_matches_str(bits, sign):
    value = sign * ((1 << bits) - 3 * bits)
    assert decimal_str(value) == str(value)


def test_large_decimal_output():
    code, out, _ = call("Tbound", "--m", "2", "--n", "3")
    digits = out.strip()
    assert code == 0
    assert len(digits) == 631313
    assert int(digits[-18:]) == pow(2, 2097174, 10**18)
