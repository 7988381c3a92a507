import json

import numpy as np
import pytest

from a3kit import errors
from a3kit.algebra import A3Element
from a3kit.cli import generate_fixture, run
from a3kit.errors import A3Error, UnknownFixture


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = call(capsys, *argv)
    return code, json.loads(out)


ZETA = '{"a":[1,0],"b":[1,0],"c":[0,0]}'


def test_eval(capsys):
    code, rep = report(capsys, "eval", "--fn", "z^2", "--z", "1,1")
    assert code == 0 and rep["value"] == [0.0, 2.0]
    assert rep["jet"]["v1"] == [2.0, 2.0] and rep["jet"]["v2"] == [2.0, 0.0]
    code, rep = report(capsys, "eval", "--fn", "z^2", "--zeta", ZETA)
    assert A3Element.from_json_obj(rep["value"]) == A3Element(1, 2, 1)


def test_invert(capsys):
    code, rep = report(capsys, "invert", "--zeta", ZETA)
    assert code == 0 and A3Element.from_json_obj(rep["inverse"]) == A3Element(1, -1, 1)
    code, rep = report(capsys, "invert", "--zeta", '{"a":[0,0],"b":[1,0],"c":[0,0]}')
    assert code == 1 and rep["error"]["code"] == errors.NotInvertible.code


def test_extend_both(capsys):
    code, rep = report(capsys, "extend", "--fn", "exp(z)", "--zeta", ZETA, "--method", "both")
    assert code == 0
    assert rep["agreement"]["relative_difference"] <= 1e-10
    assert rep["results"]["contour"]["convergence"]["converged"]


def test_build(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"F0": "z", "F1": "0", "F2": "0"}))
    for method in ("jet", "contour"):
        code, rep = report(capsys, "build", "--triple", str(path), "--zeta", ZETA, "--method", method)
        assert code == 0
        assert A3Element.from_json_obj(rep["value"]).isclose(A3Element(1, 1), 1e-12)


def test_check_monogenic_pass_and_fail(capsys, tmp_path):
    paths = generate_fixture("polynomial-triple", 3, str(tmp_path))
    code, rep = report(capsys, "check-monogenic", "--triple", paths[0], "--box", "unit", "--dirs", "standard",
                       "--npoints", "5", "--boundedness", "2")
    assert code == 0 and rep["passed"] and rep["worst_residual"] <= 1e-6
    assert rep["derivative_vs_built"] <= 1e-6
    assert rep["local_boundedness"]["bounded"]
    code, rep = report(capsys, "check-monogenic", "--builtin", "conj-scalar", "--npoints", "3")
    assert code == 1 and not rep["passed"]


def test_check_monogenic_in_frame(capsys, tmp_path):
    frame = {"e1": {"a": [1, 0], "b": [1, 0], "c": [0, 0]}, "e2": {"a": [0, 1], "b": [0, 0], "c": [0, 0]},
             "e3": {"a": [0, 0], "b": [1, 0], "c": [1, 0]}}
    paths = generate_fixture("exp-triple", 1, str(tmp_path))
    code, rep = report(capsys, "check-monogenic", "--triple", paths[0], "--frame", json.dumps(frame),
                       "--dirs", "frame", "--npoints", "4")
    assert code == 0 and rep["directions"] == "frame"
    assert len(rep["points"][0]["directions"]) == 6


def test_tolstov(capsys, tmp_path):
    path = generate_fixture("conj-grid", 0, str(tmp_path))[0]
    code, rep = report(capsys, "tolstov", "--grid", path)
    assert code == 1 and rep["max_abs_residual"] == pytest.approx(2, abs=1e-10)
    code, out, _ = call(capsys, "tolstov", "--grid", path, "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "x,y,res_re,res_im,abs" and len(lines) == 1 + 19 * 19


def test_fiber_check(capsys):
    code, rep = report(capsys, "fiber-check", "--triple", '{"F0":"z^2","F1":"0","F2":"0"}', "--z", "1,1")
    assert code == 0 and rep["max_deviation"] <= 1e-12
    code, rep = report(capsys, "fiber-check", "--builtin", "identity", "--z", "0.5", "--component", "1")
    assert code == 1


def test_peel_and_fit(capsys, tmp_path):
    triple = '{"F0":"z^2","F1":"1i*z","F2":"3"}'
    table = tmp_path / "table.csv"
    code, _, _ = call(capsys, "peel", "--triple", triple, "--format", "csv", "--out", str(table))
    assert code == 0 and table.read_text().startswith("z_re,z_im,F0_re")
    code, rep = report(capsys, "peel", "--triple", triple, "--grid-n", "9")
    assert code == 0 and rep["summary"]["max_error_vs_generator"] <= 1e-8 and len(rep["table"]) == 81
    code, rep = report(capsys, "fit", "--table", str(table), "--degree", "2")
    assert code == 0
    assert np.allclose(rep["coefficients"]["F0"], [[0, 0], [0, 0], [1, 0]], atol=1e-8)
    code, rep = report(capsys, "peel", "--builtin", "conj-scalar", "--grid-n", "5")
    assert code == 1 and rep["error"]["code"] == errors.NotMonogenic.code


def test_frame_command(capsys):
    frame = {"e1": {"a": [1, 0], "b": [0, 0], "c": [0, 0]}, "e2": {"a": [0, 1], "b": [0, 0], "c": [0, 0]},
             "e3": {"a": [0, 0], "b": [1, 0], "c": [0, 0]}}
    code, rep = report(capsys, "frame", "--frame", json.dumps(frame))
    assert code == 0 and rep["c"] == {"a": [0.0, 0.0], "b": [1.0, 0.0], "c": [0.0, 0.0]}
    frame["e2"]["a"] = [2, 0]
    code, rep = report(capsys, "frame", "--frame", json.dumps(frame))
    assert code == 1 and rep["error"]["code"] == errors.NonSurjectiveFrame.code


def test_fixture_determinism(capsys, tmp_path):
    for kind in ("polynomial-triple", "exp-triple", "conj-grid", "radical-only"):
        a = generate_fixture(kind, 7, str(tmp_path / "a"))[0]
        b = generate_fixture(kind, 7, str(tmp_path / "b"))[0]
        assert open(a, "rb").read() == open(b, "rb").read()
    code, rep = report(capsys, "fixture", "--kind", "conj-grid", "--seed", "0", "--out", str(tmp_path / "c"))
    assert code == 0 and rep["files"] == ["conj_grid_seed0.csv"]
    with pytest.raises(UnknownFixture):
        generate_fixture("nope", 0, str(tmp_path))
    code, _, err = call(capsys, "fixture", "--kind", "nope")
    assert code == 2 and json.loads(err)["error"]["code"] == UnknownFixture.code


def test_conj_grid_spacing(tmp_path):
    from a3kit.monogenicity import read_grid_csv
    xs, ys, F, h = read_grid_csv(generate_fixture("conj-grid", 0, str(tmp_path))[0])
    assert h == pytest.approx(0.1) and xs[0] == -1 and xs[-1] == 1


def test_usage_errors(capsys):
    assert call(capsys)[0] == 2
    assert call(capsys, "eval", "--fn", "z^")[0] == 2
    assert call(capsys, "eval")[0] == 2
    assert call(capsys, "eval", "--fn", "z", "--z", "1", "--tol", "-1")[0] == 2
    assert call(capsys, "tolstov", "--grid", "/nonexistent.csv")[0] == 2
    code, _, err = call(capsys, "eval", "--fn", "z +* 2", "--z", "1")
    assert code == 2 and json.loads(err)["error"]["code"] == errors.ParseError.code


def test_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "extend", "fn": "exp(z)", "zeta": json.loads(ZETA), "method": "both"}))
    code, rep = report(capsys, "--config", str(cfg))
    assert code == 0 and rep["agreement"]["passed"]
    cfg.write_text(json.dumps({"command": "extend", "fn": "exp(z)", "zeta": json.loads(ZETA), "colour": 1}))
    assert call(capsys, "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"command": "tolstov", "grid": str(tmp_path / "missing.csv")}))
    code, _, err = call(capsys, "--config", str(cfg))
    assert code == 2 and "does not exist" in err


def test_thread_count_does_not_change_reports(tmp_path):
    path = generate_fixture("exp-triple", 2, str(tmp_path))[0]
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"r{threads}.json"
        assert run(["check-monogenic", "--triple", path, "--npoints", "40", "--threads", threads,
                    "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_error_codes_are_distinct():
    classes = [c for c in vars(errors).values() if isinstance(c, type) and issubclass(c, A3Error)]
    codes = {c.code for c in classes}
    assert len(codes) == len(classes)
