import json
import subprocess
import sys

import pytest

from kepoly import cli
from kepoly.cli import CSV_HEADER, run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = invoke(capsys, *argv, "--json")
    return code, json.loads(out)


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_check_x1(capsys):
    code, rep = report(capsys, "check", "--builtin", "X1")
    assert code == cli.EXIT_OK
    assert rep["ke"]["verdict"] == "KE_EXISTS"
    assert [b["exact"] for b in rep["dh"]["barycenter"]] == ["24641/9888"] * 2
    assert list(rep) == ["input", "dh", "ke"]


def test_rlb_x2(capsys):
    code, rep = report(capsys, "rlb", "--builtin", "X2")
    assert code == cli.EXIT_OK
    assert rep["rlb"]["R"]["exact"] == "1046175339/1236719713"
    assert rep["rlb"]["R"]["decimal"] == pytest.approx(1046175339 / 1236719713, rel=1e-11)


def test_check_exit_codes(capsys, tmp_path):
    assert invoke(capsys, "check", "--builtin", "P2", "--json")[0] == cli.EXIT_OK
    code, rep = report(capsys, "check", "--builtin", "P2")
    assert [b["exact"] for b in rep["dh"]["barycenter"]] == ["0", "0"]
    assert invoke(capsys, "check", "--builtin", "X2")[0] == cli.EXIT_NO_KE
    assert invoke(capsys, "check", "--builtin", "Bl1P2")[0] == cli.EXIT_NO_KE
    boundary = {"group": {"factors": ["A1"]}, "polytope": {"pplus_vertices": [["0"], ["4/3"]]}}
    assert invoke(capsys, "check", "--config", write_config(tmp_path, boundary))[0] == cli.EXIT_BOUNDARY


def test_input_errors(capsys, tmp_path):
    code, _, err = invoke(capsys, "check", "--builtin", "X9")
    assert code == cli.EXIT_INPUT and "X9" in err
    assert invoke(capsys, "frobnicate")[0] == cli.EXIT_INPUT
    assert invoke(capsys, "check")[0] == cli.EXIT_INPUT
    code, _, err = invoke(capsys, "check", "--config", str(tmp_path / "missing.json"))
    assert code == cli.EXIT_INPUT and "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert invoke(capsys, "check", "--config", str(bad))[0] == cli.EXIT_INPUT
    assert invoke(capsys, "figure", "--builtin", "X0")[0] == cli.EXIT_INPUT


@pytest.mark.parametrize("data, field", [
    ({"group": {"factors": ["A2"]}, "polytope": {"pplus_vertices": [["0", "0"], ["3", "x"], ["3", "3"]]}},
     "polytope.pplus_vertices[1][1]"),
    ({"group": {"factors": ["Q7"]}, "polytope": {"wonderful": True}}, "group"),
    ({"group": {"factors": ["A1"]}, "polytope": {}}, "polytope"),
    ({"group": {"factors": ["A1"]}, "polytope": {"wonderful": True, "p_vertices": [["-2"], ["2"]]}}, "polytope"),
    ({"group": {"factors": ["A1"]}, "polytope": {"wonderful": True}, "coordinates": "polar"}, "coordinates"),
    ({"group": {"factors": ["A1"]}, "polytope": {"wonderful": True}, "extra": 1}, "extra"),
    ({"group": {"factors": ["A1"]}, "polytope": {"wonderful": True}, "options": {"dilation": "0"}},
     "options.dilation"),
    ({"group": {"factors": ["A1"]}, "polytope": {"wonderful": True}, "options": {"quadrature": {"step": -1}}},
     "options.quadrature"),
])
def test_config_errors_name_the_field(capsys, tmp_path, data, field):
    code, _, err = invoke(capsys, "check", "--config", write_config(tmp_path, data))
    assert code == cli.EXIT_INPUT
    assert field in err


def test_wonderful_and_p_vertices_inputs(capsys, tmp_path):
    _, base = report(capsys, "check", "--builtin", "X1")
    wonderful = {"group": {"factors": ["A2"]}, "polytope": {"wonderful": True}}
    _, a = report(capsys, "check", "--config", write_config(tmp_path, wonderful, "w.json"))
    # W-orbit of 3(alpha1 + alpha2); s1 acts as (a, b) -> (b - a, b)
    hexagon = [["3", "3"], ["0", "3"], ["3", "0"], ["-3", "0"], ["0", "-3"], ["-3", "-3"]]
    hexagon_cfg = {"group": {"factors": ["A2"]}, "polytope": {"p_vertices": hexagon}, "coordinates": "realization"}
    # the A2 realization uses simple-root coordinates, so both coordinate modes coincide here
    _, b = report(capsys, "check", "--config", write_config(tmp_path, hexagon_cfg, "p.json"))
    for rep in (a, b):
        assert rep["dh"]["barycenter"] == base["dh"]["barycenter"] and rep["ke"] == base["ke"]
        assert rep["input"]["polytope"] == base["input"]["polytope"]


def test_not_clipped_input_rejected(capsys, tmp_path):
    # a chamber polygon that is not the chamber part of its W-hull
    data = {"group": {"factors": ["A2"]}, "polytope": {"pplus_vertices": [["1", "1"], ["3", "3/2"], ["3", "3"]]}}
    code, _, err = invoke(capsys, "check", "--config", write_config(tmp_path, data))
    assert code == cli.EXIT_INPUT and "pplus_vertices" in err


@pytest.mark.parametrize("command", ["check", "rlb", "barycenter"])
@pytest.mark.parametrize("name", ["X1", "X2", "Bl1P2"])
def test_echo_round_trip(capsys, tmp_path, command, name):
    code, rep = report(capsys, command, "--builtin", name)
    path = write_config(tmp_path, rep["input"])
    code2, rep2 = report(capsys, command, "--config", path)
    assert (code2, rep2) == (code, rep)


def test_catalog_dump_round_trip(capsys, tmp_path):
    code, out, _ = invoke(capsys, "catalog", "X2")
    assert code == 0
    path = write_config(tmp_path, json.loads(out))
    assert report(capsys, "rlb", "--config", path) == report(capsys, "rlb", "--builtin", "X2")
    code, out, _ = invoke(capsys, "catalog")
    assert code == 0 and out.split()[0] == "X0" and len(out.splitlines()) == 6
    code, rep = report(capsys, "catalog")
    assert [b["name"] for b in rep["builtins"]][-1] == "Bl1P2"


def test_determinism_in_process(capsys):
    outs = {invoke(capsys, "rlb", "--builtin", "X2", "--json") for _ in range(3)}
    assert len(outs) == 1


def test_determinism_subprocess(capsys):
    code, out, _ = invoke(capsys, "rlb", "--builtin", "Bl1P2", "--json")
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "kepoly", "rlb", "--builtin", "Bl1P2", "--json"],
                              capture_output=True, text=True, check=False)
        assert (proc.returncode, proc.stdout) == (code, out)


def test_text_output(capsys):
    code, out, _ = invoke(capsys, "rlb", "--builtin", "X2")
    assert code == 0 and "1046175339/1236719713" in out and not out.lstrip().startswith("{")


def test_timing_only_on_request(capsys):
    _, rep = report(capsys, "barycenter", "--builtin", "X0", "--timing")
    assert rep["timing"]["seconds"] >= 0
    _, rep = report(capsys, "barycenter", "--builtin", "X0")
    assert "timing" not in rep


def test_figure_csv_and_svg(capsys, tmp_path):
    code, out, _ = invoke(capsys, "figure", "--builtin", "X2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == CSV_HEADER == "kind,x,y,label"
    labels = [line.split(",")[3] for line in lines[1:]]
    assert labels == ["v0", "v1", "v2", "v3", "v4", "2rho", "bar", "alpha1", "alpha2", "A", "B", "C"]
    csv, svg = tmp_path / "x1.csv", tmp_path / "x1.svg"
    assert invoke(capsys, "figure", "--builtin", "X1", "--csv", str(csv), "--svg", str(svg))[0] == 0
    rows = csv.read_text().splitlines()
    assert "A" not in [r.split(",")[3] for r in rows[1:]]  # KE input: no ray exit
    text = svg.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>") and "<polygon" in text


def test_verify_x0(capsys):
    code, rep = report(capsys, "verify", "--builtin", "X0")
    assert code == cli.EXIT_OK
    assert [r["name"] for r in rep["residuals"]] == ["pushforward", "barycenter", "zero_integral"]
    assert all(r["passed"] for r in rep["residuals"]) and rep["j_inequalities"]["passed"]


def test_verify_failure_exit(capsys, tmp_path):
    data = json.loads(json.dumps(cli.builtin_config("X0")))
    data["options"]["quadrature"] = {"step": 1.0, "levels": 1}
    code, rep = report(capsys, "verify", "--config", write_config(tmp_path, data))
    assert code == cli.EXIT_VERIFY_FAILED
    assert not all(r["passed"] for r in rep["residuals"])


def test_verify_rank_limit(capsys, tmp_path):
    data = {"group": {"factors": ["A3"]}, "polytope": {"wonderful": True}}
    code, _, err = invoke(capsys, "verify", "--config", write_config(tmp_path, data))
    assert code == cli.EXIT_INPUT and "rank" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kepoly", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().startswith("kepoly ")
