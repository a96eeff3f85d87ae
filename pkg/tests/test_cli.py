import json
import subprocess
import sys
from pathlib import Path

from fractions import Fraction

import pytest

from conesmith.cli import EXIT_CERTIFICATE, EXIT_OK, EXIT_REFUSAL, EXIT_USAGE, main, to_json

GOLDEN = Path(__file__).parent / "golden" / "worked_example.json"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_worked_example_matches_golden(capsys):
    code, out, err = run(capsys, "paper-example")
    assert code == EXIT_OK
    assert out == GOLDEN.read_text()
    rep = json.loads(out)
    assert rep["verdict"]["m"] == [0, 0, 1] and rep["verdict"]["canonical"]
    assert rep["face_count"] == 12
    refl = [e for e in rep["elements"] if e["classification"] == "reflection"]
    assert len(refl) == 1 and refl[0]["torus_fixed_components"] == 2
    assert rep["quotient_q_gorenstein"] is False
    assert rep["negated_reduction_q_cartier"]["q_cartier"] is False
    assert rep["klt_certificate"] is not None and rep["refusal"] is None
    assert "klt" in err


def test_reports_are_byte_identical():
    cmd = [sys.executable, "-m", "conesmith", "paper-example"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b


def test_analyze_cone(capsys, tmp_path):
    cone = write(tmp_path, "quad.json", {"generators": [[1, 0], [0, 1]]})
    code, out, _ = run(capsys, "analyze-cone", "--cone", cone)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["canonical"] and rep["gorenstein_index"] == 1
    bad = write(tmp_path, "frac.json", {"generators": [[0, 1], [3, -1]]})
    code, out, _ = run(capsys, "analyze-cone", "--cone", bad)
    rep = json.loads(out)
    assert rep["m"] == ["2/3", 1] and rep["gorenstein_index"] == 3 and rep["canonical"] is False


def test_analyze_cone_errors(capsys, tmp_path):
    code, _, err = run(capsys, "analyze-cone")
    assert code == EXIT_USAGE
    broken = write(tmp_path, "broken.json", '{\n  "generators": [[1, 0],\n  [0, 1]\n')
    code, _, err = run(capsys, "analyze-cone", "--cone", broken)
    assert code == EXIT_USAGE and "broken.json:" in err and ":4:" in err
    line = write(tmp_path, "line.json", {"generators": [[1, 0], [-1, 0]]})
    code, _, err = run(capsys, "analyze-cone", "--cone", line)
    assert code == EXIT_USAGE and "line" in err


def test_perfect_fan_lorentzian(capsys):
    code, out, _ = run(capsys, "perfect-fan", "--model", "lorentzian", "--lattice", "U")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert [f["normal"] for f in rep["facets"]] == [[1, 1]]
    assert rep["verdicts"][0]["smooth"] and rep["canonical"] and rep["admissibility"]["ok"]


def test_perfect_fan_psd(capsys, tmp_path):
    window = write(tmp_path, "w.json", {"generators": [[4, -1, 2], [2, -1, 4], [3, -2, 3]]})
    code, out, _ = run(capsys, "perfect-fan", "--model", "psd", "--g", "2", "--window", window)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["canonical"]
    assert [0, 0, 1] in [v for f in rep["facets"] for v in f["vertices"]]


def test_perfect_fan_usage(capsys):
    assert run(capsys, "perfect-fan", "--model", "psd")[0] == EXIT_USAGE
    assert run(capsys, "perfect-fan", "--model", "lorentzian", "--lattice", "U+U")[0] == EXIT_USAGE
    assert run(capsys, "perfect-fan", "--model", "spinor")[0] == EXIT_USAGE


def test_perfect_fan_certificate_failure(capsys):
    code, out, err = run(capsys, "perfect-fan", "--lattice", "U+<-4>", "--height", "1")
    assert code == EXIT_CERTIFICATE
    assert json.loads(out)["error"] == "certificate-failure" and "height" in err


def test_quotient_command(capsys, tmp_path):
    cone = write(tmp_path, "c.json", {"generators": [[1, 0], [0, 1]]})
    swap = write(tmp_path, "g.json", [[[0, 1], [1, 0]]])
    code, out, _ = run(capsys, "quotient", "--cone", cone, "--group", swap)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["quotient_q_gorenstein"] is True
    rot = write(tmp_path, "r.json", [[[0, -1], [1, 0]]])
    assert run(capsys, "quotient", "--cone", cone, "--group", rot)[0] == EXIT_REFUSAL
    shear = write(tmp_path, "s.json", [[[1, 1], [0, 1]]])
    assert run(capsys, "quotient", "--cone", cone, "--group", shear)[0] == EXIT_REFUSAL
    scale = write(tmp_path, "t.json", [[[2, 0], [0, 1]]])
    assert run(capsys, "quotient", "--cone", cone, "--group", scale)[0] == EXIT_USAGE
    bad = write(tmp_path, "b.json", {"generators": [[0, 1], [3, -1]]})
    trivial = write(tmp_path, "e.json", [])
    code, out, _ = run(capsys, "quotient", "--cone", bad, "--group", trivial)
    assert code == EXIT_REFUSAL
    assert json.loads(out)["refusal"]["failed_check"] == "cone has canonical singularities"


def test_k3_command(capsys):
    code, out, _ = run(capsys, "k3", "--d", "3", "--height", "1", "--max-support", "1")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["lattice"]["signature"] == [2, 19, 0] and rep["lattice"]["discriminant"] == [6]
    assert rep["lattice"]["q_values"] == ["11/6"]
    assert rep["quotient"]["signature"] == [1, 18, 0]
    assert rep["probe"]["round_trip_ok"]
    assert run(capsys, "k3", "--d", "0")[0] == EXIT_USAGE
    assert run(capsys, "k3")[0] == EXIT_USAGE


def test_k3_from_scene(capsys, tmp_path):
    scene = write(tmp_path, "s.json", {"lattice": "U+<-2>", "flags": {"isotropic": [1, 0, 0], "height": 2}})
    code, out, _ = run(capsys, "k3", "--scene", scene)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["probe"]["lifted"] == 1


def test_validate(capsys, tmp_path):
    ok = write(tmp_path, "ok.json", {"lattice": {"gram": [[0, 1], [1, 0]]}})
    code, out, _ = run(capsys, "validate", "--scene", ok)
    assert code == EXIT_OK and json.loads(out)["ok"]
    asym = write(tmp_path, "asym.json", {"lattice": {"gram": [[0, 1], [2, 0]]}})
    code, out, _ = run(capsys, "validate", "--scene", asym)
    diags = json.loads(out)["diagnostics"]
    assert code == EXIT_USAGE and any("[0][1]" in d and "[1][0]" in d for d in diags)
    nonuni = write(tmp_path, "g.json", {"group": [[[2, 0], [0, 1]]], "extra": 1})
    diags = json.loads(run(capsys, "validate", "--scene", nonuni)[1])["diagnostics"]
    assert any("group[0]" in d and "unimodular" in d for d in diags)
    assert any(d.startswith("extra:") for d in diags)
    line = write(tmp_path, "l.json", {"cone": {"generators": [[1, 0], [-1, 0]]}})
    diags = json.loads(run(capsys, "validate", "--scene", line)[1])["diagnostics"]
    assert any("not pointed" in d for d in diags)


def test_scene_driven_analysis(capsys, tmp_path):
    scene = write(tmp_path, "s.json", {"cone": {"generators": [[1, 1], [1, -1]]}})
    code, out, _ = run(capsys, "analyze-cone", "--scene", scene)
    assert code == EXIT_OK and json.loads(out)["m"] == [1, 0]
    bad = write(tmp_path, "bad.json", {"cone": {"generators": [[1, 1]]}, "colour": "red"})
    assert run(capsys, "analyze-cone", "--scene", bad)[0] == EXIT_USAGE


def test_version_and_no_command(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == EXIT_OK and "kernel" in out
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "--help")[0] == EXIT_OK


def test_json_is_exact():
    assert to_json(Fraction(3, 4)) == "3/4" and to_json(Fraction(4, 2)) == 2
    with pytest.raises(TypeError):
        to_json(0.5)
