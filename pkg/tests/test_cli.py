"""CLI surface: subcommands, formats, exit codes, determinism."""

import json

import pytest

from conftest import MODELS
from novtor.cli import main
from novtor import TorusAutomorphism, lefschetz_numbers


@pytest.fixture
def cat_orbits_file(tmp_path):
    """Counting file holding the suspension orbit counts of the cat map."""
    L = lefschetz_numbers(TorusAutomorphism([[2, 1], [1, 1]]).lefschetz_data(60), 60)
    payload = {
        "rank": 1,
        "omega": [-1],
        "zeros": [],
        "instantons": [],
        "orbits": [{"gamma": [k], "value": [L[k - 1], k]}
                   for k in range(1, 61)],
    }
    path = tmp_path / "cat_orbits.json"
    path.write_text(json.dumps(payload))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_zeta_cat_map(capsys):
    code, out = run(capsys, ["zeta", "--map", str(MODELS / "catmap.json"),
                             "--k-max", "6"])
    assert code == 0
    payload = json.loads(out)
    assert payload["lefschetz"] == [-1, -5, -16, -45, -121, -320]
    assert payload["fixed_points"] == [1, 5, 16, 45, 121, 320]
    assert payload["zeta"] == {"num": [1, -3, 1], "den": [1, -2, 1]}


def test_zeta_csv_format(capsys):
    code, out = run(capsys, ["--format", "csv", "zeta",
                             "--map", str(MODELS / "catmap.json"),
                             "--k-max", "3"])
    assert code == 0
    assert out.splitlines() == ["k,L_k", "1,-1", "2,-5", "3,-16"]


def test_transform_ray_verdicts(capsys, cat_orbits_file):
    code, out = run(capsys, ["transform", "--counting", cat_orbits_file,
                             "--points=-3,-2,-0.5"])
    assert code == 0
    rows = json.loads(out)["rows"]
    by_z = {row["z_re"]: row for row in rows}
    # converged below the entropy (~0.9624), divergent tail above it
    assert by_z[-3.0]["verdict"] == "converged"
    assert by_z[-2.0]["verdict"] == "converged"
    # log zeta at z=-2: log((1-3u+u^2)/(1-u)^2), u = e^{-2}
    assert by_z[-2.0]["value_re"] == pytest.approx(-0.19969, abs=1e-5)
    assert by_z[-0.5]["verdict"] == "tail-unbounded"


def test_transform_empty_counts(capsys):
    code, out = run(capsys, ["transform",
                             "--counting", str(MODELS / "circle.json"),
                             "--points=-2,-1"])
    assert code == 0
    for row in json.loads(out)["rows"]:
        assert row["value_re"] == 0.0 and row["value_im"] == 0.0


def test_malformed_input_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["transform", "--counting", str(bad)]) == 2
    assert main(["zeta", "--map", str(tmp_path / "missing.json")]) == 2


def test_check_complex_pass_and_fail(capsys):
    w = str(MODELS / "weight_half.json")
    code, out = run(capsys, ["check-complex",
                             "--counting", str(MODELS / "sphere_like.json"),
                             "--weight", w])
    assert code == 0
    assert json.loads(out)["d_squared_ok"] is True
    code, out = run(capsys, ["check-complex",
                             "--counting", str(MODELS / "corrupted.json"),
                             "--weight", w])
    assert code == 1
    assert json.loads(out)["d_squared_ok"] is False


def test_torsion_subcommand(capsys, tmp_path):
    cfile = tmp_path / "two_term.json"
    cfile.write_text(json.dumps({"dims": [1, 1], "d": [[[5]]]}))
    code, out = run(capsys, ["torsion", "--complex", str(cfile)])
    assert code == 0
    assert json.loads(out)["torsion"]["squared"] == [25.0, 0.0]
    # non-acyclic input is a precondition failure
    nfile = tmp_path / "null.json"
    nfile.write_text(json.dumps({"dims": [1, 1], "d": [[[0]]]}))
    assert main(["torsion", "--complex", str(nfile)]) == 3


def test_verify_tor_subcommand(capsys):
    code, out = run(capsys, ["verify-tor", "--map", str(MODELS / "catmap.json"),
                             "--truncation", "12"])
    assert code == 0
    assert json.loads(out)["match"] is True


def test_abscissa_subcommand(capsys):
    code, out = run(capsys, ["abscissa", "--map", str(MODELS / "catmap.json"),
                             "--truncation", "60"])
    assert code == 0
    assert json.loads(out)["abscissa"] == pytest.approx(0.962424, abs=1e-3)
    assert main(["abscissa"]) == 2


def test_check_skeleton_subcommand(capsys):
    code, out = run(capsys, ["check-skeleton",
                             "--skeleton", str(MODELS / "skeleton.json")])
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_output_deterministic(capsys, tmp_path):
    argv = ["zeta", "--map", str(MODELS / "catmap.json"), "--k-max", "5"]
    _, first = run(capsys, argv)
    _, second = run(capsys, argv)
    assert first == second


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code = main(["--out", str(target), "zeta",
                 "--map", str(MODELS / "catmap.json"), "--k-max", "2"])
    assert code == 0
    assert json.loads(target.read_text())["lefschetz"] == [-1, -5]
