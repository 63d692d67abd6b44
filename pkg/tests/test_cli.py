"""End-to-end command-line behavior: exit codes, reports, file outputs."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from decpotentials import de_rham, load_cochain_csv, save_cochain_csv, save_mesh_json
from decpotentials.cli import main

from conftest import annulus_complex


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def out_json(text):
    return json.loads(text)


def err_json(text):
    return json.loads(text)["error"]


def test_mesh_info_square(capsys):
    code, out, err = run_cli(capsys, ["mesh-info", "--mesh", "builtin:square:2"])
    assert code == 0 and err == ""
    info = out_json(out)
    assert info["command"] == "mesh-info"
    assert info["mesh"] == "builtin:square:2"
    assert (info["vertices"], info["edges"], info["triangles"]) == (9, 16, 8)
    assert info["euler_characteristic"] == 1
    assert info["boundary_edges"] == 8
    assert info["bbox"] == [[0.0, 0.0], [1.0, 1.0]]
    assert abs(info["total_area"] - 1.0) < 1e-15


def test_mesh_info_out_file_matches_stdout(capsys, tmp_path):
    path = tmp_path / "info.json"
    code, out, _ = run_cli(
        capsys, ["mesh-info", "--mesh", "builtin:ushape:10", "--out", str(path)]
    )
    assert code == 0
    assert path.read_text() == out
    assert out_json(out)["triangles"] == 144


def test_mesh_info_file_source(capsys, tmp_path, square1):
    path = tmp_path / "mesh.json"
    save_mesh_json(square1, path)
    for spec in (f"file:{path}", str(path)):
        code, out, _ = run_cli(capsys, ["mesh-info", "--mesh", spec])
        assert code == 0
        assert out_json(out)["vertices"] == 4


def test_bad_mesh_specs(capsys, tmp_path):
    for spec in ("builtin:hexagon:3", "builtin:square", str(tmp_path / "missing.json")):
        code, out, err = run_cli(capsys, ["mesh-info", "--mesh", spec])
        assert code == 2
        assert out == ""
        assert err_json(err)["type"] in ("ValueError", "FileNotFoundError")


def test_verify_collapse_passes(capsys):
    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "collapse", "--trials", "5"],
    )
    assert code == 0
    report = out_json(out)
    assert report["pass"] is True
    assert report["op"] == "collapse"
    assert report["tolerance"] == 1e-12
    assert report["trials"] == 5
    assert sorted(report["per_k"]) == ["0", "1", "2"]


def test_verify_tolerance_threshold(capsys):
    argv = [
        "verify", "--mesh", "builtin:square:2", "--op", "star",
        "--point", "0.52,0.51", "--trials", "3", "--tolerance", "1e-30",
    ]
    code, out, _ = run_cli(capsys, argv)
    assert code == 3
    report = out_json(out)
    assert report["pass"] is False
    assert report["tolerance"] == 1e-30
    assert report["max_residual"] > 0.0


def test_verify_report_is_deterministic(capsys, tmp_path):
    argv = ["verify", "--mesh", "builtin:square:2", "--op", "star",
            "--point", "0.52,0.51", "--trials", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(capsys, argv + ["--report", str(a)])[0] == 0
    assert run_cli(capsys, argv + ["--report", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_strong_collapse(capsys):
    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "strong-collapse",
         "--trials", "5"],
    )
    assert code == 0
    assert out_json(out)["pass"] is True


def test_verify_contraction_on_closed_star(capsys, tmp_path, triangle):
    path = tmp_path / "tri.json"
    save_mesh_json(triangle, path)
    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", str(path), "--op", "contraction",
         "--terminal-vertex", "0", "--trials", "5"],
    )
    assert code == 0
    assert out_json(out)["pass"] is True


def test_verify_contraction_requires_closed_star(capsys):
    # square:2 is not the closed star of its center, so the vertex map
    # collapsing the bottom level is not simplicial
    code, _, err = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "contraction",
         "--terminal-vertex", "4", "--trials", "2"],
    )
    assert code == 2
    assert "simplicial" in err_json(err)["message"]


def test_verify_contraction_requires_terminal(capsys):
    code, _, err = run_cli(
        capsys, ["verify", "--mesh", "builtin:square:2", "--op", "contraction"]
    )
    assert code == 2
    assert "--terminal-vertex" in err_json(err)["message"]


def test_verify_lipschitz_straight_line(capsys):
    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "lipschitz",
         "--contraction", "straight-line", "--point", "0.52,0.51", "--trials", "3"],
    )
    assert code == 0
    assert out_json(out)["pass"] is True


def test_verify_lipschitz_requires_point(capsys):
    code, _, err = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "lipschitz",
         "--contraction", "straight-line"],
    )
    assert code == 2
    assert "--point" in err_json(err)["message"]


def test_verify_bogovskii(capsys):
    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "bogovskii",
         "--point", "0.52,0.51", "--trials", "3"],
    )
    assert code == 0
    assert out_json(out)["pass"] is True


def test_verify_bogovskii_rejects_facet_point(capsys):
    code, _, err = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "bogovskii",
         "--point", "0.5,0.5"],
    )
    assert code == 2
    assert err_json(err)["type"] == "BasePointOnFacetError"


def test_complex_property_flag(capsys):
    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "collapse",
         "--complex-property", "--trials", "3"],
    )
    assert code == 0
    assert out_json(out)["operator"].endswith("complex-property")

    code, _, err = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "bogovskii",
         "--point", "0.52,0.51", "--complex-property"],
    )
    assert code == 2
    assert "complex-property" in err_json(err)["message"]


def test_potential_writes_all_outputs(capsys, tmp_path, square2):
    def run_into(d):
        d.mkdir(exist_ok=True)
        argv = [
            "potential", "--mesh", "builtin:square:2", "--op", "star",
            "--point", "0.52,0.51", "--field", "g1",
            "--out", str(d / "pot.csv"),
            "--samples", str(d / "samples.csv"),
            "--report", str(d / "report.json"),
        ]
        code, out, _ = run_cli(capsys, argv)
        assert code == 0
        return out

    out = run_into(tmp_path / "one")
    report = out_json(out)
    assert report["command"] == "potential"
    assert report["field"] == "g1"
    assert report["degree"] == 2
    assert report["pass"] is True

    pot = load_cochain_csv(square2, tmp_path / "one" / "pot.csv")
    assert pot.dim == 1
    lines = (tmp_path / "one" / "samples.csv").read_text().splitlines()
    assert lines[0] == "x,y,vx,vy"
    assert len(lines) == 1 + 8

    run_into(tmp_path / "two")
    for name in ("pot.csv", "samples.csv", "report.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_potential_scalar_samples(capsys, tmp_path):
    samples = tmp_path / "samples.csv"
    code, out, _ = run_cli(
        capsys,
        ["potential", "--mesh", "builtin:square:2", "--op", "star",
         "--point", "0.52,0.51", "--field", "f", "--samples", str(samples)],
    )
    assert code == 0
    assert out_json(out)["degree"] == 1
    assert samples.read_text().splitlines()[0] == "x,y,value"


def test_potential_from_cochain_file(capsys, tmp_path, square2):
    field = tmp_path / "field.csv"
    save_cochain_csv(de_rham(square2, lambda p: np.array([p[1], -p[0]]), 1), field)
    code, out, _ = run_cli(
        capsys,
        ["potential", "--mesh", "builtin:square:2", "--op", "collapse",
         "--field", f"file:{field}"],
    )
    assert code == 0
    assert out_json(out)["degree"] == 1


def test_potential_rejects_degree_zero_field(capsys, tmp_path, square2):
    field = tmp_path / "values.csv"
    save_cochain_csv(de_rham(square2, lambda p: p[0], 0), field)
    code, _, err = run_cli(
        capsys,
        ["potential", "--mesh", "builtin:square:2", "--op", "collapse",
         "--field", str(field)],
    )
    assert code == 2
    assert "degree" in err_json(err)["message"]


def test_find_collapse_and_reuse(capsys, tmp_path):
    seq = tmp_path / "seq.json"
    code, out, _ = run_cli(
        capsys,
        ["find-collapse", "--mesh", "builtin:square:2", "--out", str(seq)],
    )
    assert code == 0
    found = out_json(out)
    assert found["steps"] > 0
    assert isinstance(found["terminal"], int)

    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "collapse",
         "--sequence", str(seq), "--trials", "3"],
    )
    assert code == 0
    assert out_json(out)["pass"] is True

    # the file holds a plain collapse, not a strong collapse
    code, _, err = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "strong-collapse",
         "--sequence", str(seq)],
    )
    assert code == 2
    assert "sequence file" in err_json(err)["message"]


def test_find_strong_collapse(capsys, tmp_path):
    seq = tmp_path / "seq.json"
    code, out, _ = run_cli(
        capsys,
        ["find-strong-collapse", "--mesh", "builtin:square:2", "--out", str(seq)],
    )
    assert code == 0
    assert out_json(out)["steps"] == 8

    code, out, _ = run_cli(
        capsys,
        ["verify", "--mesh", "builtin:square:2", "--op", "strong-collapse",
         "--sequence", str(seq), "--trials", "3"],
    )
    assert code == 0
    assert out_json(out)["pass"] is True


def test_find_collapse_fails_on_annulus(capsys, tmp_path):
    path = tmp_path / "annulus.json"
    save_mesh_json(annulus_complex(), path)
    code, _, err = run_cli(capsys, ["find-collapse", "--mesh", str(path)])
    assert code == 2
    assert "no collapse sequence" in err_json(err)["message"]


def test_console_script_roundtrip():
    exe = shutil.which("decpot")
    assert exe is not None, "decpot entry point should be on PATH after install"
    proc = subprocess.run(
        [exe, "mesh-info", "--mesh", "builtin:square:1"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["vertices"] == 4
