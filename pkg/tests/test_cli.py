import json
import shutil
import subprocess

import pytest

from contiguity import __version__
from contiguity.cli import EXIT_CAP, EXIT_OK, EXIT_USAGE, main, parse_complex_spec
from contiguity.complex import SimplicialComplex, boundary, torus
from contiguity.maps import exact_class_count
from contiguity.persistence import circle_sequence


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_complex_torus(capsys):
    code, rep = run_json(capsys, "complex", "--standard", "torus_T")
    assert code == EXIT_OK and rep["f_vector"] == [9, 27, 18]
    assert rep["version"] == __version__ and rep["config"]["command"] == "complex"


def test_complex_circle(capsys):
    code, rep = run_json(capsys, "complex", "--standard", "circle", "--k", "12")
    assert rep["f_vector"] == [12, 12]


def test_complex_facets_roundtrip(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(torus().to_json())
    code, out = run(capsys, "complex", "--facets", str(path), "--out", str(tmp_path / "o.json"))
    assert code == EXIT_OK and out == ""
    again = json.loads((tmp_path / "o.json").read_text())
    assert SimplicialComplex.from_dict(again["complex"]) == torus()


def test_complex_bad_facet_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"facets": [[0, 1], []]}')
    code, rep = run_json(capsys, "complex", "--facets", str(path))
    assert code != EXIT_OK and rep["error"]["type"] == "ComplexError"


def test_count_exact_unbased_triangle(capsys):
    code, rep = run_json(capsys, "count", "--target", "boundary2", "--k", "3", "--mode", "exact",
                         "--unbased")
    assert code == EXIT_OK and rep["class_count"] == 7
    assert rep["class_count_over_k2"] == pytest.approx(7 / 9)


def test_count_compiled_engine(capsys):
    code, rep = run_json(capsys, "count", "--target", "torus_T", "--k", "5", "--mode", "exact",
                         "--engine", "compiled")
    assert rep["class_count"] == exact_class_count(
        parse_complex_spec("circle:5"), torus(), based=(0, 0)).class_count


def test_count_point(capsys):
    code, rep = run_json(capsys, "count", "--target", "point", "--k", "5", "--workers", "1")
    assert code == EXIT_OK and rep["class_count"] == 1 and rep["stabilized"]


def test_count_estimate_small(capsys):
    code, rep = run_json(capsys, "count", "--target", "torus_T", "--k", "5", "--seed", "1",
                         "--workers", "1")
    assert rep["class_count"] == 7 and rep["M"] == 500_000 and rep["kappa"] == 0.1
    assert "wall_time" not in rep


def test_reports_are_byte_identical(capsys):
    argv = ["count", "--target", "pinched_P", "--k", "6", "--seed", "3", "--workers", "1",
            "--schedule", "200,1000"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second


def test_timing_flag_adds_wall_time(capsys):
    _, rep = run_json(capsys, "count", "--target", "point", "--k", "4", "--timing",
                      "--workers", "1")
    assert rep["wall_time"] >= 0


def test_cap_exceeded_is_structured(capsys):
    code, rep = run_json(capsys, "count", "--target", "torus_T", "--k", "7", "--mode", "exact",
                         "--cap", "100")
    assert code == EXIT_CAP
    assert rep["error"]["type"] == "CapExceededError" and rep["error"]["exit_code"] == EXIT_CAP
    assert rep["config"]["cap"] == 100


def test_usage_errors(capsys):
    code, rep = run_json(capsys, "count", "--target", "torus_T", "--k", "5", "--unbased")
    assert code == EXIT_USAGE
    code, rep = run_json(capsys, "count", "--target", "klein", "--k", "5")
    assert code != EXIT_OK and "error" in rep
    code, rep = run_json(capsys, "persist", "--pipeline", "rips-h0")
    assert code == EXIT_USAGE


def test_disconnected_target_fails(capsys, tmp_path):
    path = tmp_path / "two.json"
    path.write_text('{"vertex_count": 3, "facets": [[0, 1], [2]]}')
    code, rep = run_json(capsys, "count", "--target", str(path), "--k", "4", "--workers", "1")
    assert code != EXIT_OK and rep["error"]["type"] == "ComplexError"


def test_table1_empty_k_list(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _ = run(capsys, "table1", "--k-list", "", "--format", "csv", "--out", str(out))
    assert code == EXIT_OK
    assert out.read_text() == "k,T,P,T_over_k2,P_over_k2,T_min,T_max,P_min,P_max\n"


def test_table1_small_row(capsys):
    code, rep = run_json(capsys, "table1", "--k-list", "4", "--seeds", "1,2", "--workers", "1")
    (row,) = rep["table"]
    assert row["k"] == 4 and len(rep["runs"]) == 4
    assert row["T_min"] <= float(row["T"]) <= row["T_max"]


def test_persist_homology(capsys):
    code, rep = run_json(capsys, "persist", "--pipeline", "homology", "--standard", "torus_T",
                         "--field", "2")
    assert rep["betti"] == [1, 2, 1]


def test_persist_rips_triple(capsys, tmp_path):
    pts = tmp_path / "three_points.csv"
    pts.write_text("0\n1\n2\n")
    code, rep = run_json(capsys, "persist", "--pipeline", "rips-h0", "--points", str(pts))
    bars = sorted(rep["barcodes"][0]["bars"], key=lambda b: (b[1] is None, b))
    assert bars == [["0.0", "1.0"], ["0.0", "1.0"], ["0.0", None]]
    code, out = run(capsys, "persist", "--pipeline", "rips-h0", "--points", str(pts),
                    "--format", "csv")
    assert out.splitlines()[0] == "degree,birth,death" and "inf" in out


def test_persist_subdivision(capsys):
    code, rep = run_json(capsys, "persist", "--pipeline", "subdivision-h0", "--x", "circle:3,6",
                         "--y", "boundary2", "--based")
    xs, _ = circle_sequence([3, 6])
    assert rep["class_counts"] == [exact_class_count(x, boundary(2), based=(0, 0)).class_count
                                   for x in xs]


def test_persist_contiguity_compiled(capsys, tmp_path):
    pts = tmp_path / "ring.csv"
    pts.write_text("1,0\n0,1\n-1,0\n0,-1\n")
    code, rep = run_json(capsys, "persist", "--pipeline", "contiguity-h0", "--points", str(pts),
                         "--z", "circle:4", "--based", "--engine", "compiled",
                         "--scales", "0,1.5,2")
    assert code == EXIT_OK and rep["class_counts"] == [1, 3, 1]
    code, rep = run_json(capsys, "persist", "--pipeline", "contiguity-h0", "--points", str(pts),
                         "--scales", "1,x")
    assert code == EXIT_USAGE


@pytest.mark.skipif(shutil.which("contiguity") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["contiguity", "complex", "--standard", "pinched_P"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["f_vector"] == [14, 38, 24]
