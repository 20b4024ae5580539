import json
import math
import subprocess
import sys

import pytest

from dagph.cli import main
from dagph.dagmodel import serialize
from dagph.fixtures import circle_vertex, four_punctured_sphere, genus_two, triangle_path
from dagph.pipelines import sample_circle


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


def test_rank_triangle(write, capsys):
    path = write("t.json", serialize(triangle_path()))
    assert main(["rank", path, "--k", "1", "--field", "q"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "source,target,k,rank"
    assert "X5,X5,1,1" in rows and "X5,X6,1,0" in rows


def test_rank_empty_graph(write, capsys):
    path = write("e.json", '{"simplices": [], "vertices": [], "edges": []}')
    assert main(["rank", path]) == 0
    assert capsys.readouterr().out == "source,target,k,rank\n"


def test_rank_output_is_deterministic(write, tmp_path):
    path = write("g.json", serialize(genus_two()))
    outs = []
    for n in range(2):
        d = tmp_path / f"out{n}"
        assert main(["rank", path, "--out", str(d)]) == 0
        outs.append((d / "ranks.csv").read_bytes())
    assert outs[0] == outs[1]


def test_subgraph_ranks(write, tmp_path, capsys):
    circle = write("c.json", serialize(circle_vertex()))
    assert main(["subgraph", circle, "--out", str(tmp_path / "c")]) == 0
    assert capsys.readouterr().out.strip() == "1"
    doc = json.loads((tmp_path / "c" / "subgraph.json").read_text())
    assert doc["rank"] == 1 and doc["field"] == "fp:46337"
    sphere = write("s.json", serialize(four_punctured_sphere()))
    for field in ("q", "fp:46337"):
        for engine in ("exact", "oracle"):
            assert main(["subgraph", sphere, "--field", field, "--engine", engine]) == 0
            assert capsys.readouterr().out.strip() == "0"


def test_subgraph_selected_vertices(write, capsys):
    path = write("g.json", serialize(genus_two()))
    assert main(["subgraph", path, "--subgraph", "X, XuY", "--field", "q"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_missing_input_exits_2_without_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["rank", str(tmp_path / "missing.json"), "--out", str(out)]) == 2
    assert "cannot read" in capsys.readouterr().err
    assert not out.exists()


def test_malformed_input_exits_2(write, capsys):
    path = write("bad.json", '{"simplices": [[0]], "vertices": []}')
    assert main(["rank", path]) == 2
    assert "missing field 'edges'" in capsys.readouterr().err


def test_bad_field_exits_2(write, capsys):
    path = write("t.json", serialize(triangle_path()))
    assert main(["rank", path, "--field", "fp:6"]) == 2


def test_disconnected_selector_exits_3(write, capsys):
    path = write("t.json", serialize(triangle_path()))
    assert main(["subgraph", path, "--subgraph", "X1,X4"]) == 3


def test_compare_identical_clouds(write, tmp_path, capsys):
    pts = sample_circle(12, 0, noise=0.05).to_csv()
    a, b = write("a.csv", pts), write("b.csv", pts)
    out = tmp_path / "cmp"
    assert main(["compare", a, b, "--radii", "0.1,0.3,0.5", "--out", str(out)]) == 0
    res = json.loads((out / "result.json").read_text())
    assert res["bottleneck_x"] == 0.0 and res["bottleneck_y"] == 0.0
    assert (out / "diagram_x.csv").read_text() == (out / "diagram_g.csv").read_text()


def test_subsample_circle(write, tmp_path, capsys):
    path = write("c.csv", sample_circle(20, 0).to_csv())
    out = tmp_path / "sub"
    assert main(["subsample", path, "--radii", "0.2,0.4,0.6", "--n-sub", "8",
                 "--seed", "1", "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"ranks.csv", "diagram.csv", "diagram_radius.csv",
                                               "metadata.json"}
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["subsample_size"] == 8 and meta["seed"] == 1
    rows = (out / "diagram_radius.csv").read_text().splitlines()
    assert rows[0] == "birth,death,multiplicity"
    assert all(math.isfinite(float(r.split(",")[0])) for r in rows[1:])


def test_subsample_bad_radii(write):
    path = write("c.csv", sample_circle(10, 0).to_csv())
    assert main(["subsample", path, "--radii", "0.4,0.2"]) == 2


def test_console_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "dagph.cli", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0
    for cmd in ("rank", "subgraph", "subsample", "compare"):
        assert cmd in res.stdout
