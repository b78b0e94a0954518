import csv
import io
import json

import numpy as np
import pytest

from bench.commands import read_points
from bench.report import load_report
import main as cli
from main import main
from mesh.loaders import load_mesh
from utils.errors import MeshFormatError


@pytest.fixture
def mesh_file(tmp_path):
    path = tmp_path / "square.txt"
    assert main(["gen-mesh", "--dim", "2", "--n", "10", "--out", str(path)]) == 0
    return path


def test_gen_mesh(mesh_file, tmp_path):
    assert load_mesh(mesh_file).n_elements == 200
    cube = tmp_path / "cube.msh"
    main(["gen-mesh", "--dim", "3", "--n", "2", "--out", str(cube)])
    assert load_mesh(cube).n_elements == 48


def test_locate_centroids(mesh_file, tmp_path):
    mesh = load_mesh(mesh_file)
    points = tmp_path / "points.txt"
    lines = ["# centroids then one outside point"]
    lines += [" ".join(repr(float(x)) for x in mesh.centroid(k)) for k in range(mesh.n_elements)]
    lines.append("2.5 0.5")
    points.write_text("\n".join(lines) + "\n")
    out = tmp_path / "ids.txt"

    main(["locate", "--mesh", str(mesh_file), "--points", str(points), "--out", str(out)])
    ids = [int(x) for x in out.read_text().split()]
    assert ids == list(range(mesh.n_elements)) + [-1]


def test_locate_to_stdout(mesh_file, tmp_path, capsys):
    points = tmp_path / "points.txt"
    points.write_text("0.98 0.01\n-1 -1\n")
    main(["locate", "--mesh", str(mesh_file), "--points", str(points), "--workers", "2"])
    assert capsys.readouterr().out.split() == ["18", "-1"]


def test_build_writes_stats(mesh_file, tmp_path):
    stats = tmp_path / "stats.json"
    dump = tmp_path / "cells.txt"
    main(["build", "--mesh", str(mesh_file), "--out", str(stats), "--dump", str(dump), "--w-star-margin", "0.001"])
    data = json.loads(stats.read_text())
    assert data["n_elements"] == 200
    assert data["dim"] == 2
    assert dump.read_text().startswith("cell active phi psi host")


def test_build_rejects_both_w_star_flags(mesh_file):
    with pytest.raises(SystemExit):
        main(["build", "--mesh", str(mesh_file), "--w-star", "0.01", "--w-star-margin", "0.001"])


def test_bench_csv(tmp_path):
    out = tmp_path / "report.csv"
    main(["bench", "--n", "6", "--particles", "50", "--steps", "2", "--delta", "0.5,1",
          "--method", "patch,walk", "--format", "csv", "--out", str(out)])
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [(r["method"], float(r["delta"])) for r in rows] == [
        ("patch", 0.5), ("walk", 0.5), ("patch", 1.0), ("walk", 1.0)]
    assert all(r["n_e"] == "72" for r in rows)


def test_bench_yaml_config(tmp_path, capsys):
    config = tmp_path / "bench.yaml"
    config.write_text("particles: 30\nsteps: 1\nn: 6\nmethod: auxgrid\ndelta: 0.5\ncheck_fraction: 1.0\n")
    main(["bench", "--config", str(config), "--seed", "7", "--format", "json"])
    report = load_report(capsys.readouterr().out.encode())
    assert report.seed == 7
    assert report.methods == ["auxgrid"]
    assert report.deltas == [0.5]
    assert report.runs[0].checks_passed == 30


def test_bench_save_uses_output_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "OUTPUT_DIR", tmp_path / "output")
    cli.main(["bench", "--n", "4", "--particles", "10", "--steps", "1", "--delta", "1",
              "--method", "patch", "--seed", "3", "--format", "csv", "--save"])
    saved = tmp_path / "output" / "bench_dim2_ne32_seed3.csv"
    assert saved.read_text().startswith("method,delta,")


def test_bench_missing_config(tmp_path):
    with pytest.raises(FileNotFoundError):
        main(["bench", "--config", str(tmp_path / "missing.yaml")])


def test_read_points_errors(tmp_path):
    path = tmp_path / "points.txt"
    path.write_text("0.1 0.2\n0.3\n")
    with pytest.raises(MeshFormatError) as info:
        read_points(path, 2)
    assert info.value.line_number == 2
    path.write_text("0.1 abc\n")
    with pytest.raises(MeshFormatError):
        read_points(path, 2)
    path.write_text("")
    assert read_points(path, 3).shape == (0, 3)
    path.write_text("1 2 3\n")
    assert np.array_equal(read_points(path, 3), [[1.0, 2.0, 3.0]])
