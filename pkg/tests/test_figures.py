"""The SVG files under figures/ are checked structurally and for reproducibility."""

import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from tmiet.cli import run
from tmiet.iet import build_part_L

from conftest import tm_table

FIGURES = Path(__file__).resolve().parent.parent / "figures"
SVG = "{http://www.w3.org/2000/svg}"


def lines(path, group="segments"):
    root = ET.parse(path).getroot()
    g = root.find(f"{SVG}g[@class='{group}']")
    return [] if g is None else g.findall(f"{SVG}line")


@pytest.mark.parametrize("name,m,n", [("tm3_part300.svg", 3, 300), ("tm4_part300.svg", 4, 300),
                                      ("tm8_part200.svg", 8, 200)])
def test_measured_maps_have_one_segment_per_selected_cylinder(name, m, n):
    plan = build_part_L(tm_table(m, n + 2), None, n)
    assert len(lines(FIGURES / name)) == len(plan.selected)


@pytest.mark.parametrize("name,m", [("tm15_tn50.svg", 15), ("tm30_tn50.svg", 30)])
def test_equal_length_maps_have_p_of_n_segments(name, m):
    assert len(lines(FIGURES / name)) == tm_table(m, 50).complexity(50)


def test_marked_points_and_classical_map():
    assert len(lines(FIGURES / "tm3_points.svg", "marks")) == 6
    assert len(lines(FIGURES / "vnk2.svg")) == 20


@pytest.mark.parametrize("argv,name", [
    (["iet", "build", "--thue-morse", "3", "--mode", "part", "--len", "300", "--format", "svg"],
     "tm3_part300.svg"),
    (["iet", "build", "--thue-morse", "15", "--mode", "tn", "--len", "50", "--format", "svg"],
     "tm15_tn50.svg"),
    (["iet", "vnk", "--base", "2", "--levels", "20", "--format", "svg"], "vnk2.svg"),
])
def test_figures_are_reproduced_byte_for_byte(argv, name, tmp_path):
    out = tmp_path / name
    assert run(argv + ["--out", str(out)]) == 0
    assert out.read_bytes() == (FIGURES / name).read_bytes()
