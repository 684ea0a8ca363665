"""Tests for output rendering and the worker pool."""
import json

import numpy as np
import pytest

from fblab.schemas import TableDocument
from fblab.utils.helpers import CSV_HEADER, make_rng, parallel_map, render_csv, render_json, uniform_grid, write_output


def test_uniform_grid_is_midpoint():
    assert uniform_grid(4) == pytest.approx([0.125, 0.375, 0.625, 0.875])
    assert uniform_grid(2, margin=0.1) == pytest.approx([0.3, 0.7])


def test_seeded_generators_agree():
    assert make_rng(7).standard_normal(3).tolist() == make_rng(7).standard_normal(3).tolist()


@pytest.mark.parametrize("threads", [1, 4])
def test_parallel_map_preserves_order(threads):
    assert parallel_map(lambda v: v * v, range(10), threads=threads) == [v * v for v in range(10)]


def test_render_csv_round_trips_floats():
    text = render_csv(["x", "value"], [(0.1, np.float64(1.0 / 3.0)), (2, "a")])
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "x,value"
    assert float(lines[2].split(",")[1]) == 1.0 / 3.0
    assert lines[3] == "2,a"


def test_render_json_is_sorted():
    document = TableDocument(kind="k", setting="essential", parameters=[0.0], columns=["x"], rows=[[0.5]])
    data = json.loads(render_json(document))
    assert list(data) == sorted(data)
    assert data["rows"] == [[0.5]]


def test_write_output(tmp_path, capsys):
    target = tmp_path / "nested" / "out.json"
    write_output("{}", str(target))
    assert target.read_text(encoding="utf-8") == "{}\n"
    write_output("hello", None)
    assert capsys.readouterr().out == "hello\n"
