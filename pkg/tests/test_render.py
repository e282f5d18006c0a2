import math
import re
from fractions import Fraction as F

import numpy as np
import pytest

from rauzy.core import apply_word, barycenter, nu, word_matrix
from rauzy.enumeration import BudgetExceededError, x_sum
from rauzy.render import (
    EstimationError,
    PointCloud,
    Style,
    Triangle2D,
    UnsupportedDimensionError,
    box_count,
    chaos_game,
    project_bary,
    rasterize,
    subdivide,
    svg_document,
    triangle_of,
    word_points,
    write_ppm,
    write_svg,
)


def test_projection_examples():
    assert project_bary((1, 0, 0)) == (0.0, 0.0)
    assert project_bary((0, 1, 0)) == (1.0, 0.0)
    x, y = project_bary(barycenter(3))
    assert x == pytest.approx(0.5) and y == pytest.approx(math.sqrt(3) / 6)
    with pytest.raises(UnsupportedDimensionError):
        project_bary((F(1, 4),) * 4)


def test_subdivide_depth1():
    leaves = subdivide(1)
    assert [w for w, _ in leaves] == [(1,), (2,), (3,)]
    assert all(nu(word_matrix(3, w)) == F(1, 4) for w, _ in leaves)


def test_subdivide_depth2():
    leaves = subdivide(2)
    assert len(leaves) == 9
    assert {nu(word_matrix(3, w)) for w, _ in leaves} == {F(1, 9), F(1, 24)}
    pruned = subdivide(2, F(1, 20))
    assert [w for w, _ in pruned] == [(1, 1), (2, 2), (3, 3)]


def test_subdivide_leaf_volumes_sum_to_x_n():
    for n in (3, 5):
        leaves = subdivide(n)
        assert sum((nu(word_matrix(3, w)) for w, _ in leaves), F(0)) == x_sum(3, n)


def test_subdivide_validation():
    with pytest.raises(ValueError):
        subdivide(0)
    with pytest.raises(ValueError):
        subdivide(2, 1)
    with pytest.raises(BudgetExceededError):
        subdivide(6, budget=100)


def test_word_points_exact_agreement():
    got = word_points(np.array([[1, 2]]))[0]
    expected = project_bary(apply_word(3, (1, 2), barycenter(3)))
    assert got == pytest.approx(expected, abs=1e-15)


def test_chaos_game_deterministic_and_inside():
    a = chaos_game(5000, 0, seed=3, word_len=10)
    b = chaos_game(5000, 0, seed=3, word_len=10)
    assert np.array_equal(a.points, b.points)
    assert len(a) == 5000
    x, y = a.points[:, 0], a.points[:, 1]
    eps = 1e-9
    assert (y >= -eps).all() and (y <= math.sqrt(3) * x + eps).all() and (y <= math.sqrt(3) * (1 - x) + eps).all()


def test_chaos_game_outside_central_hole():
    # After one map a point lies in some T_j(simplex), i.e. some coordinate >= 1/2.
    pts = chaos_game(2000, 0, seed=1, word_len=1).points
    v3 = pts[:, 1] / (math.sqrt(3) / 2)
    v2 = pts[:, 0] - v3 / 2
    v1 = 1 - v2 - v3
    assert (np.max(np.column_stack([v1, v2, v3]), axis=1) >= 0.5 - 1e-12).all()


def test_orbit_scheme():
    c = chaos_game(3000, 100, seed=2, scheme="orbit")
    assert len(c) == 2900 and c.scheme == "orbit"
    with pytest.raises(ValueError):
        chaos_game(10, 10)


def test_box_count_controls():
    m = 2000
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1))
    keep = i + j <= m
    v2, v3 = i[keep] / m, j[keep] / m
    plane = np.column_stack([v2 + v3 / 2, math.sqrt(3) / 2 * v3])
    # coarse scales are dominated by boundary boxes, so fit over k = 5..9
    assert box_count(plane, 5, 9) == pytest.approx(2.0, abs=0.05)
    assert box_count(np.array([[0.3, 0.2]]), 2, 8) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(EstimationError):
        box_count(np.empty((0, 2)), 2, 8)
    with pytest.raises(ValueError):
        box_count(plane, 5, 5)


def test_svg_depth1_has_three_paths(tmp_path):
    tris = [triangle_of(s) for _, s in subdivide(1)]
    path = tmp_path / "g.svg"
    write_svg(tris, path)
    text = path.read_text()
    assert len(re.findall(r"<path ", text)) == 3
    assert 'version="1.1"' in text


def test_svg_empty_and_points():
    empty = svg_document([])
    assert "<path" not in empty and empty.rstrip().endswith("</svg>")
    cloud = PointCloud(np.array([[0.5, 0.2]]), 0, 1, 0, "words")
    assert svg_document(cloud).count("<circle") == 1


def test_svg_is_byte_stable():
    tris = [triangle_of(s) for _, s in subdivide(4)]
    assert svg_document(tris) == svg_document([triangle_of(s) for _, s in subdivide(4)])


def test_ppm_format(tmp_path):
    tris = [triangle_of(s) for _, s in subdivide(2)]
    raster = rasterize(tris, size=64, supersample=2)
    path = tmp_path / "g.ppm"
    write_ppm(raster, path)
    data = path.read_bytes()
    h, w, _ = raster.shape
    header = f"P6\n{w} {h}\n255\n".encode()
    assert data.startswith(header) and len(data) == len(header) + w * h * 3
    # filled pixels exist, and the central hole stays background
    assert (raster != 255).any() and (raster == 255).any()


def test_triangle_area():
    t = Triangle2D((0, 0), (1, 0), (0, 1))
    assert t.signed_area() == 0.5 and not t.degenerate


def test_style_defaults():
    assert Style().background == "#ffffff"
