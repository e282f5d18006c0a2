"""Pictures of the d = 3 gasket: subdivision triangles, sampled point clouds, box counting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .core import Simplex, Word, nu, right_multiply_generator, simplex_from_matrix, word_matrix
from .enumeration import DEFAULT_BUDGET, BudgetExceededError

SQRT3_2 = math.sqrt(3) / 2
DEFAULT_RASTER = 2048
DEFAULT_SUPERSAMPLE = 2


class UnsupportedDimensionError(ValueError):
    pass


class EstimationError(ValueError):
    pass


Point2D = tuple[float, float]


@dataclass(frozen=True)
class Triangle2D:
    a: Point2D
    b: Point2D
    c: Point2D

    def signed_area(self) -> float:
        (ax, ay), (bx, by), (cx, cy) = self.a, self.b, self.c
        return 0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))

    @property
    def degenerate(self) -> bool:
        return abs(self.signed_area()) < 1e-15


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    seed: int
    iterations: int
    burn_in: int
    scheme: str
    word_len: int = 0

    def __len__(self) -> int:
        return len(self.points)


def project_bary(v: Sequence) -> Point2D:
    """Embed a point of the 2-simplex in the plane: e_1 -> (0,0), e_2 -> (1,0), e_3 -> apex."""
    if len(v) != 3:
        raise UnsupportedDimensionError(f"only d = 3 can be drawn, got {len(v)} coordinates")
    return (float(v[1]) + float(v[2]) / 2, SQRT3_2 * float(v[2]))


def project_array(v: np.ndarray) -> np.ndarray:
    return np.column_stack([v[:, 1] + v[:, 2] / 2, SQRT3_2 * v[:, 2]])


def triangle_of(s: Simplex) -> Triangle2D:
    return Triangle2D(*(project_bary(v) for v in s.vertices))


# -- subdivision ------------------------------------------------------------------


def subdivide(
    depth: int, min_volume: Union[Fraction, float, int] = 0, *, d: int = 3, budget: int = DEFAULT_BUDGET
) -> list[tuple[Word, Simplex]]:
    """Leaves of the word tree to ``depth``, pruning children with nu <= min_volume.

    A word is returned when it has full length or when every child was pruned.
    Output is in lexicographic word order.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    min_volume = Fraction(min_volume)
    if not 0 <= min_volume < 1:
        raise ValueError(f"min_volume must lie in [0, 1), got {min_volume}")
    if d**depth > budget:
        raise BudgetExceededError(f"{d}^{depth} leaves exceeds the enumeration budget {budget}")

    out: list[tuple[Word, Simplex]] = []

    def walk(w: Word, m) -> None:
        if len(w) == depth:
            out.append((w, simplex_from_matrix(m)))
            return
        kept = False
        for j in range(1, d + 1):
            child = right_multiply_generator(m, j)
            if nu(child) > min_volume:
                kept = True
                walk(w + (j,), child)
        if not kept:
            out.append((w, simplex_from_matrix(m)))

    walk((), word_matrix(d, ()))
    return out


# -- sampling ---------------------------------------------------------------------


def _apply_maps(v: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Row-wise T_j on float barycentric rows; coordinate j becomes 1, all divided by 2 - v_j."""
    rows = np.arange(len(v))
    norm = 2 - v[rows, j]
    out = v.copy()
    out[rows, j] = 1.0
    return out / norm[:, None]


def word_points(words: np.ndarray, project: bool = True) -> np.ndarray:
    """Images of the barycenter under each row word (symbols 1..3), T_{w_1} applied last."""
    words = np.asarray(words)
    v = np.full((len(words), 3), 1 / 3)
    for col in range(words.shape[1] - 1, -1, -1):
        v = _apply_maps(v, words[:, col].astype(np.intp) - 1)
    return project_array(v) if project else v


def chaos_game(
    iterations: int, burn_in: int = 0, seed: int = 0, word_len: int = 40, scheme: str = "words"
) -> PointCloud:
    """Sample the d = 3 attractor.

    ``scheme="words"`` keeps ``iterations - burn_in`` points, each the image of the
    barycenter under an independent uniform random word of length ``word_len``.
    ``scheme="orbit"`` follows one forward orbit v <- T_j(v) and records it after
    ``burn_in`` steps; it lingers near the parabolic vertices.
    """
    if not iterations > burn_in >= 0:
        raise ValueError("need iterations > burn_in >= 0")
    rng = np.random.default_rng(seed)
    n = iterations - burn_in
    if scheme == "words":
        if word_len < 1:
            raise ValueError("word_len must be >= 1")
        v = word_points(rng.integers(1, 4, size=(n, word_len), dtype=np.int8), project=False)
    elif scheme == "orbit":
        choices = rng.integers(0, 3, iterations).tolist()
        x = [1 / 3, 1 / 3, 1 / 3]
        kept = np.empty((n, 3))
        for i, j in enumerate(choices):
            norm = 2 - x[j]
            x = [c / norm for c in x]
            x[j] = 1 / norm
            if i >= burn_in:
                kept[i - burn_in] = x
        v = kept
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return PointCloud(project_array(v), seed, iterations, burn_in, scheme, word_len if scheme == "words" else 0)


def box_counts(points: np.ndarray, k_values: Iterable[int]) -> list[int]:
    counts = []
    for k in k_values:
        scale = 2**k
        ij = np.clip(np.floor(points * scale).astype(np.int64), 0, scale)
        counts.append(int(np.unique(ij[:, 0] * (scale + 1) + ij[:, 1]).size))
    return counts


def box_count(cloud: Union[PointCloud, np.ndarray], k_min: int, k_max: int) -> float:
    """Least-squares slope of log2(occupied boxes of side 2^-k) against k."""
    if not 2 <= k_min < k_max <= 14:
        raise ValueError("need 2 <= k_min < k_max <= 14")
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0 or not np.all(np.isfinite(pts)):
        raise EstimationError("box counting needs a non-empty finite (N, 2) point array")
    ks = np.arange(k_min, k_max + 1)
    counts = np.log2(box_counts(pts, ks))
    slope, _ = np.polyfit(ks.astype(float), counts, 1)
    return float(slope)


# -- output -------------------------------------------------------------------------


@dataclass(frozen=True)
class Style:
    size: int = 1024
    fill: str = "#1f2a44"
    stroke: str = "none"
    stroke_width: float = 0.0
    background: str = "#ffffff"
    point_radius: float = 0.5
    margin: int = 8


def _to_px(p: Point2D, style: Style) -> tuple[float, float]:
    span = style.size - 2 * style.margin
    return style.margin + p[0] * span, style.margin + (SQRT3_2 - p[1]) * span


def _height(style: Style) -> int:
    return int(math.ceil(SQRT3_2 * (style.size - 2 * style.margin))) + 2 * style.margin


def svg_document(items: Union[Sequence[Triangle2D], PointCloud], style: Style = Style()) -> str:
    """SVG 1.1 text: one filled path per triangle, or one circle per point."""
    w, h = style.size, _height(style)
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="{style.background}"/>',
    ]
    if isinstance(items, PointCloud):
        lines.append(f'<g fill="{style.fill}" stroke="none">')
        for x, y in items.points:
            px, py = _to_px((float(x), float(y)), style)
            lines.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="{style.point_radius:g}"/>')
    else:
        lines.append(f'<g fill="{style.fill}" stroke="{style.stroke}" stroke-width="{style.stroke_width:g}">')
        for t in items:
            (ax, ay), (bx, by), (cx, cy) = (_to_px(p, style) for p in (t.a, t.b, t.c))
            lines.append(f'<path d="M{ax:.4f},{ay:.4f} L{bx:.4f},{by:.4f} L{cx:.4f},{cy:.4f} Z"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def write_svg(items: Union[Sequence[Triangle2D], PointCloud], path, style: Style = Style()) -> None:
    Path(path).write_text(svg_document(items, style), encoding="utf-8")


def _hex_rgb(color: str) -> np.ndarray:
    color = color.lstrip("#")
    return np.array([int(color[i : i + 2], 16) for i in (0, 2, 4)], dtype=np.float64)


def rasterize(
    triangles: Sequence[Triangle2D],
    size: int = DEFAULT_RASTER,
    supersample: int = DEFAULT_SUPERSAMPLE,
    style: Style = Style(),
) -> np.ndarray:
    """RGB uint8 image; coverage is the fraction of supersampled pixel centres inside a triangle."""
    style = Style(**{**style.__dict__, "size": size * supersample, "margin": style.margin * supersample})
    w, h = style.size, _height(style)
    mask = np.zeros((h, w), dtype=bool)
    for t in triangles:
        pts = np.array([_to_px(p, style) for p in (t.a, t.b, t.c)])
        x0, y0 = np.floor(pts.min(axis=0)).astype(int)
        x1, y1 = np.ceil(pts.max(axis=0)).astype(int)
        x0, y0 = max(x0, 0), max(y0, 0)
        x1, y1 = min(x1, w - 1), min(y1, h - 1)
        if x1 < x0 or y1 < y0:
            continue
        xs = np.arange(x0, x1 + 1) + 0.5
        ys = np.arange(y0, y1 + 1) + 0.5
        X, Y = np.meshgrid(xs, ys)
        inside = np.ones_like(X, dtype=bool)
        area = (pts[1, 0] - pts[0, 0]) * (pts[2, 1] - pts[0, 1]) - (pts[2, 0] - pts[0, 0]) * (pts[1, 1] - pts[0, 1])
        sign = 1.0 if area >= 0 else -1.0
        for i in range(3):
            (px, py), (qx, qy) = pts[i], pts[(i + 1) % 3]
            inside &= sign * ((qx - px) * (Y - py) - (qy - py) * (X - px)) >= 0
        mask[y0 : y1 + 1, x0 : x1 + 1] |= inside
    hh, ww = h // supersample, w // supersample
    cov = mask[: hh * supersample, : ww * supersample].reshape(hh, supersample, ww, supersample).mean(axis=(1, 3))
    bg, fg = _hex_rgb(style.background), _hex_rgb(style.fill)
    rgb = bg[None, None, :] * (1 - cov[..., None]) + fg[None, None, :] * cov[..., None]
    return np.rint(rgb).astype(np.uint8)


def write_ppm(raster: np.ndarray, path) -> None:
    """Binary PPM (P6, maxval 255)."""
    raster = np.ascontiguousarray(raster, dtype=np.uint8)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise ValueError("raster must have shape (height, width, 3)")
    h, w, _ = raster.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(raster.tobytes())
