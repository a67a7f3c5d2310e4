"""Vietoris-Rips complexes over point clouds and distance-based cell probabilities."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complex import RandomComplex, SimplicialComplex
from .errors import ComplexFormatError

FAMILIES = ("root", "power", "quadratic")
SCALES = ("max", "min", "mean")


class PointCloud:
    """Points in R^d, one row per point; point i is vertex i."""

    def __init__(self, points, dim: int | None = None):
        arr = np.asarray(points, dtype=np.float64)
        if arr.size == 0:
            arr = arr.reshape(0, dim or 0)
        if arr.ndim != 2:
            raise ValueError("points must form a 2-d array (one row per point)")
        if len(arr) and arr.shape[1] < 1:
            raise ValueError("points need at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point coordinates must be finite")
        self.points = arr

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)

    def distances(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.sqrt((diff ** 2).sum(axis=-1))


def load_points(text: str) -> PointCloud:
    """Parse comma-separated rows of floats; blank lines are ignored."""
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not f.strip() for f in row):
            continue
        try:
            values = [float(f) for f in row]
        except ValueError:
            raise ComplexFormatError(f"non-numeric field in {row!r}", lineno) from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ComplexFormatError(f"expected {width} coordinates, got {len(values)}", lineno)
        if not all(np.isfinite(values)):
            raise ComplexFormatError("coordinates must be finite", lineno)
        rows.append(values)
    return PointCloud(rows, dim=width)


def vr_complex(pc: PointCloud, radius: float, max_dim: int) -> SimplicialComplex:
    """Every (k+1)-subset with all pairwise distances <= radius, k <= max_dim."""
    if radius < 0 or max_dim < 0:
        raise ValueError("radius and max_dim must be non-negative")
    n = len(pc)
    dist = pc.distances() if n else np.zeros((0, 0))
    near = [set(np.flatnonzero(dist[i] <= radius).tolist()) - {i} for i in range(n)]
    cells = [(i,) for i in range(n)]
    frontier = cells
    for _ in range(max_dim):
        nxt = []
        for c in frontier:
            common = set.intersection(*(near[v] for v in c))
            nxt.extend(c + (w,) for w in sorted(common) if w > c[-1])
        cells.extend(nxt)
        frontier = nxt
    return SimplicialComplex(cells, check=False)


@dataclass(frozen=True)
class ProbModel:
    """p = 1 - (r_d / r_m)^e with e = 1/k (root), k (power) or 2 (quadratic)."""

    family: str = "root"
    k: int = 2
    scale: str = "max"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be a positive integer")

    @property
    def exponent(self) -> float:
        return {"root": 1.0 / self.k, "power": float(self.k), "quadratic": 2.0}[self.family]

    def probability(self, r_d: float, r_m: float) -> float:
        p = 1.0 - (r_d / r_m) ** self.exponent
        return min(1.0, max(0.0, p))


def _cell_radii(cell, pc: PointCloud, scale: str):
    pts = pc.points[list(cell)]
    centroid = pts.mean(axis=0)
    r_d = float(np.sqrt(((pc.points - centroid) ** 2).sum(axis=1)).min())
    spokes = np.sqrt(((pts - centroid) ** 2).sum(axis=1))
    r_m = float({"max": spokes.max, "min": spokes.min, "mean": spokes.mean}[scale]())
    return r_d, r_m


def assign_probabilities(X: SimplicialComplex, pc: PointCloud, model: ProbModel = ProbModel()) -> RandomComplex:
    """Vertices get 1; higher cells compare the centroid's nearest data point with the cell's size."""
    table = {}
    for c in X.sorted_cells:
        if max(c) >= len(pc):
            raise ValueError(f"vertex {max(c)} has no point in the cloud")
        if len(c) == 1:
            table[c] = Fraction(1)
            continue
        r_d, r_m = _cell_radii(c, pc, model.scale)
        if r_m == 0:
            warnings.warn(f"cell {c} has coincident vertices (r_m = 0); probability set to 0", stacklevel=2)
            table[c] = Fraction(0)
        else:
            table[c] = Fraction(model.probability(r_d, r_m))
    return RandomComplex(table)

