from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.models.matrices import GMatrix


def _readonly(array, shape_hint: Optional[int] = None) -> np.ndarray:
    array = np.array(array, dtype=float)
    if shape_hint is not None and array.ndim == 1:
        array = array.reshape(shape_hint, -1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class NullspaceRep:
    """
    Nullspace representation: `u` is the d x n array whose columns are the
    node vectors u_i. `source` is the matrix whose kernel the rows span.
    """

    u: np.ndarray
    source: GMatrix
    tol: float

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u, shape_hint=1))

    @property
    def dim(self) -> int:
        return int(self.u.shape[0])

    @property
    def n(self) -> int:
        return int(self.u.shape[1])

    @property
    def points(self) -> np.ndarray:
        """n x d array, one row per node."""
        return self.u.T

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.u, axis=0)

    def __repr__(self):
        return f"<NullspaceRep dim={self.dim} n={self.n}>"


@dataclass(frozen=True, eq=False)
class LineRep:
    """
    Node values on the line together with their cells.

    `levels` are the distinct values in increasing order, `level_of[i]` the
    index of node i's value, `cells[k] = (levels[k], levels[k+1])` and
    `coverage[k]` the number of edges whose endpoint interval contains
    cell k.
    """

    u: np.ndarray
    levels: tuple[float, ...]
    level_of: tuple[int, ...]
    cells: tuple[tuple[float, float], ...]
    coverage: tuple[int, ...]
    covering: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u))

    @property
    def distinct(self) -> bool:
        return len(self.levels) == len(self.u)

    def zero_nodes(self) -> list[int]:
        return [i for i, value in enumerate(self.u) if value == 0.0]

    def doubly_covered(self) -> list[int]:
        return [k for k, count in enumerate(self.coverage) if count >= 2]

    def __repr__(self):
        return f"<LineRep n={len(self.u)} cells={len(self.cells)}>"


@dataclass(frozen=True, eq=False)
class PlaneRep:
    """Points u_i in the plane (n x 2) and the current origin p."""

    points: np.ndarray
    origin: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "points", _readonly(self.points).reshape(-1, 2))
        object.__setattr__(self, "origin", _readonly(self.origin).reshape(2))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def shifted(self) -> np.ndarray:
        """n x 2 array of u_i - p."""
        return self.points - self.origin

    def at(self, origin) -> "PlaneRep":
        return PlaneRep(points=self.points, origin=np.asarray(origin, dtype=float))

    def __repr__(self):
        return f"<PlaneRep n={self.n} origin=({self.origin[0]:.3g}, {self.origin[1]:.3g})>"
