import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class AreaMatrix:
    """Skew-symmetric matrix of signed areas T_ij = det(u_i - p, u_j - p)."""

    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    def __getitem__(self, key: tuple[int, int]) -> float:
        return float(self.t[key])


@dataclass(frozen=True)
class EdgeSplit:
    """
    Partition of the edges into arcs and degenerate edges.

    `arcs` holds ordered pairs (i, j) with T_ij > 0, `degenerate` holds
    sorted pairs (i, j), i < j, with T_ij = 0. Both are in edge order.
    """

    arcs: tuple[tuple[int, int], ...]
    degenerate: tuple[tuple[int, int], ...]

    def arc_of(self, i: int, j: int):
        if (i, j) in self.arcs:
            return (i, j)
        if (j, i) in self.arcs:
            return (j, i)
        return None


@dataclass(frozen=True, eq=False)
class Circulation:
    """Flow values on arcs, extended skew-symmetrically."""

    arcs: tuple[tuple[int, int], ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {arc: float(v) for arc, v in zip(self.arcs, self.values)}

    def value(self, i: int, j: int) -> float:
        flows = self.as_dict()
        if (i, j) in flows:
            return flows[(i, j)]
        if (j, i) in flows:
            return -flows[(j, i)]
        return 0.0

    def imbalance(self, n: int) -> np.ndarray:
        """Net outflow at every node."""
        net = np.zeros(n)
        for (i, j), v in zip(self.arcs, self.values):
            net[i] += v
            net[j] -= v
        return net

    def is_positive(self) -> bool:
        return bool(np.all(self.values > 0))


class CellDimension(int, enum.Enum):
    VERTEX = 0
    EDGE = 1
    FACE = 2


@dataclass(frozen=True, eq=False)
class ArrangementLine:
    """
    Line n . x = c through the points of the edges in `edges`.

    `anchor` is the edge whose two points define the exact side test;
    `orientation[k]` is +1 when edges[k] runs along the anchor and -1
    otherwise, so that sign T(u - p) on that edge is orientation times the
    side of p.
    """

    normal: np.ndarray
    offset: float
    anchor: tuple[int, int]
    edges: tuple[tuple[int, int], ...]
    orientation: tuple[int, ...]

    def distance(self, point) -> float:
        return float(self.normal @ np.asarray(point, dtype=float) - self.offset)


@dataclass(frozen=True, eq=False)
class Cell:
    """
    A cell of the line arrangement.

    `signs[k]` is the side of line k (+1, -1, or 0 when the cell lies on
    it). `point` is an interior point used for sampling.
    """

    index: int
    dim: CellDimension
    signs: tuple[int, ...]
    point: np.ndarray
    signature: EdgeSplit

    def __repr__(self):
        return f"<Cell {self.index} dim={int(self.dim)} point=({self.point[0]:.4g}, {self.point[1]:.4g})>"


@dataclass(frozen=True, eq=False)
class CellComplex:
    """
    Line arrangement over the edge-joined point pairs with cell incidence.

    `coincident` holds the edges whose endpoints share a point; they are
    degenerate in every cell.
    """

    points: np.ndarray
    coincident: tuple[tuple[int, int], ...]
    lines: tuple[ArrangementLine, ...]
    cells: tuple[Cell, ...]
    incidence: dict[int, frozenset[int]] = field(repr=False)

    def of_dim(self, dim: CellDimension) -> list[Cell]:
        return [cell for cell in self.cells if cell.dim == dim]

    @property
    def faces(self) -> list[Cell]:
        return self.of_dim(CellDimension.FACE)

    @property
    def segments(self) -> list[Cell]:
        return self.of_dim(CellDimension.EDGE)

    @property
    def vertices(self) -> list[Cell]:
        return self.of_dim(CellDimension.VERTEX)

    def incident(self, index: int) -> frozenset[int]:
        return self.incidence.get(index, frozenset())

    def in_closure(self, inner: int, outer: int) -> bool:
        """True when cell `inner` lies in the closure of cell `outer`."""
        a, b = self.cells[inner].signs, self.cells[outer].signs
        return all(x == 0 or x == y for x, y in zip(a, b))

    def locate(self, signs: tuple[int, ...]):
        for cell in self.cells:
            if cell.signs == signs:
                return cell
        return None


@dataclass(frozen=True)
class OuterplanarCheck:
    """
    Outcome of the geometric outerplanarity test.

    `claim` names the first violated condition ("coincident", "hull" or
    "crossing") and `witnesses` the offending nodes or edges, 1-based.
    """

    ok: bool
    claim: Optional[str] = None
    witnesses: tuple = ()

    def __bool__(self) -> bool:
        return self.ok
