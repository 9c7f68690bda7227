"""Triangular-lattice geometry realized as flat-top hexagonal cells.

Cells are identified by axial integer coordinates (q, r).  All geometry is
derived from the embedding

    center(q, r) = mesh * (3*q/2, sqrt(3) * (r + q/2))

so neighboring cell centers sit at distance mesh*sqrt(3) and the hexagon
circumradius (center to corner) equals the mesh.

To keep every geometric predicate exact we work in "doubled" integer
coordinates: one x unit is mesh/2 and one y unit is mesh*sqrt(3)/2.  In these
units center(q, r) = (3q, q + 2r) and all cell corners are integer points.

A corner of the tiling is shared by three hexagons.  Each hexagon owns its
east corner (side 0) and west corner (side 1); every (hex, corner) pair
canonicalizes onto one of those, so vertices compare equal exactly when they
coincide physically.  Vertices are tuples (q, r, side).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

Cell = Tuple[int, int]
Vertex = Tuple[int, int, int]          # (q, r, side); side 0 = east, 1 = west
Edge = Tuple[Vertex, Vertex]           # undirected, stored sorted

BLUE = 0
YELLOW = 1

COLOR_NAMES = {BLUE: "B", YELLOW: "Y"}
COLOR_FROM_NAME = {"B": BLUE, "Y": YELLOW}

# Axial neighbor offsets in counterclockwise order, starting from the
# neighbor across the edge whose midpoint sits at +30 degrees.
NEIGHBOR_OFFSETS: Tuple[Cell, ...] = (
    (1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1),
)


class DegenerateRegionError(ValueError):
    """The mesh is too coarse for any hexagon to fit in the requested disc."""


def flip_color(color: int) -> int:
    return 1 - color


def hex_neighbors(cell: Cell) -> List[Cell]:
    """The six axial neighbors of a cell, in a fixed counterclockwise order."""
    q, r = cell
    return [(q + dq, r + dr) for dq, dr in NEIGHBOR_OFFSETS]


def rotate60(cell: Cell) -> Cell:
    """Rotate a cell by 60 degrees counterclockwise about the origin."""
    q, r = cell
    return (-r, q + r)


def cell_center_units(cell: Cell) -> Tuple[int, int]:
    """Cell center in doubled integer units (x: mesh/2, y: mesh*sqrt(3)/2)."""
    q, r = cell
    return (3 * q, q + 2 * r)


def cell_center(cell: Cell, mesh: float) -> Tuple[float, float]:
    x, y = cell_center_units(cell)
    return (x * mesh / 2.0, y * mesh * (3.0 ** 0.5) / 2.0)


# Corner offsets (doubled units) for corners at 0, 60, ..., 300 degrees.
_CORNER_OFFSETS = ((2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1))

# (hex, corner k) -> canonical vertex (dq, dr, side)
_CORNER_CANONICAL = (
    (0, 0, 0),    # corner 0 = east vertex of this cell
    (1, 0, 1),    # corner 1 = west vertex of (q+1, r)
    (-1, 1, 0),   # corner 2 = east vertex of (q-1, r+1)
    (0, 0, 1),    # corner 3 = west vertex of this cell
    (-1, 0, 0),   # corner 4 = east vertex of (q-1, r)
    (1, -1, 1),   # corner 5 = west vertex of (q+1, r-1)
)


def hex_corner_vertex(cell: Cell, corner: int) -> Vertex:
    """Canonical vertex id for corner k (k in 0..5, angle 60k degrees)."""
    q, r = cell
    dq, dr, side = _CORNER_CANONICAL[corner % 6]
    return (q + dq, r + dr, side)


def vertex_units(v: Vertex) -> Tuple[int, int]:
    """Vertex position in doubled integer units."""
    q, r, side = v
    if side == 0:
        return (3 * q + 2, q + 2 * r)
    return (3 * q - 2, q + 2 * r)


def vertex_position(v: Vertex, mesh: float) -> Tuple[float, float]:
    x, y = vertex_units(v)
    return (x * mesh / 2.0, y * mesh * (3.0 ** 0.5) / 2.0)


def vertex_cells(v: Vertex) -> Tuple[Cell, Cell, Cell]:
    """The three hexagons meeting at a vertex."""
    q, r, side = v
    if side == 0:
        return ((q, r), (q + 1, r), (q + 1, r - 1))
    return ((q, r), (q - 1, r), (q - 1, r + 1))


def vertex_neighbors(v: Vertex) -> Tuple[Vertex, Vertex, Vertex]:
    """The three vertices joined to v by a lattice edge."""
    q, r, side = v
    if side == 0:
        return ((q + 1, r, 1), (q + 1, r - 1, 1), (q + 2, r - 1, 1))
    return ((q - 1, r, 0), (q - 1, r + 1, 0), (q - 2, r + 1, 0))


def edge_key(u: Vertex, v: Vertex) -> Edge:
    return (u, v) if u <= v else (v, u)


def edge_cells(u: Vertex, v: Vertex) -> Tuple[Cell, Cell]:
    """The two hexagons separated by the edge (u, v)."""
    if u[2] == v[2]:
        raise ValueError(f"not a lattice edge: {u}-{v}")
    e, w = (u, v) if u[2] == 0 else (v, u)
    qe, re, _ = e
    qw, rw, _ = w
    if (qw, rw) == (qe + 1, re):
        return ((qe, re), (qe + 1, re))
    if (qw, rw) == (qe + 1, re - 1):
        return ((qe, re), (qe + 1, re - 1))
    if (qw, rw) == (qe + 2, re - 1):
        return ((qe + 1, re), (qe + 1, re - 1))
    raise ValueError(f"not a lattice edge: {u}-{v}")


def directed_side_cells(u: Vertex, v: Vertex) -> Tuple[Cell, Cell]:
    """(left cell, right cell) of the directed edge u -> v.

    Sign conventions follow the embedding; the anisotropic unit scaling
    preserves orientation, so integer cross products are exact.
    """
    c1, c2 = edge_cells(u, v)
    ux, uy = vertex_units(u)
    vx, vy = vertex_units(v)
    dx, dy = vx - ux, vy - uy
    cx, cy = cell_center_units(c1)
    # offset of c1's center from the edge midpoint, doubled to stay integral
    ox, oy = 2 * cx - (ux + vx), 2 * cy - (uy + vy)
    cross = dx * oy - dy * ox
    if cross > 0:
        return (c1, c2)
    return (c2, c1)


def third_cell(v: Vertex, c1: Cell, c2: Cell) -> Cell:
    """The cell at v that is neither c1 nor c2."""
    for c in vertex_cells(v):
        if c != c1 and c != c2:
            return c
    raise ValueError(f"{c1}, {c2} do not identify a third cell at {v}")


def cell_edges(cell: Cell) -> List[Edge]:
    """The six boundary edges of a hexagon."""
    corners = [hex_corner_vertex(cell, k) for k in range(6)]
    return [edge_key(corners[k], corners[(k + 1) % 6]) for k in range(6)]


def region_edges(cells: Iterable[Cell]) -> Set[Edge]:
    edges: Set[Edge] = set()
    for c in cells:
        edges.update(cell_edges(c))
    return edges


def region_vertices(cells: Iterable[Cell]) -> Set[Vertex]:
    verts: Set[Vertex] = set()
    for c in cells:
        for k in range(6):
            verts.add(hex_corner_vertex(c, k))
    return verts


def is_connected(cells: Set[Cell]) -> bool:
    if not cells:
        return False
    seen = set()
    stack = [next(iter(cells))]
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        for n in hex_neighbors(c):
            if n in cells and n not in seen:
                stack.append(n)
    return len(seen) == len(cells)


def is_simply_connected(cells: Set[Cell]) -> bool:
    """Connected and hole-free, via the Euler characteristic V - E + F = 1."""
    if not cells:
        return False
    if not is_connected(cells):
        return False
    v = len(region_vertices(cells))
    e = len(region_edges(cells))
    f = len(cells)
    return v - e + f == 1


def point_to_cell(x: float, y: float, mesh: float) -> Cell:
    """The hexagon containing a plane point (ties broken by rounding)."""
    # invert the center embedding, then round in cube coordinates
    qf = 2.0 * x / (3.0 * mesh)
    rf = y / (mesh * (3.0 ** 0.5)) - qf / 2.0
    q, r = round(qf), round(rf)
    s = -qf - rf
    sr = round(s)
    dq, dr, ds = abs(q - qf), abs(r - rf), abs(sr - s)
    if dq > dr and dq > ds:
        q = -r - sr
    elif dr > ds:
        r = -q - sr
    return (int(q), int(r))


def hexes_in_disc(radius: float, mesh: float) -> FrozenSet[Cell]:
    """Cells whose closed hexagon lies inside the open disc |z| < radius.

    A hexagon is the convex hull of its corners, so it suffices that all six
    corners lie strictly inside the disc.
    """
    if mesh <= 0 or radius <= 0:
        raise ValueError("radius and mesh must be positive")
    if mesh >= radius:
        raise DegenerateRegionError(
            f"mesh {mesh} too coarse for disc of radius {radius}"
        )
    # corner (x, y) in doubled units lies inside iff x^2 + 3 y^2 < (2R/mesh)^2
    bound = (2.0 * radius / mesh) ** 2
    qmax = int(2 * radius / (3 * mesh)) + 2
    cells = []
    for q in range(-qmax, qmax + 1):
        ymax = int(2 * radius / (mesh * (3 ** 0.5))) + 2
        rlo = (-ymax - q) // 2 - 1
        rhi = (ymax - q) // 2 + 1
        for r in range(rlo, rhi + 1):
            cx, cy = 3 * q, q + 2 * r
            ok = True
            for ox, oy in _CORNER_OFFSETS:
                x, y = cx + ox, cy + oy
                if x * x + 3 * y * y >= bound:
                    ok = False
                    break
            if ok:
                cells.append((q, r))
    if not cells:
        raise DegenerateRegionError(
            f"no hexagon of mesh {mesh} fits in disc of radius {radius}"
        )
    return frozenset(cells)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def cell_color(seed: int, cell: Cell, p: float) -> int:
    """Stateless color of one cell: BLUE with probability p, else YELLOW.

    Pure hash of (seed, q, r), so lazy per-cell queries and eager batch
    generation agree bit-exactly and the map is safe to share across workers.
    """
    q, r = cell
    h = _splitmix64((seed & 0xFFFFFFFFFFFFFFFF) ^ _splitmix64(q & 0xFFFFFFFFFFFFFFFF) ^ ((_splitmix64(r & 0xFFFFFFFFFFFFFFFF) << 1) & 0xFFFFFFFFFFFFFFFF))
    u = (h >> 11) * (2.0 ** -53)
    return BLUE if u < p else YELLOW


@dataclass(frozen=True)
class Coloring:
    """An i.i.d. blue/yellow assignment on a region, reproducible from a seed.

    `colors` may be prefilled (eager) or left to fill lazily; both routes go
    through the same hash, so they agree bit-exactly.  Explicit non-random
    maps can be built with `Coloring.explicit`.
    """

    region: FrozenSet[Cell]
    seed: int
    p: float = 0.5
    colors: Dict[Cell, int] = field(default_factory=dict, compare=False)
    explicit_map: bool = False

    @staticmethod
    def random(region: Iterable[Cell], seed: int, p: float = 0.5,
               eager: bool = False) -> "Coloring":
        region = frozenset(region)
        if not region:
            raise ValueError("region must be nonempty")
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        col = Coloring(region=region, seed=seed, p=p)
        if eager:
            for c in region:
                col.colors[c] = cell_color(seed, c, p)
        return col

    @staticmethod
    def explicit(mapping: Dict[Cell, int], seed: int = 0) -> "Coloring":
        region = frozenset(mapping)
        if not region:
            raise ValueError("region must be nonempty")
        return Coloring(region=region, seed=seed, p=0.5,
                        colors=dict(mapping), explicit_map=True)

    def color_of(self, cell: Cell) -> int:
        got = self.colors.get(cell)
        if got is not None:
            return got
        if self.explicit_map or cell not in self.region:
            raise KeyError(f"cell {cell} outside the colored region")
        c = cell_color(self.seed, cell, self.p)
        self.colors[cell] = c
        return c

    def as_dict(self) -> Dict[Cell, int]:
        return {c: self.color_of(c) for c in sorted(self.region)}

    def flipped(self) -> "Coloring":
        return Coloring.explicit(
            {c: flip_color(v) for c, v in self.as_dict().items()},
            seed=self.seed,
        )


def random_coloring(region: Iterable[Cell], seed: int, p: float = 0.5) -> Coloring:
    return Coloring.random(region, seed, p)


def coloring_to_json(col: Coloring, mesh: float | None = None,
                     radius: float | None = None,
                     explicit_cells: bool = False) -> dict:
    doc = {
        "schema": "hexloops/coloring/v1",
        "mesh": mesh,
        "radius": radius,
        "seed": col.seed,
        "p": col.p,
    }
    if explicit_cells or col.explicit_map or mesh is None:
        doc["cells"] = [[q, r, COLOR_NAMES[col.color_of((q, r))]]
                        for q, r in sorted(col.region)]
    return doc


def coloring_from_json(doc: dict) -> Coloring:
    if doc.get("schema") != "hexloops/coloring/v1":
        raise ValueError("not a hexloops coloring document")
    if "cells" in doc:
        mapping = {(int(q), int(r)): COLOR_FROM_NAME[name]
                   for q, r, name in doc["cells"]}
        return Coloring.explicit(mapping, seed=int(doc.get("seed", 0)))
    region = hexes_in_disc(float(doc["radius"]), float(doc["mesh"]))
    return Coloring.random(region, int(doc["seed"]), float(doc["p"]))
