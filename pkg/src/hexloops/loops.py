"""Closed lattice-edge cycles and ensembles of them.

Loops are stored as canonical undirected cycles so that ensembles produced by
different routes (inductive construction, ground-truth contour tracing, any
exploration order) can be compared for exact set equality: the vertex list is
rotated to start at its smallest vertex id and directed toward the smaller of
the two neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .lattice import (
    Cell,
    Edge,
    Vertex,
    cell_center_units,
    directed_side_cells,
    edge_key,
    hex_corner_vertex,
    hex_neighbors,
    vertex_units,
)

CanonicalCycle = Tuple[Vertex, ...]


def canonical_cycle(vertices: Sequence[Vertex]) -> CanonicalCycle:
    """Canonical form of a closed cycle (closing vertex may be repeated)."""
    verts = list(vertices)
    if len(verts) >= 2 and verts[0] == verts[-1]:
        verts.pop()
    if len(verts) < 3:
        raise ValueError("a loop needs at least 3 vertices")
    if len(set(verts)) != len(verts):
        raise ValueError("loop revisits a vertex")
    k = min(range(len(verts)), key=lambda i: verts[i])
    rot = verts[k:] + verts[:k]
    if rot[1] > rot[-1]:
        rot = [rot[0]] + rot[:0:-1]
    return tuple(rot)


def cycle_edges(cycle: Sequence[Vertex]) -> List[Edge]:
    n = len(cycle)
    return [edge_key(cycle[i], cycle[(i + 1) % n]) for i in range(n)]


def signed_area_units(cycle: Sequence[Vertex]) -> int:
    """Twice the signed area in doubled lattice units; > 0 iff counterclockwise."""
    total = 0
    n = len(cycle)
    for i in range(n):
        x1, y1 = vertex_units(cycle[i])
        x2, y2 = vertex_units(cycle[(i + 1) % n])
        total += x1 * y2 - x2 * y1
    return total


def point_in_cycle(cycle: Sequence[Vertex], point_units: Tuple[int, int]) -> bool:
    """Exact crossing-number test for a point given in doubled integer units.

    Cell centers never land on loop edges or vertices (their x differs mod 3
    from every vertex), so the parity is always well defined for them.
    """
    px, py = point_units
    crossings = 0
    n = len(cycle)
    for i in range(n):
        x1, y1 = vertex_units(cycle[i])
        x2, y2 = vertex_units(cycle[(i + 1) % n])
        if y1 == y2:
            continue
        if y1 > y2:
            x1, y1, x2, y2 = x2, y2, x1, y1
        if not (y1 <= py < y2):
            continue
        # non-horizontal lattice edges rise by exactly 1 unit: exact division
        xint = x1 + (x2 - x1) * (py - y1) // (y2 - y1)
        if xint > px:
            crossings += 1
    return crossings % 2 == 1


def neighbor_shared_edge(cell: Cell, k: int) -> Edge:
    """Edge between a cell and its k-th neighbor (k indexes NEIGHBOR_OFFSETS)."""
    return edge_key(hex_corner_vertex(cell, k), hex_corner_vertex(cell, k + 1))


def cycle_interior_cells(cycle: Sequence[Vertex]) -> Set[Cell]:
    """All hexagons enclosed by the cycle (exact, by blocked flood fill)."""
    cyc = list(cycle)
    if signed_area_units(cyc) < 0:
        cyc.reverse()
    blocked = set(cycle_edges(cyc))
    seeds = set()
    n = len(cyc)
    for i in range(n):
        left, _right = directed_side_cells(cyc[i], cyc[(i + 1) % n])
        seeds.add(left)
    interior: Set[Cell] = set()
    stack = list(seeds)
    while stack:
        c = stack.pop()
        if c in interior:
            continue
        interior.add(c)
        for k, nb in enumerate(hex_neighbors(c)):
            if nb in interior:
                continue
            if neighbor_shared_edge(c, k) in blocked:
                continue
            stack.append(nb)
    return interior


def convex_hull_units(points: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    lower: List[Tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass
class Loop:
    """A closed, edge-self-avoiding cycle of hexagonal lattice edges."""

    vertices: CanonicalCycle
    orientation: Optional[str] = None      # "CW", "CCW" or None (undirected)
    birth_step: int = 0
    parent_excursion: Optional[dict] = None
    depth: Optional[int] = None

    def __post_init__(self) -> None:
        self.vertices = canonical_cycle(self.vertices)

    def closed_vertices(self) -> List[Vertex]:
        return list(self.vertices) + [self.vertices[0]]

    def edges(self) -> List[Edge]:
        return cycle_edges(self.vertices)

    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges())

    def n_edges(self) -> int:
        return len(self.vertices)

    def interior_cells(self) -> Set[Cell]:
        return cycle_interior_cells(self.vertices)

    def contains_point_units(self, point_units: Tuple[int, int]) -> bool:
        return point_in_cycle(self.vertices, point_units)

    def diameter(self, mesh: float) -> float:
        """Maximal pairwise vertex distance in the embedding."""
        hull = convex_hull_units([vertex_units(v) for v in self.vertices])
        best = 0.0
        sx, sy = mesh / 2.0, mesh * (3.0 ** 0.5) / 2.0
        for i in range(len(hull)):
            for j in range(i + 1, len(hull)):
                dx = (hull[i][0] - hull[j][0]) * sx
                dy = (hull[i][1] - hull[j][1]) * sy
                d = (dx * dx + dy * dy) ** 0.5
                if d > best:
                    best = d
        return best

    def validate(self) -> None:
        edges = self.edges()
        if len(set(edges)) != len(edges):
            raise AssertionError("loop reuses an edge")
        counts: Dict[Vertex, int] = {}
        for v in self.vertices:
            counts[v] = counts.get(v, 0) + 1
            if counts[v] > 2:
                raise AssertionError("loop visits a vertex more than twice")


@dataclass
class LoopEnsemble:
    """All loops found for one coloring, with per-step provenance."""

    loops: List[Loop] = field(default_factory=list)
    mesh: float = 1.0
    radius: Optional[float] = None
    seed: Optional[int] = None
    step_log: List[dict] = field(default_factory=list)

    def canonical_set(self) -> FrozenSet[CanonicalCycle]:
        return frozenset(lp.vertices for lp in self.loops)

    def validate(self) -> None:
        for lp in self.loops:
            lp.validate()
        # distinct contour loops on the hexagonal lattice never share a vertex
        seen: Set[Vertex] = set()
        for lp in self.loops:
            for v in lp.vertices:
                if v in seen:
                    raise AssertionError("two loops share a vertex")
            seen.update(lp.vertices)

    def nesting_depths(self) -> Dict[int, int]:
        """Nesting depth of every loop (0 = outermost), by exact containment."""
        reps = []
        for lp in self.loops:
            left, _ = directed_side_cells(*_ccw_first_edge(lp.vertices))
            reps.append(cell_center_units(left))
        depths: Dict[int, int] = {}
        for i, lp in enumerate(self.loops):
            d = 0
            for j, other in enumerate(self.loops):
                if i != j and point_in_cycle(other.vertices, reps[i]):
                    d += 1
            depths[i] = d
        return depths


def _ccw_first_edge(cycle: Sequence[Vertex]) -> Tuple[Vertex, Vertex]:
    cyc = list(cycle)
    if signed_area_units(cyc) < 0:
        cyc.reverse()
    return cyc[0], cyc[1]


def ensemble_to_json(ens: LoopEnsemble) -> dict:
    return {
        "schema": "hexloops/ensemble/v1",
        "mesh": ens.mesh,
        "radius": ens.radius,
        "seed": ens.seed,
        "loops": [
            {
                "vertices": [list(v) for v in lp.closed_vertices()],
                "orientation": lp.orientation,
                "birth_step": lp.birth_step,
            }
            for lp in sorted(ens.loops, key=lambda l: l.vertices)
        ],
        "step_log": ens.step_log,
    }


def ensemble_from_json(doc: dict) -> LoopEnsemble:
    if doc.get("schema") != "hexloops/ensemble/v1":
        raise ValueError("not a hexloops ensemble document")
    loops = [
        Loop(
            vertices=tuple(tuple(v) for v in item["vertices"]),
            orientation=item.get("orientation"),
            birth_step=int(item.get("birth_step", 0)),
        )
        for item in doc["loops"]
    ]
    return LoopEnsemble(
        loops=loops,
        mesh=float(doc.get("mesh", 1.0)),
        radius=doc.get("radius"),
        seed=doc.get("seed"),
        step_log=list(doc.get("step_log", [])),
    )
