"""The percolation interface walk on a simply connected set of hexagons.

The walk runs along lattice edges from an anchor vertex `a` to an anchor
vertex `b`, turning left when the hexagon directly ahead is blue and right
when it is yellow (for PlusMinus and Plus boundary conditions; the
color-reversed rule applies for MinusPlus and Minus).  Hexagons outside the
domain are never inspected directly: each boundary edge carries a virtual
color, blue along the counterclockwise arc from a to b and yellow along the
arc from b to a, which is the literal condition for mixed boundaries and the
"as if mixed" device for monochromatic ones.

Internally everything runs in *effective* colors: for MinusPlus/Minus the
real colors are flipped once on query, after which the PlusMinus rule
applies verbatim.  That makes the exact color-blindness identities
(flip coloring + flip boundary condition = same path) structural.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .lattice import (
    BLUE,
    YELLOW,
    Cell,
    Coloring,
    Edge,
    Vertex,
    directed_side_cells,
    edge_cells,
    edge_key,
    flip_color,
    hex_neighbors,
    is_simply_connected,
    region_edges,
    third_cell,
    vertex_neighbors,
)


class BoundaryCondition(enum.Enum):
    PLUS_MINUS = "+-"
    MINUS_PLUS = "-+"
    PLUS = "+"
    MINUS = "-"

    @property
    def mirrored(self) -> bool:
        return self in (BoundaryCondition.MINUS_PLUS, BoundaryCondition.MINUS)

    @property
    def monochromatic(self) -> bool:
        return self in (BoundaryCondition.PLUS, BoundaryCondition.MINUS)

    def flipped(self) -> "BoundaryCondition":
        return {
            BoundaryCondition.PLUS_MINUS: BoundaryCondition.MINUS_PLUS,
            BoundaryCondition.MINUS_PLUS: BoundaryCondition.PLUS_MINUS,
            BoundaryCondition.PLUS: BoundaryCondition.MINUS,
            BoundaryCondition.MINUS: BoundaryCondition.PLUS,
        }[self]


class InvalidAnchorError(ValueError):
    pass


class TopologyError(ValueError):
    pass


class WalkError(RuntimeError):
    """The turn rule produced an inconsistent state; indicates a bug."""


@dataclass
class ExplorationResult:
    """The interface path plus the cells it touched on either side."""

    path: List[Vertex]
    gamma_yellow: FrozenSet[Cell]
    gamma_blue: FrozenSet[Cell]
    a: Vertex
    b: Vertex

    def path_edges(self) -> List[Edge]:
        return [edge_key(self.path[i], self.path[i + 1])
                for i in range(len(self.path) - 1)]

    def fattening(self) -> FrozenSet[Cell]:
        return self.gamma_yellow | self.gamma_blue

    def to_json(self) -> dict:
        return {
            "schema": "hexloops/exploration/v1",
            "vertices": [list(v) for v in self.path],
            "gammaY": sorted(list(c) for c in self.gamma_yellow),
            "gammaB": sorted(list(c) for c in self.gamma_blue),
        }


def boundary_cycle(domain: FrozenSet[Cell]) -> List[Vertex]:
    """Boundary vertices of a simply connected domain, counterclockwise.

    Every boundary vertex of a simply connected hexagon set has exactly two
    boundary edges, so the cycle is simple; it starts at the smallest vertex.
    """
    succ: Dict[Vertex, Vertex] = {}
    for cell_edge, cells in _boundary_edge_cells(domain).items():
        inner = cells[0] if cells[0] in domain else cells[1]
        u, v = cell_edge
        left, _ = directed_side_cells(u, v)
        if left == inner:
            succ[u] = v
        else:
            succ[v] = u
    if not succ:
        raise TopologyError("domain has no boundary")
    start = min(succ)
    cycle = [start]
    cur = succ[start]
    while cur != start:
        cycle.append(cur)
        cur = succ[cur]
        if len(cycle) > len(succ):
            raise TopologyError("boundary is not a single cycle")
    if len(cycle) != len(succ):
        raise TopologyError("boundary is not a single cycle")
    return cycle


def _boundary_edge_cells(domain: FrozenSet[Cell]) -> Dict[Edge, Tuple[Cell, Cell]]:
    out: Dict[Edge, Tuple[Cell, Cell]] = {}
    for e in region_edges(domain):
        c1, c2 = edge_cells(*e)
        if (c1 in domain) != (c2 in domain):
            out[e] = (c1, c2)
    return out


def split_arcs(cycle: Sequence[Vertex], a: Vertex, b: Vertex) -> Tuple[List[Edge], List[Edge]]:
    """(edges of the ccw arc a->b, edges of the ccw arc b->a)."""
    try:
        ia = cycle.index(a)
        ib = cycle.index(b)
    except ValueError as exc:
        raise InvalidAnchorError(f"anchor not on the boundary cycle: {exc}")
    if a == b:
        raise InvalidAnchorError("anchors must be distinct")
    n = len(cycle)
    ab: List[Edge] = []
    i = ia
    while i != ib:
        ab.append(edge_key(cycle[i], cycle[(i + 1) % n]))
        i = (i + 1) % n
    ba: List[Edge] = []
    while i != ia:
        ba.append(edge_key(cycle[i], cycle[(i + 1) % n]))
        i = (i + 1) % n
    return ab, ba


def virtual_colors(domain: FrozenSet[Cell], a: Vertex, b: Vertex) -> Dict[Edge, int]:
    """Effective virtual color of each boundary edge: blue on the a->b arc."""
    cycle = boundary_cycle(domain)
    ab, ba = split_arcs(cycle, a, b)
    pretend = {e: BLUE for e in ab}
    pretend.update({e: YELLOW for e in ba})
    return pretend


def explore(domain: FrozenSet[Cell], a: Vertex, b: Vertex,
            bc: BoundaryCondition, coloring: Coloring,
            check_topology: bool = True) -> ExplorationResult:
    """Run the interface walk from a to b and report the fattened path."""
    domain = frozenset(domain)
    if check_topology and not is_simply_connected(set(domain)):
        raise TopologyError("domain must be simply connected")
    edges = region_edges(domain)
    pretend = virtual_colors(domain, a, b)

    mirrored = bc.mirrored

    def eff_color(cell: Cell) -> int:
        c = coloring.color_of(cell)
        return flip_color(c) if mirrored else c

    path = _walk(domain, edges, pretend, a, b, eff_color)

    gy: Set[Cell] = set()
    gb: Set[Cell] = set()
    for i in range(len(path) - 1):
        for c in edge_cells(path[i], path[i + 1]):
            if c in domain:
                if coloring.color_of(c) == YELLOW:
                    gy.add(c)
                else:
                    gb.add(c)
    return ExplorationResult(path=path, gamma_yellow=frozenset(gy),
                             gamma_blue=frozenset(gb), a=a, b=b)


def _walk(domain: FrozenSet[Cell], edges: Set[Edge],
          pretend: Dict[Edge, int], a: Vertex, b: Vertex, eff_color) -> List[Vertex]:
    """Follow the interface from a to b by local edge admissibility.

    A directed edge is admissible when its left side is effectively yellow
    and its right side effectively blue, outside cells being judged by the
    virtual color of that very edge.  Querying the hexagon ahead and turning
    by its color picks exactly the admissible continuation wherever the
    classic turn rule applies; at the junction vertices a and b (where the
    two incident boundary edges carry different virtual colors) the
    admissibility reading also knows when the interface ends.
    """
    if a == b:
        raise InvalidAnchorError("anchors must be distinct")

    def admissible(v: Vertex, w: Vertex) -> bool:
        e = edge_key(v, w)
        left, right = directed_side_cells(v, w)
        lc = eff_color(left) if left in domain else pretend.get(e)
        rc = eff_color(right) if right in domain else pretend.get(e)
        return lc == YELLOW and rc == BLUE

    start = [w for w in vertex_neighbors(a) if admissible(a, w)]
    if not start:
        raise WalkError(f"no admissible first edge at anchor {a}")
    if len(start) > 1:
        start = [_resolve_ambiguous_start(domain, pretend, eff_color, a, start)]

    u, v = a, start[0]
    path = [u, v]
    used: Set[Edge] = {edge_key(u, v)}
    guard = 3 * len(edges) + 3

    for _ in range(guard):
        options = [w for w in vertex_neighbors(v)
                   if w != u and edge_key(v, w) not in used
                   and admissible(v, w)]
        if v == b:
            if len(options) != 1:
                # none: the interface ends here; two: it both passes through
                # and ends here, and we stop at the first arrival
                return path
        else:
            if not options:
                raise WalkError(f"interface ends away from b at {v}")
            if len(options) > 1:
                raise WalkError(f"ambiguous continuation away from b at {v}")
        nxt = options[0]
        e = edge_key(v, nxt)
        if e in used:
            raise WalkError(f"walk reuses edge {e}")
        used.add(e)
        path.append(nxt)
        u, v = v, nxt
    raise WalkError("termination guard exceeded; turn rule is inconsistent")


def _resolve_ambiguous_start(domain: FrozenSet[Cell], pretend: Dict[Edge, int],
                             eff_color, a: Vertex,
                             candidates: List[Vertex]) -> Vertex:
    """Break the tie at a reflex anchor whose two boundary hugs both satisfy
    the local invariant (inner cells blue on the b->a side, yellow on the
    a->b side).

    The anchor convention is not fixed by the turn rule alone, so we choose
    the strand that is globally anchored: hug the yellow inner cell forward
    when its yellow cluster reaches the yellow virtual arc, else hug the
    blue inner cell backward when its blue cluster reaches the blue arc,
    else default to the forward hug.
    """
    forward = backward = None
    for w in candidates:
        left, right = directed_side_cells(a, w)
        if left in domain:
            forward, fcell = w, left
        else:
            backward, bcell = w, right
    if forward is None or backward is None:
        return candidates[0]

    def arc_inner_cells(color: int) -> Set[Cell]:
        inner = set()
        for e, pc in pretend.items():
            if pc != color:
                continue
            c1, c2 = edge_cells(*e)
            inner.add(c1 if c1 in domain else c2)
        return inner

    def chain_reaches(seed: Cell, color: int, targets: Set[Cell]) -> bool:
        seen = {seed}
        stack = [seed]
        while stack:
            c = stack.pop()
            if c in targets:
                return True
            for n in hex_neighbors(c):
                if n in domain and n not in seen and eff_color(n) == color:
                    seen.add(n)
                    stack.append(n)
        return False

    if chain_reaches(fcell, YELLOW, arc_inner_cells(YELLOW)):
        return forward
    if chain_reaches(bcell, BLUE, arc_inner_cells(BLUE)):
        return backward
    return forward


@dataclass
class ColorblindReport:
    """Evidence that the walk's distribution ignores the global color naming."""

    n_samples: int
    exact_pairs_checked: int
    exact_pairs_equal: bool
    length_stat: float
    length_threshold: float

    @property
    def passed(self) -> bool:
        return self.exact_pairs_equal and self.length_stat <= self.length_threshold


def exploration_distribution_is_colorblind(
        domain: FrozenSet[Cell], a: Vertex, b: Vertex, bc: BoundaryCondition,
        n_samples: int, seed: int) -> ColorblindReport:
    """Check path(coloring, bc) == path(flip(coloring), flip(bc)) exactly,
    and compare path-length distributions across a flipped sample stream."""
    if n_samples < 2:
        raise ValueError("need at least two samples")
    domain = frozenset(domain)
    lengths_direct: List[int] = []
    lengths_flipped: List[int] = []
    equal = True
    for i in range(n_samples):
        col = Coloring.random(domain, seed=seed + i)
        res = explore(domain, a, b, bc, col, check_topology=False)
        res_f = explore(domain, a, b, bc.flipped(), col.flipped(),
                        check_topology=False)
        if res.path != res_f.path:
            equal = False
        lengths_direct.append(len(res.path))
        col2 = Coloring.random(domain, seed=seed + n_samples + i)
        res2 = explore(domain, a, b, bc, col2.flipped(), check_topology=False)
        lengths_flipped.append(len(res2.path))

    # two-sample mean comparison at ~3 sigma
    import statistics

    m1, m2 = statistics.fmean(lengths_direct), statistics.fmean(lengths_flipped)
    v1 = statistics.pvariance(lengths_direct)
    v2 = statistics.pvariance(lengths_flipped)
    se = ((v1 + v2) / n_samples) ** 0.5
    stat = abs(m1 - m2)
    threshold = 3.0 * se if se > 0 else 1e-9
    return ColorblindReport(
        n_samples=n_samples,
        exact_pairs_checked=n_samples,
        exact_pairs_equal=equal,
        length_stat=stat,
        length_threshold=max(threshold, 1e-9),
    )
