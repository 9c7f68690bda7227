"""The inductive construction of the full loop ensemble.

One step = one exploration in one pending domain.  Steps are grouped into
stages (stage k runs the k highest-priority pending domains, ranked by a
deterministic dense point set), or taken one at a time in flat mode; by the
construction's order independence both schedules produce the same loops.

Loops are closed incrementally: each exploration contributes every edge that
separates two cells of different real colors (the surroundings of the root
region count as blue), plus the boundary edges whose inner cell it touched
when the outer side differs in color.  Every such edge belongs to the outer
contour of exactly one cluster, and distinct contours share no vertices, so
the collected edges accumulate into vertex-disjoint simple cycles; whenever
a connected group closes (every vertex of degree two) it is emitted as a
loop with the current step as its birth step.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .domains import DomainType, SubDomain, decompose, outside_real_color, pick_ab
from .exploration import BoundaryCondition, ExplorationResult, boundary_cycle, explore
from .lattice import (
    BLUE,
    YELLOW,
    Cell,
    Coloring,
    Edge,
    Vertex,
    edge_cells,
    edge_key,
    is_simply_connected,
    point_to_cell,
    vertex_units,
)
from .loops import Loop, LoopEnsemble, canonical_cycle, point_in_cycle

__all__ = [
    "PrioritySet",
    "Loop",
    "LoopEnsemble",
    "run_construction",
    "assemble_loop",
    "priority",
    "orient_loops",
    "order_independence_check",
    "disc_anchors",
    "domain_extent",
    "steps_to_resolve",
]


@dataclass(frozen=True)
class PrioritySet:
    """A deterministic ordered point set, dense down to a fixed resolution."""

    kind: str
    points: Tuple[Tuple[float, float], ...]

    @staticmethod
    def dyadic(radius: float, levels: int) -> "PrioritySet":
        """Points (k/2^n, m/2^n) in the disc, level by level, lexicographic.

        Levels list each point once, at the first level whose grid contains
        it (level 0 holds the integer points, level n the pairs with at
        least one odd numerator).
        """
        pts: List[Tuple[float, float]] = []
        for n in range(levels + 1):
            scale = 2 ** n
            span = int(radius * scale) + 1
            for k in range(-span, span + 1):
                for m in range(-span, span + 1):
                    if n > 0 and k % 2 == 0 and m % 2 == 0:
                        continue
                    x, y = k / scale, m / scale
                    if x * x + y * y < radius * radius:
                        pts.append((x, y))
        return PrioritySet(kind=f"dyadic:{levels}", points=tuple(pts))

    @staticmethod
    def low_discrepancy(radius: float, count: int) -> "PrioritySet":
        """Halton (2, 3) points scaled to the disc's bounding square."""
        def halton(i: int, base: int) -> float:
            f, r = 1.0, 0.0
            while i > 0:
                f /= base
                r += f * (i % base)
                i //= base
            return r
        pts: List[Tuple[float, float]] = []
        i = 1
        while len(pts) < count:
            x = (2.0 * halton(i, 2) - 1.0) * radius
            y = (2.0 * halton(i, 3) - 1.0) * radius
            if x * x + y * y < radius * radius:
                pts.append((x, y))
            i += 1
        return PrioritySet(kind=f"halton:{count}", points=tuple(pts))

    @staticmethod
    def for_region(radius: float, mesh: float, kind: str = "dyadic") -> "PrioritySet":
        if kind == "dyadic":
            # resolve below the hexagon inradius so every cell holds a point
            levels = max(1, math.ceil(math.log2(2.0 / (mesh * math.sqrt(3.0)))) + 1)
            return PrioritySet.dyadic(radius, levels)
        if kind == "lowdisc":
            target = int(12.0 * radius * radius / (mesh * mesh)) + 64
            return PrioritySet.low_discrepancy(radius, target)
        raise ValueError(f"unknown priority set kind {kind!r}")

    def cell_ranks(self, mesh: float) -> Dict[Cell, int]:
        ranks: Dict[Cell, int] = {}
        for i, (x, y) in enumerate(self.points):
            h = point_to_cell(x, y, mesh)
            if h not in ranks:
                ranks[h] = i
        return ranks


def priority(sub_cells: FrozenSet[Cell], ranks: Dict[Cell, int]) -> Tuple[int, int, Cell]:
    """Priority key (ascending = more urgent) of a domain under a point order."""
    best = min((ranks[c] for c in sub_cells if c in ranks), default=None)
    if best is None:
        return (1, 0, min(sub_cells))
    return (0, best, min(sub_cells))


def disc_anchors(region: FrozenSet[Cell], mesh: float,
                 radius: float) -> Tuple[Vertex, Vertex]:
    """Boundary vertices closest to the bottom and top points of the disc."""
    cycle = boundary_cycle(region)
    sx, sy = mesh / 2.0, mesh * math.sqrt(3.0) / 2.0

    def nearest(target_y: float) -> Vertex:
        def key(v: Vertex):
            x, y = vertex_units(v)
            return ((x * sx) ** 2 + (y * sy - target_y) ** 2, v)
        return min(cycle, key=key)

    a = nearest(-radius)
    b = nearest(radius)
    if a == b:
        raise ValueError("degenerate region: top and bottom anchors coincide")
    return a, b


def domain_extent(cells: FrozenSet[Cell], mesh: float) -> float:
    """Max of the x- and y-extents of the boundary vertices (the stop metric)."""
    units = [vertex_units(v) for v in boundary_cycle(cells)]
    dx = (max(u[0] for u in units) - min(u[0] for u in units)) * mesh / 2.0
    dy = (max(u[1] for u in units) - min(u[1] for u in units)) * mesh * math.sqrt(3.0) / 2.0
    return max(dx, dy)


@dataclass
class _Task:
    order_key: Tuple
    seq: int
    cells: FrozenSet[Cell]
    bc: BoundaryCondition
    anchors: Tuple[Vertex, Vertex]
    dtype: Optional[DomainType]
    excursion_span: Optional[Tuple[int, int]] = None

    def __lt__(self, other: "_Task") -> bool:
        return (self.order_key, self.seq) < (other.order_key, other.seq)


class _CycleAccumulator:
    """Collects contour edges and emits each cycle the moment it closes."""

    def __init__(self) -> None:
        self.adj: Dict[Vertex, List[Vertex]] = {}
        self.parent: Dict[Vertex, Vertex] = {}
        self.open_count: Dict[Vertex, int] = {}
        self.emitted: Set[Vertex] = set()
        self.pending_edges = 0

    def _find(self, v: Vertex) -> Vertex:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def add_edge(self, u: Vertex, v: Vertex) -> None:
        for w in (u, v):
            if w not in self.parent:
                self.parent[w] = w
                self.adj[w] = []
                self.open_count[w] = 0
        du, dv = len(self.adj[u]), len(self.adj[v])
        if du >= 2 or dv >= 2:
            raise AssertionError(f"edge {u}-{v} raises a vertex above degree two")
        if v in self.adj[u]:
            raise AssertionError(f"edge {u}-{v} collected twice")
        self.adj[u].append(v)
        self.adj[v].append(u)
        self.pending_edges += 1
        ru, rv = self._find(u), self._find(v)
        delta_u = 1 if du == 0 else -1
        delta_v = 1 if dv == 0 else -1
        if ru == rv:
            self.open_count[ru] += delta_u + delta_v
        else:
            self.parent[rv] = ru
            self.open_count[ru] += self.open_count[rv] + delta_u + delta_v
            self.open_count[rv] = 0

    def closed_component(self, v: Vertex) -> Optional[List[Vertex]]:
        root = self._find(v)
        if root in self.emitted or self.open_count[root] != 0:
            return None
        cycle = [v]
        prev: Optional[Vertex] = None
        cur = v
        while True:
            n1, n2 = self.adj[cur]
            nxt = n2 if n1 == prev else n1
            if nxt == v:
                break
            cycle.append(nxt)
            prev, cur = cur, nxt
        self.emitted.add(root)
        self.pending_edges -= len(cycle)
        return cycle


def _collect_step_edges(task_cells: FrozenSet[Cell], res: ExplorationResult,
                        coloring: Coloring, exterior_color: int) -> List[Edge]:
    """Edges this exploration contributes to the contour accumulator."""

    def real(cell: Cell) -> int:
        return outside_real_color(cell, coloring, exterior_color)

    from .lattice import cell_edges, hex_neighbors

    collected: List[Edge] = []
    path_edges = set(res.path_edges())
    for e in path_edges:
        c1, c2 = edge_cells(*e)
        if real(c1) != real(c2):
            collected.append(e)
    # boundary edges whose inner cell the walk touched but did not run along
    touched = res.fattening()
    seen: Set[Edge] = set()
    for c in touched:
        nbs = hex_neighbors(c)
        ces = cell_edges(c)
        for k in range(6):
            n = nbs[k]
            if n in task_cells:
                continue
            e = ces[k]
            if e in path_edges or e in seen:
                continue
            seen.add(e)
            if real(c) != real(n):
                collected.append(e)
    return collected


def run_construction(region: FrozenSet[Cell], coloring: Coloring,
                     mesh: float = 1.0, radius: Optional[float] = None,
                     stop_diameter: Optional[float] = None,
                     priority_set: Optional[PrioritySet] = None,
                     priority_kind: str = "dyadic",
                     flat: bool = False,
                     root_anchors: Optional[Tuple[Vertex, Vertex]] = None,
                     check_topology: bool = True) -> LoopEnsemble:
    """Run the staged inductive construction to exhaustion (or an extent stop).

    The region is treated as surrounded by blue; the first exploration runs
    with monochromatic blue boundary conditions between the anchors nearest
    the bottom and top of the disc (or the extremal-distance anchors when no
    radius applies).
    """
    region = frozenset(region)
    if check_topology and not is_simply_connected(set(region)):
        raise ValueError("region must be simply connected")
    exterior_color = BLUE
    if priority_set is None:
        eff_radius = radius if radius is not None else _region_radius(region, mesh)
        priority_set = PrioritySet.for_region(eff_radius, mesh, priority_kind)
    ranks = priority_set.cell_ranks(mesh)

    if root_anchors is None:
        if radius is not None:
            root_anchors = disc_anchors(region, mesh, radius)
        else:
            root_anchors = pick_ab(region)

    heap: List[_Task] = []
    seq = 0
    root = _Task(order_key=priority(region, ranks), seq=seq, cells=region,
                 bc=BoundaryCondition.PLUS, anchors=root_anchors, dtype=None)
    heapq.heappush(heap, root)

    acc = _CycleAccumulator()
    loops: List[Loop] = []
    step_log: List[dict] = []
    step = 0
    stage = 0

    while heap:
        if stop_diameter is not None:
            live = [t for t in heap
                    if domain_extent(t.cells, mesh) >= stop_diameter]
            if not live:
                break
        stage += 1
        batch_size = 1 if flat else stage
        batch: List[_Task] = []
        for _ in range(batch_size):
            if not heap:
                break
            batch.append(heapq.heappop(heap))
        for task in batch:
            step += 1
            a, b = task.anchors
            res = explore(task.cells, a, b, task.bc, coloring,
                          check_topology=False)
            new_edges = _collect_step_edges(task.cells, res, coloring,
                                            exterior_color)
            closed_here: Set[Vertex] = set()
            for e in new_edges:
                acc.add_edge(*e)
            for e in new_edges:
                cyc = acc.closed_component(e[0])
                if cyc is not None:
                    lp = Loop(vertices=canonical_cycle(cyc), birth_step=step)
                    if task.dtype is DomainType.TYPE1:
                        lp.parent_excursion = {
                            "closing_step": step,
                            "anchors": [list(a), list(b)],
                            "excursion_span": list(task.excursion_span)
                            if task.excursion_span else None,
                        }
                    loops.append(lp)
            children = decompose(task.cells, res, task.bc, coloring,
                                 exterior_color)
            for child in children:
                seq += 1
                heapq.heappush(heap, _Task(
                    order_key=priority(child.cells, ranks),
                    seq=seq,
                    cells=child.cells,
                    bc=child.bc,
                    anchors=child.anchors,
                    dtype=child.dtype,
                    excursion_span=child.excursion_span,
                ))
            step_log.append({
                "step": step,
                "stage": stage,
                "bc": task.bc.value,
                "dtype": task.dtype.name if task.dtype else "ROOT",
                "domain_size": len(task.cells),
                "extent": domain_extent(task.cells, mesh),
                "path_len": len(res.path) - 1,
                "n_children": len(children),
                "loops_closed": sum(1 for lp in loops if lp.birth_step == step),
            })

    if stop_diameter is None and acc.pending_edges:
        raise AssertionError(
            f"{acc.pending_edges} contour edges never closed into loops")

    ens = LoopEnsemble(loops=loops, mesh=mesh, radius=radius,
                       seed=coloring.seed, step_log=step_log)
    return ens


def _region_radius(region: FrozenSet[Cell], mesh: float) -> float:
    best = 0.0
    for v in boundary_cycle(region):
        x, y = vertex_units(v)
        best = max(best, math.hypot(x * mesh / 2.0,
                                    y * mesh * math.sqrt(3.0) / 2.0))
    return best


def assemble_loop(excursion: Sequence[Vertex], new_path: ExplorationResult) -> Loop:
    """Paste an excursion with the exploration run back across its mouth.

    The new path must run from the excursion's final vertex to its first;
    the loop traverses the excursion and then the new path.
    """
    exc = list(excursion)
    if len(exc) < 2:
        raise ValueError("excursion must contain at least one edge")
    if new_path.path[0] != exc[-1] or new_path.path[-1] != exc[0]:
        raise ValueError("path endpoints do not match the excursion")
    cycle = exc + new_path.path[1:-1]
    return Loop(vertices=canonical_cycle(cycle))


def orient_loops(ensemble: LoopEnsemble, outermost: str = "CCW") -> LoopEnsemble:
    """Assign alternating directions by nesting depth, outermost as given."""
    if outermost not in ("CW", "CCW"):
        raise ValueError("outermost must be 'CW' or 'CCW'")
    depths = ensemble.nesting_depths()
    other = "CW" if outermost == "CCW" else "CCW"
    out = LoopEnsemble(loops=[], mesh=ensemble.mesh, radius=ensemble.radius,
                       seed=ensemble.seed, step_log=list(ensemble.step_log))
    for i, lp in enumerate(ensemble.loops):
        o = outermost if depths[i] % 2 == 0 else other
        out.loops.append(Loop(vertices=lp.vertices, orientation=o,
                              birth_step=lp.birth_step,
                              parent_excursion=lp.parent_excursion,
                              depth=depths[i]))
    return out


def directed_vertices(loop: Loop) -> List[Vertex]:
    """Vertex cycle of an oriented loop, traversed in its assigned direction."""
    if loop.orientation not in ("CW", "CCW"):
        raise ValueError("loop is not oriented")
    from .loops import signed_area_units

    verts = list(loop.vertices)
    ccw = signed_area_units(verts) > 0
    if (loop.orientation == "CCW") != ccw:
        verts = [verts[0]] + verts[:0:-1]
    return verts


def order_independence_check(region: FrozenSet[Cell], coloring: Coloring,
                             orders: Iterable[PrioritySet], mesh: float = 1.0,
                             radius: Optional[float] = None) -> bool:
    """True iff every priority order yields the identical undirected ensemble."""
    reference: Optional[FrozenSet] = None
    for ps in orders:
        ens = run_construction(region, coloring, mesh=mesh, radius=radius,
                               priority_set=ps, check_topology=False)
        canon = ens.canonical_set()
        if reference is None:
            reference = canon
        elif canon != reference:
            return False
    return True


def steps_to_resolve(ensemble: LoopEnsemble, min_diameter: float) -> int:
    """Step at which every loop of at least the given diameter had closed."""
    worst = 0
    for lp in ensemble.loops:
        if lp.diameter(ensemble.mesh) >= min_diameter:
            worst = max(worst, lp.birth_step)
    return worst
