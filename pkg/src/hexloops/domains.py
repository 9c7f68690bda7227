"""Decomposition of the unexplored remainder after one exploration.

The cells of a domain that were not touched by the walk fall apart into
connected components.  Each component is classified by the real colors of
everything it borders: the touched cells around it plus, across edges of the
parent boundary, whatever sits there in the ambient configuration (an
already-explored cell of an enclosing domain, or the all-blue surroundings
of the root disc).

A component bordered by both colors is a type (1) domain: its boundary
splits into one run of each color, the two junction vertices become the next
exploration's anchors, and the path segment of the parent exploration along
its same-color run is recorded as the generating excursion.  Components
bordered by a single color get monochromatic boundary conditions and
extremal-distance anchors; they restart the induction like the original
disc.  Type labels follow the parent's effective color convention, so the
same structural classifier reports mirrored types under flipped boundary
conditions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .exploration import (
    BoundaryCondition,
    ExplorationResult,
    boundary_cycle,
)
from .lattice import (
    BLUE,
    YELLOW,
    Cell,
    Coloring,
    Edge,
    Vertex,
    edge_cells,
    edge_key,
    flip_color,
    hex_neighbors,
    is_simply_connected,
    vertex_units,
)


class DomainType(enum.Enum):
    TYPE1 = 1
    TYPE2 = 2
    TYPE3 = 3
    TYPE4 = 4


class ClassificationError(AssertionError):
    """A component's surround violates the expected two-run structure."""


@dataclass
class SubDomain:
    cells: FrozenSet[Cell]
    dtype: DomainType
    bc: BoundaryCondition
    anchors: Optional[Tuple[Vertex, Vertex]] = None
    excursion_span: Optional[Tuple[int, int]] = None
    excursion_vertices: Optional[Tuple[Vertex, ...]] = None

    def to_json(self) -> dict:
        return {
            "schema": "hexloops/subdomain/v1",
            "cells": sorted(list(c) for c in self.cells),
            "dtype": self.dtype.name,
            "bc": self.bc.value,
            "anchors": [list(v) for v in self.anchors] if self.anchors else None,
            "excursion": list(self.excursion_span) if self.excursion_span else None,
        }


def outside_real_color(cell: Cell, coloring: Coloring,
                       exterior_color: int = BLUE) -> int:
    """Real color of a cell in the ambient configuration (ocean if outside)."""
    if cell in coloring.region:
        return coloring.color_of(cell)
    return exterior_color


def decompose(domain: FrozenSet[Cell], result: ExplorationResult,
              parent_bc: BoundaryCondition, coloring: Coloring,
              exterior_color: int = BLUE) -> List[SubDomain]:
    """Split domain \\ fattening into classified subdomains."""
    fat = result.fattening()
    rest = set(domain) - set(fat)
    components = _components(rest)
    touched_by: Dict[Cell, List[int]] = {}
    for i in range(len(result.path) - 1):
        for c in edge_cells(result.path[i], result.path[i + 1]):
            touched_by.setdefault(c, []).append(i)

    subs: List[SubDomain] = []
    for comp in components:
        subs.append(_classify(comp, domain, fat, parent_bc, coloring,
                              exterior_color, result, touched_by))
    subs.sort(key=lambda s: min(s.cells))
    return subs


def _components(cells: Set[Cell]) -> List[FrozenSet[Cell]]:
    out: List[FrozenSet[Cell]] = []
    seen: Set[Cell] = set()
    for start in sorted(cells):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            c = stack.pop()
            for n in hex_neighbors(c):
                if n in cells and n not in seen:
                    seen.add(n)
                    comp.add(n)
                    stack.append(n)
        out.append(frozenset(comp))
    return out


def _classify(comp: FrozenSet[Cell], domain: FrozenSet[Cell],
              fat: FrozenSet[Cell], parent_bc: BoundaryCondition,
              coloring: Coloring, exterior_color: int,
              result: ExplorationResult,
              touched_by: Dict[Cell, List[int]]) -> SubDomain:
    cycle = boundary_cycle(comp)
    n = len(cycle)
    edge_color: List[int] = []
    edge_outside: List[Optional[Cell]] = []
    touches_parent_boundary = False
    for i in range(n):
        u, v = cycle[i], cycle[(i + 1) % n]
        c1, c2 = edge_cells(u, v)
        out = c2 if c1 in comp else c1
        if out in domain:
            if out not in fat:
                raise ClassificationError(
                    f"component borders an unexplored cell {out}")
            edge_color.append(coloring.color_of(out))
            edge_outside.append(out)
        else:
            touches_parent_boundary = True
            edge_color.append(outside_real_color(out, coloring, exterior_color))
            edge_outside.append(None)

    colors = set(edge_color)
    if not colors:
        raise ClassificationError("component has no boundary")
    mirrored = parent_bc.mirrored

    if len(colors) == 1:
        real = colors.pop()
        eff = flip_color(real) if mirrored else real
        if eff == YELLOW:
            dtype = DomainType.TYPE3
        else:
            dtype = DomainType.TYPE2 if touches_parent_boundary else DomainType.TYPE4
        bc = BoundaryCondition.PLUS if real == BLUE else BoundaryCondition.MINUS
        a, b = pick_ab(comp, cycle=cycle)
        return SubDomain(cells=comp, dtype=dtype, bc=bc, anchors=(a, b))

    # mixed surround: exactly one run of each color around the cycle
    runs = _color_runs(edge_color)
    if len(runs) != 2:
        raise ClassificationError(
            f"mixed component has {len(runs)} boundary color runs")
    (c0, s0, e0), (c1s, s1, e1) = runs
    blue_start = s0 if c0 == BLUE else s1
    yellow_start = s0 if c0 == YELLOW else s1
    # a' = junction where the ccw traversal enters the blue run
    a_prime = cycle[blue_start % n]
    b_prime = cycle[yellow_start % n]

    same_color_cells = [edge_outside[i] for i in range(n)
                        if edge_color[i] == YELLOW and edge_outside[i] is not None]
    if mirrored:
        same_color_cells = [edge_outside[i] for i in range(n)
                            if edge_color[i] == BLUE and edge_outside[i] is not None]
    span = _excursion_span(same_color_cells, touched_by)
    excursion = None
    if span is not None:
        excursion = tuple(result.path[span[0]:span[1] + 2])

    return SubDomain(
        cells=comp,
        dtype=DomainType.TYPE1,
        bc=BoundaryCondition.PLUS_MINUS,
        anchors=(a_prime, b_prime),
        excursion_span=span,
        excursion_vertices=excursion,
    )


def _color_runs(edge_color: Sequence[int]) -> List[Tuple[int, int, int]]:
    """Maximal constant-color runs (color, start, end) around a cyclic list."""
    n = len(edge_color)
    if len(set(edge_color)) == 1:
        return [(edge_color[0], 0, n - 1)]
    start = 0
    while edge_color[start] == edge_color[start - 1]:
        start += 1
    runs: List[Tuple[int, int, int]] = []
    i = start
    while True:
        j = i
        while edge_color[(j + 1) % n] == edge_color[i % n] and j < i + n - 1:
            j += 1
        runs.append((edge_color[i % n], i, j))
        i = j + 1
        if (i - start) % n == 0:
            break
    return runs


def _excursion_span(cells: List[Cell],
                    touched_by: Dict[Cell, List[int]]) -> Optional[Tuple[int, int]]:
    indices = [i for c in cells for i in touched_by.get(c, ())]
    if not indices:
        return None
    return (min(indices), max(indices))


def excursion_anchors(sub: SubDomain) -> Tuple[Vertex, Vertex]:
    """Anchors of a type (1) subdomain: where its excursion ends and starts."""
    if sub.dtype is not DomainType.TYPE1:
        raise TypeError("excursion anchors exist only for type (1) subdomains")
    assert sub.anchors is not None
    return sub.anchors


def pick_ab(cells: FrozenSet[Cell],
            cycle: Optional[Sequence[Vertex]] = None) -> Tuple[Vertex, Vertex]:
    """Anchor pair of maximal x-distance (or y-distance, whichever is larger).

    Distances are measured between embedded boundary vertices; all ties are
    broken by smallest vertex id, and `a` is the lexicographically smaller
    anchor.  The root disc does not use this rule (its anchors sit next to
    the lowest and highest boundary points; see loopbuild.disc_anchors).
    """
    if cycle is None:
        cycle = boundary_cycle(cells)
    units = {v: vertex_units(v) for v in cycle}
    xmin = min(u[0] for u in units.values())
    xmax = max(u[0] for u in units.values())
    ymin = min(u[1] for u in units.values())
    ymax = max(u[1] for u in units.values())
    # real dx = (xmax-xmin)*mesh/2, dy = (ymax-ymin)*mesh*sqrt(3)/2:
    # compare squares exactly in integer units
    dx, dy = xmax - xmin, ymax - ymin
    if dx * dx > 3 * dy * dy:
        u = min(v for v, p in units.items() if p[0] == xmin)
        w = min(v for v, p in units.items() if p[0] == xmax)
    else:
        u = min(v for v, p in units.items() if p[1] == ymin)
        w = min(v for v, p in units.items() if p[1] == ymax)
    return (u, w) if u <= w else (w, u)
