"""Ground-truth cluster labeling and boundary-contour tracing.

This module is the referee for the inductive loop construction: it finds all
monochromatic clusters by flood fill and traces the closed edge cycle around
each cluster's filled (hole-free) hull directly.  Nothing here shares code
with the constructive path, so exact agreement between the two is a real
check.  Clarity is preferred over speed throughout.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .lattice import BLUE, YELLOW, Cell, Coloring, Edge, Vertex, cell_edges, hex_neighbors
from .loops import Loop, LoopEnsemble, canonical_cycle


@dataclass
class ClusterLabeling:
    """Partition of a region into maximal monochromatic connected clusters."""

    label_of: Dict[Cell, int]
    clusters: Dict[int, Tuple[int, FrozenSet[Cell]]]   # id -> (color, cells)

    def cluster_cells(self, label: int) -> FrozenSet[Cell]:
        return self.clusters[label][1]

    def cluster_color(self, label: int) -> int:
        return self.clusters[label][0]


def find_clusters(region: FrozenSet[Cell], coloring: Coloring) -> ClusterLabeling:
    """Connected components of each color under 6-neighbor adjacency."""
    label_of: Dict[Cell, int] = {}
    clusters: Dict[int, Tuple[int, FrozenSet[Cell]]] = {}
    next_label = 0
    for start in sorted(region):
        if start in label_of:
            continue
        color = coloring.color_of(start)
        members = []
        queue = deque([start])
        label_of[start] = next_label
        while queue:
            c = queue.popleft()
            members.append(c)
            for n in hex_neighbors(c):
                if n in region and n not in label_of and coloring.color_of(n) == color:
                    label_of[n] = next_label
                    queue.append(n)
        clusters[next_label] = (color, frozenset(members))
        next_label += 1
    return ClusterLabeling(label_of=label_of, clusters=clusters)


def filled_hull(cluster: FrozenSet[Cell]) -> FrozenSet[Cell]:
    """The cluster plus any finite components of its complement (its holes).

    Computed on the full lattice: flood the complement inward from a ring
    just outside the cluster's bounding box; whatever the flood cannot reach
    is a hole.
    """
    if not cluster:
        raise ValueError("cluster must be nonempty")
    qs = [q for q, _ in cluster]
    rs = [r for _, r in cluster]
    qlo, qhi = min(qs) - 1, max(qs) + 1
    rlo, rhi = min(rs) - 1, max(rs) + 1

    def in_box(c: Cell) -> bool:
        return qlo <= c[0] <= qhi and rlo <= c[1] <= rhi

    border: Set[Cell] = set()
    for q in range(qlo, qhi + 1):
        border.add((q, rlo))
        border.add((q, rhi))
    for r in range(rlo, rhi + 1):
        border.add((qlo, r))
        border.add((qhi, r))
    outside = {c for c in border if c not in cluster}
    queue = deque(outside)
    while queue:
        c = queue.popleft()
        for n in hex_neighbors(c):
            if in_box(n) and n not in cluster and n not in outside:
                outside.add(n)
                queue.append(n)
    holes = [
        (q, r)
        for q in range(qlo, qhi + 1)
        for r in range(rlo, rhi + 1)
        if (q, r) not in cluster and (q, r) not in outside
    ]
    return frozenset(cluster) | frozenset(holes)


def trace_outer_contour(cluster: FrozenSet[Cell]) -> Loop:
    """The closed edge cycle bounding the filled hull of a connected cluster."""
    hull = filled_hull(cluster)
    boundary: Set[Edge] = set()
    for c in hull:
        for k, n in enumerate(hex_neighbors(c)):
            if n not in hull:
                boundary.add(cell_edges(c)[k])
    adjacency: Dict[Vertex, List[Vertex]] = {}
    for u, v in boundary:
        adjacency.setdefault(u, []).append(v)
        adjacency.setdefault(v, []).append(u)
    for v, nbrs in adjacency.items():
        if len(nbrs) != 2:
            raise AssertionError(f"hull boundary is not a simple cycle at {v}")
    start = min(adjacency)
    cycle = [start]
    prev: Optional[Vertex] = None
    cur = start
    while True:
        a, b = adjacency[cur]
        nxt = b if a == prev else a
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
    if len(cycle) != len(boundary):
        raise AssertionError("hull boundary edges do not form a single cycle")
    return Loop(vertices=canonical_cycle(cycle))


def contour_length(cluster: FrozenSet[Cell]) -> int:
    """Perimeter edge count of the filled hull (independent of tracing)."""
    hull = filled_hull(cluster)
    count = 0
    for c in hull:
        for n in hex_neighbors(c):
            if n not in hull:
                count += 1
    return count


def cluster_touches_exterior(cluster: FrozenSet[Cell], region: FrozenSet[Cell]) -> bool:
    return any(n not in region for c in cluster for n in hex_neighbors(c))


def all_contours(region: FrozenSet[Cell], coloring: Coloring,
                 mesh: float = 1.0) -> LoopEnsemble:
    """Outer contours of every cluster that forms a closed boundary loop.

    The region is taken to be surrounded by blue, so blue clusters touching
    the exterior merge with that surrounding ocean and contribute no loop;
    every yellow cluster, and every blue cluster fully in the interior
    (equivalently: nested inside some yellow cluster), contributes exactly
    its hull's outer contour.
    """
    labeling = find_clusters(region, coloring)
    loops: List[Loop] = []
    for label, (color, cells) in sorted(labeling.clusters.items()):
        if color == BLUE and cluster_touches_exterior(cells, region):
            continue
        loops.append(trace_outer_contour(cells))
    ens = LoopEnsemble(loops=loops, mesh=mesh, seed=coloring.seed)
    return ens


def nesting_parent_labels(region: FrozenSet[Cell], coloring: Coloring) -> Dict[int, Optional[int]]:
    """Parent cluster of each cluster in the nesting forest (None = outermost).

    The external ring of a cluster's hull is monochromatic in the opposite
    color and connected, so the parent is simply the cluster of any ring cell
    (or None when the ring leaves the region).
    """
    labeling = find_clusters(region, coloring)
    parents: Dict[int, Optional[int]] = {}
    for label, (_color, cells) in labeling.clusters.items():
        hull = filled_hull(cells)
        ring = {n for c in hull for n in hex_neighbors(c) if n not in hull}
        if any(n not in region for n in ring):
            parents[label] = None
            continue
        ring_labels = {labeling.label_of[n] for n in ring}
        if len(ring_labels) != 1:
            raise AssertionError("hull ring spans several clusters")
        parents[label] = ring_labels.pop()
    return parents
