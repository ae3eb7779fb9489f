"""Interval meshes aligned to the potential breakpoints and their tensor-grid
triangulations of the configuration square.

The 2D mesh splits every grid cell along the cut parallel to the main diagonal,
so cells sitting on x1 = x2 contribute element edges lying exactly on the
diagonal. That alignment is what makes the contact line measure and the
hard-core diagonal node exact at the discrete level.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MeshResolutionError
from .model import PotentialSpec

NODE_INTERIOR = "interior"
NODE_BOUNDARY = "outer_boundary"
NODE_DIAGONAL = "diagonal"


@dataclass(frozen=True)
class Mesh1D:
    """Sorted node coordinates on [0, L]; elements are consecutive node pairs."""

    nodes: np.ndarray

    def __post_init__(self):
        if not np.all(np.diff(self.nodes) > 0):
            raise ValueError("mesh nodes must be strictly increasing")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def elements(self) -> np.ndarray:
        idx = np.arange(self.n_nodes - 1)
        return np.column_stack([idx, idx + 1])

    @property
    def boundary_nodes(self) -> tuple[int, int]:
        return (0, self.n_nodes - 1)

    @property
    def length(self) -> float:
        return float(self.nodes[-1] - self.nodes[0])


def build_1d_mesh(
    spec: PotentialSpec,
    h: float,
    isolated_left: bool = False,
    include_region_split: bool = False,
) -> Mesh1D:
    """Uniformly subdivide each flat segment of the potential with size <= h.

    ``isolated_left`` restricts the domain to the left well [0, well_length]
    (the infinite-barrier limit). ``include_region_split`` adds the barrier
    midpoint as an extra breakpoint so region-overlap assembly is exact; it is
    off by default to keep the minimal breakpoint set {0, l, l+b, 2l+b}.
    """
    if h <= 0:
        raise MeshResolutionError("element size h must be positive")
    if h > spec.well_length:
        raise MeshResolutionError(
            f"element size h={h} cannot resolve a well of length {spec.well_length}"
        )
    if isolated_left:
        breakpoints = [0.0, spec.well_length]
    else:
        breakpoints = [0.0, spec.well_length]
        if spec.barrier_width > 0:
            if include_region_split:
                breakpoints.append(spec.midpoint)
            breakpoints.append(spec.well_length + spec.barrier_width)
        breakpoints.append(spec.total_length)
    nodes = [breakpoints[0]]
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        n_el = max(1, int(np.ceil((b - a) / h - 1e-12)))
        nodes.extend(np.linspace(a, b, n_el + 1)[1:])
    return Mesh1D(nodes=np.asarray(nodes))


@dataclass(frozen=True)
class Mesh2D:
    """Conforming triangulation of the configuration square.

    Nodes are the tensor grid of the 1D mesh with itself, id = a * n + b for
    1D indices (a, b). Triangles are positively oriented index triples.
    ``exchange_map`` sends each node to its mirror under (x1, x2) -> (x2, x1).
    """

    grid: Mesh1D
    nodes: np.ndarray          # (N, 2) coordinates
    triangles: np.ndarray      # (T, 3) node ids, counterclockwise
    node_class: np.ndarray     # (N,) strings: interior / outer_boundary / diagonal
    diagonal_edges: np.ndarray  # (D, 2) node ids along x1 = x2
    exchange_map: np.ndarray   # (N,) node id of the mirrored node
    is_boundary: np.ndarray = field(repr=False, default=None)
    is_diagonal: np.ndarray = field(repr=False, default=None)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def node_id(self, a: int, b: int) -> int:
        return a * self.grid.n_nodes + b

    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )


def build_2d_mesh(m: Mesh1D) -> Mesh2D:
    """Tensor-product triangulation of ``m`` with itself, every cell split
    along the lower-left -> upper-right cut (parallel to x1 = x2)."""
    n = m.n_nodes
    x = m.nodes
    a_idx, b_idx = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    nodes = np.column_stack([x[a_idx.ravel()], x[b_idx.ravel()]])

    ca, cb = np.meshgrid(np.arange(n - 1), np.arange(n - 1), indexing="ij")
    ca, cb = ca.ravel(), cb.ravel()
    v00 = ca * n + cb
    v10 = (ca + 1) * n + cb
    v01 = ca * n + cb + 1
    v11 = (ca + 1) * n + cb + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.vstack([lower, upper])

    a_flat, b_flat = a_idx.ravel(), b_idx.ravel()
    on_boundary = (a_flat == 0) | (a_flat == n - 1) | (b_flat == 0) | (b_flat == n - 1)
    on_diagonal = a_flat == b_flat
    node_class = np.full(n * n, NODE_INTERIOR, dtype="<U14")
    node_class[on_boundary] = NODE_BOUNDARY
    node_class[on_diagonal] = NODE_DIAGONAL

    d = np.arange(n - 1)
    diagonal_edges = np.column_stack([d * n + d, (d + 1) * n + d + 1])
    exchange_map = b_flat * n + a_flat
    return Mesh2D(
        grid=m,
        nodes=nodes,
        triangles=triangles,
        node_class=node_class,
        diagonal_edges=diagonal_edges,
        exchange_map=exchange_map,
        is_boundary=on_boundary,
        is_diagonal=on_diagonal,
    )


def dump_mesh_csv(mesh: Mesh2D, directory) -> None:
    """Write node and triangle tables for external inspection."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "nodes.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "x1", "x2", "class"])
        for i, ((x1, x2), cls) in enumerate(zip(mesh.nodes, mesh.node_class)):
            w.writerow([i, repr(float(x1)), repr(float(x2)), cls])
    with open(out / "triangles.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "v0", "v1", "v2"])
        for i, tri in enumerate(mesh.triangles):
            w.writerow([i, *map(int, tri)])
