"""Planar maps as rotation systems on half-edges.

Half-edges are integers; ``h ^ 1`` is the twin of ``h`` and edge ``e`` is the
pair ``{2e, 2e + 1}``.  ``next_cw[h]`` is the half-edge following ``h``
clockwise around its origin ``vertex_of[h]``.  The corner *of* ``h`` is the
angular sector at ``vertex_of[h]`` between ``prev_cw(h)`` and ``h``; corners
and half-edges are thus in bijection.  Following a face keeps it on the left:
after ``h`` comes ``next_cw[h ^ 1]``, and the face walk through ``h`` contains
the corner of ``h``.  So for ``h = u -> w``, ``h`` is the corner ``κ^ℓ(u, w)``
and ``next_cw[h]`` is ``κ^r(u, w)``.

An orientation is one bit per edge: edge ``e`` is directed along half-edge
``2e + bit``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from . import _kernels as K
from .blossoming import MapFamily


class MapError(ValueError):
    """Malformed rotation system or a map outside the expected class."""


class GenusError(MapError):
    def __init__(self, genus: float, euler: int) -> None:
        super().__init__(f"rotation system has Euler characteristic {euler} (genus {genus:g}), not a sphere")
        self.genus = genus
        self.euler = euler


class PlanarMap:
    """Rooted planar map; immutable once built."""

    def __init__(self, next_cw, vertex_of, root: int, orientation=None, *, check: bool = True) -> None:
        self.next_cw = np.ascontiguousarray(next_cw, dtype=np.int64)
        self.vertex_of = np.ascontiguousarray(vertex_of, dtype=np.int64)
        self.root = int(root)
        self.orientation = None if orientation is None else np.ascontiguousarray(orientation, dtype=np.int8)
        for arr in (self.next_cw, self.vertex_of, self.orientation):
            if arr is not None:
                arr.setflags(write=False)
        if check:
            self._validate()

    def _validate(self) -> None:
        H = self.next_cw.shape[0]
        if H == 0 or H % 2:
            raise MapError("the number of half-edges must be even and positive")
        if self.vertex_of.shape[0] != H:
            raise MapError("vertex_of must have one entry per half-edge")
        if not 0 <= self.root < H:
            raise MapError("root half-edge out of range")
        if np.any(self.next_cw < 0) or np.any(self.next_cw >= H):
            raise MapError("next_cw entries out of range")
        if np.unique(self.next_cw).shape[0] != H:
            raise MapError("next_cw is not a permutation")
        if np.any(self.vertex_of[self.next_cw] != self.vertex_of):
            raise MapError("next_cw moves a half-edge to another vertex")
        nv = int(self.vertex_of.max()) + 1
        if np.any(self.vertex_of < 0) or np.unique(self.vertex_of).shape[0] != nv:
            raise MapError("vertex ids must be 0..V-1 with every vertex used")
        if K.vertex_orbit_count(self.next_cw) != nv:
            raise MapError("some vertex carries more than one rotation cycle")
        if self.orientation is not None:
            if self.orientation.shape[0] != H // 2 or not np.isin(self.orientation, (0, 1)).all():
                raise MapError("orientation must hold one bit per edge")
        if not self._connected():
            raise MapError("map is not connected")
        euler = self.n_vertices - self.n_edges + self.n_faces
        if euler != 2:
            raise GenusError((2 - euler) / 2, euler)

    def _connected(self) -> bool:
        ptr, nbr, _ = self.adjacency
        return bool(np.all(K.bfs(ptr, nbr, int(self.vertex_of[self.root])) >= 0))

    # -- sizes ---------------------------------------------------------------------
    @property
    def n_half_edges(self) -> int:
        return int(self.next_cw.shape[0])

    @property
    def n_edges(self) -> int:
        return self.n_half_edges // 2

    @cached_property
    def n_vertices(self) -> int:
        return int(self.vertex_of.max()) + 1

    @cached_property
    def _faces(self) -> tuple[np.ndarray, int]:
        face, nf = K.face_orbits(self.next_cw)
        return face, int(nf)

    @property
    def face_of(self) -> np.ndarray:
        return self._faces[0]

    @property
    def n_faces(self) -> int:
        return self._faces[1]

    @cached_property
    def prev_cw(self) -> np.ndarray:
        prev = np.empty_like(self.next_cw)
        prev[self.next_cw] = np.arange(self.n_half_edges)
        return prev

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR ``(ptr, neighbour, half_edge)`` with neighbours sorted by id."""
        return K.adjacency_csr(self.vertex_of, int(self.vertex_of.max()) + 1)

    def head(self, h: int) -> int:
        return int(self.vertex_of[h ^ 1])

    def face_next(self, h: int) -> int:
        return int(self.next_cw[h ^ 1])

    @cached_property
    def _first_half_edge(self) -> np.ndarray:
        first = np.empty(self.n_vertices, dtype=np.int64)
        # reversed assignment keeps the smallest id
        first[self.vertex_of[::-1]] = np.arange(self.n_half_edges - 1, -1, -1)
        return first

    def rotation(self, v: int) -> list[int]:
        """Half-edges out of ``v`` in clockwise order (starting at the smallest id)."""
        start = int(self._first_half_edge[v])
        out = [start]
        h = int(self.next_cw[start])
        while h != start:
            out.append(h)
            h = int(self.next_cw[h])
        return out

    def degrees(self) -> np.ndarray:
        return np.bincount(self.vertex_of, minlength=self.n_vertices)

    def face_degrees(self) -> np.ndarray:
        return np.bincount(self.face_of, minlength=self.n_faces)

    def is_simple(self) -> bool:
        u = self.vertex_of[0::2]
        w = self.vertex_of[1::2]
        if np.any(u == w):
            return False
        pairs = np.minimum(u, w) * self.n_vertices + np.maximum(u, w)
        return np.unique(pairs).shape[0] == pairs.shape[0]

    def is_angulation(self, degree: int) -> bool:
        return bool(np.all(self.face_degrees() == degree))

    # -- root face -------------------------------------------------------------------
    def root_face_vertices(self) -> list[int]:
        """Vertices of the root face starting at the root vertex, in walk order."""
        out = []
        h = self.root
        while True:
            out.append(int(self.vertex_of[h]))
            h = self.face_next(h)
            if h == self.root:
                return out

    def special_vertices(self) -> dict[str, int]:
        """``v`` (root vertex), ``A`` (head of the root), ``B`` and, for a
        quadrangle root face, ``w``, following the root face."""
        verts = self.root_face_vertices()
        names = dict(v=verts[0], A=verts[1], B=verts[2])
        if len(verts) >= 4:
            names["w"] = verts[3]
        return names

    # -- orientation helpers ---------------------------------------------------------------
    def with_orientation(self, orientation) -> "PlanarMap":
        return PlanarMap(self.next_cw, self.vertex_of, self.root, orientation, check=False)

    def directed(self, orientation=None) -> np.ndarray:
        """Boolean mask over half-edges: ``True`` when the half-edge is the directed one."""
        ori = self.orientation if orientation is None else np.asarray(orientation, dtype=np.int8)
        if ori is None:
            raise MapError("map has no orientation")
        mask = np.zeros(self.n_half_edges, dtype=bool)
        mask[2 * np.arange(self.n_edges) + ori] = True
        return mask

    def outdegrees(self, orientation=None) -> np.ndarray:
        return np.bincount(self.vertex_of[self.directed(orientation)], minlength=self.n_vertices)

    # -- canonical form and serialisation -----------------------------------------------------
    def canonical_form(self) -> tuple[np.ndarray, np.ndarray | None]:
        """Relabelling-invariant description of the rooted (oriented) map."""
        label, table = K.canonical_relabel(self.next_cw, self.root)
        if table.shape[0] != self.n_half_edges:
            raise MapError("map is not connected")
        ori = None
        if self.orientation is not None:
            order = np.empty(self.n_half_edges, dtype=np.int64)
            order[label] = np.arange(self.n_half_edges)
            ori = self.directed()[order]
        return table, ori

    def same_as(self, other: "PlanarMap", *, orientation: bool = True) -> bool:
        """Rooted-map isomorphism (optionally respecting orientations)."""
        if self.n_half_edges != other.n_half_edges:
            return False
        t1, o1 = self.canonical_form()
        t2, o2 = other.canonical_form()
        if not np.array_equal(t1, t2):
            return False
        if orientation and (o1 is not None or o2 is not None):
            return o1 is not None and o2 is not None and np.array_equal(o1, o2)
        return True

    def canonical_key(self) -> bytes:
        table, _ = self.canonical_form()
        return table.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PlanarMap):
            return NotImplemented
        same_ori = (self.orientation is None and other.orientation is None) or (
            self.orientation is not None and other.orientation is not None
            and np.array_equal(self.orientation, other.orientation)
        )
        return (self.root == other.root and same_ori
                and np.array_equal(self.next_cw, other.next_cw)
                and np.array_equal(self.vertex_of, other.vertex_of))

    __hash__ = None  # type: ignore[assignment]

    def to_dict(self) -> dict:
        data = {
            "n_half_edges": self.n_half_edges,
            "next_cw": self.next_cw.tolist(),
            "vertex_of": self.vertex_of.tolist(),
            "root_half_edge": self.root,
        }
        if self.orientation is not None:
            data["orientation"] = self.orientation.tolist()
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "PlanarMap":
        for key in ("n_half_edges", "next_cw", "vertex_of", "root_half_edge"):
            if key not in data:
                raise MapError(f"missing field {key!r}")
        if len(data["next_cw"]) != data["n_half_edges"]:
            raise MapError("n_half_edges does not match next_cw")
        return cls(data["next_cw"], data["vertex_of"], data["root_half_edge"], data.get("orientation"))


def build_map(rotation: Sequence[Sequence[int]], root: int, orientation=None) -> PlanarMap:
    """Build a map from the clockwise list of outgoing half-edges at each vertex.

    Every half-edge id in ``0..H-1`` must appear exactly once; twins are
    ``h ^ 1``.
    """
    H = sum(len(r) for r in rotation)
    next_cw = np.full(H, -1, dtype=np.int64)
    vertex_of = np.full(H, -1, dtype=np.int64)
    for v, hs in enumerate(rotation):
        for i, h in enumerate(hs):
            if not 0 <= h < H or vertex_of[h] >= 0:
                raise MapError(f"half-edge {h} is out of range or listed twice")
            vertex_of[h] = v
            next_cw[h] = hs[(i + 1) % len(hs)]
    if np.any(vertex_of < 0):
        raise MapError("some half-edge has no twin")
    return PlanarMap(next_cw, vertex_of, root, orientation)


# ---------------------------------------------------------------------------
# orientations
# ---------------------------------------------------------------------------


def expected_outdegrees(m: PlanarMap, family: MapFamily | str) -> np.ndarray:
    """Outdegree prescription: 3 (tri) / 2 (quad) everywhere, root face special."""
    family = MapFamily.parse(family)
    sv = m.special_vertices()
    if family is MapFamily.TRIANGULATION:
        alpha = np.full(m.n_vertices, 3, dtype=np.int64)
        alpha[sv["v"]], alpha[sv["A"]], alpha[sv["B"]] = 2, 0, 1
    else:
        alpha = np.full(m.n_vertices, 2, dtype=np.int64)
        alpha[sv["v"]], alpha[sv["A"]], alpha[sv["B"]] = 1, 0, 1
        if "w" in sv:
            alpha[sv["w"]] = 2
    return alpha


@dataclass(frozen=True)
class OrientationReport:
    ok: bool
    outdegree: np.ndarray
    expected: np.ndarray
    offending: np.ndarray


def check_orientation(m: PlanarMap, orientation, family: MapFamily | str) -> OrientationReport:
    ori = np.asarray(orientation, dtype=np.int8)
    if ori.shape[0] != m.n_edges:
        raise MapError("orientation must cover every edge")
    out = m.outdegrees(ori)
    exp = expected_outdegrees(m, family)
    bad = np.flatnonzero(out != exp)
    return OrientationReport(bad.shape[0] == 0, out, exp, bad)


def is_minimal(m: PlanarMap, orientation=None) -> bool:
    """No counterclockwise directed cycle.

    Equivalently every face can be reached from the root face by only crossing
    directed edges from their left side to their right side.
    """
    ori = m.orientation if orientation is None else np.asarray(orientation, dtype=np.int8)
    if ori is None:
        raise MapError("map has no orientation")
    dist = K.dual_potential(m.face_of, m.n_faces, ori, int(m.face_of[m.root]))
    return bool(np.all(dist == 0))


def minimal_orientation(m: PlanarMap, family: MapFamily | str) -> np.ndarray:
    """The unique minimal α-orientation of a simple rooted triangulation/quadrangulation.

    A first α-orientation comes from a bipartite max-flow (edges send one unit
    to the endpoint they leave; vertex ``v`` absorbs ``α(v)``).  Then a 0-1
    breadth-first search over faces computes, for each face, the least number
    of edges that must be crossed right-to-left to reach it from the root face;
    reversing exactly the edges whose two sides get different values removes
    every counterclockwise cycle while keeping all outdegrees.
    """
    family = MapFamily.parse(family)
    if not m.is_simple():
        raise MapError("map is not simple")
    if not m.is_angulation(family.face_degree):
        raise MapError(f"not every face has degree {family.face_degree}")
    alpha = expected_outdegrees(m, family)
    E, V = m.n_edges, m.n_vertices
    if int(alpha.sum()) != E:
        raise MapError("outdegree prescription does not sum to the number of edges")
    src, sink = 0, 1 + E + V
    tails = m.vertex_of[0::2]
    heads = m.vertex_of[1::2]
    edges = np.arange(E)
    rows = np.concatenate([np.zeros(E, dtype=np.int64), 1 + edges, 1 + edges, 1 + E + np.arange(V)])
    cols = np.concatenate([1 + edges, 1 + E + tails, 1 + E + heads, np.full(V, sink)])
    caps = np.concatenate([np.ones(3 * E, dtype=np.int32), alpha.astype(np.int32)])
    graph = csr_matrix((caps, (rows, cols)), shape=(sink + 1, sink + 1))
    res = maximum_flow(graph, src, sink)
    if res.flow_value != E:
        raise MapError("no orientation with the prescribed outdegrees exists")
    flow = res.flow.tocsr()
    from_tail = np.asarray(flow[1 + edges, 1 + E + tails]).ravel()
    ori = np.where(from_tail > 0, 0, 1).astype(np.int8)
    dist = K.dual_potential(m.face_of, m.n_faces, ori, int(m.face_of[m.root]))
    directed = 2 * edges + ori
    left = dist[m.face_of[directed]]
    right = dist[m.face_of[directed ^ 1]]
    ori = np.where(left != right, 1 - ori, ori).astype(np.int8)
    return ori
