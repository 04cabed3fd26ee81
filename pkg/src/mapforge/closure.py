"""Closure of balanced blossoming trees into rooted simple maps, and opening.

The closure matches every blossom with the first later corner whose label is
one less (bracket matching along the contour), turns the stem into an edge to
that corner, attaches the unclosed blossoms to two new vertices ``A`` (label 2)
and ``B`` (label 3), and adds the edge ``{A, B}``.  The result comes with its
minimal orientation (stems point away from their owner, inner tree edges point
to the root, ``B -> A``) and the corner labelling λ*.

:func:`close_by_local_closures` builds the same map by repeatedly performing
local closures on the outer face; it is slow and serves as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels as K
from ._rng import make_rng
from .blossoming import BlossomingTree, MapFamily, balanced_corners, sample_blossoming_tree
from .planar_map import MapError, PlanarMap, is_minimal


class DomainError(ValueError):
    """Input outside the domain of the bijection (unbalanced tree, non-minimal orientation...)."""


@dataclass(frozen=True, eq=False)
class ClosureResult:
    map: PlanarMap
    lambda_star: np.ndarray
    vertex_A: int
    vertex_B: int
    tree: BlossomingTree
    tree_vertex_ids: np.ndarray
    """Map vertex of each inner vertex of the tree given to :func:`close`."""

    @property
    def orientation(self) -> np.ndarray:
        return self.map.orientation

    @property
    def family(self) -> MapFamily:
        return self.tree.family

    @cached_property
    def inner_corner_image(self) -> np.ndarray:
        """Map corner (half-edge) of each contour corner of the balanced tree;
        ``-1`` for blossom corners."""
        c_he, _, c_blossom, _, _, _ = self.tree.corners
        return np.where(c_blossom, -1, c_he)

    @cached_property
    def inner_edge_mask(self) -> np.ndarray:
        """``True`` for map edges that are inner edges of the tree."""
        mask = np.zeros(self.map.n_edges, dtype=bool)
        e_stem = self.tree.corners[3]
        mask[: e_stem.shape[0]] = ~e_stem
        return mask

    def to_dict(self) -> dict:
        data = self.map.to_dict()
        data.update(
            lambda_star=self.lambda_star.tolist(),
            A=int(self.vertex_A),
            B=int(self.vertex_B),
            tree_vertex_ids=self.tree_vertex_ids.tolist(),
            family=self.family.value,
        )
        return data


def _close_balanced(T: BlossomingTree) -> tuple[int, PlanarMap, np.ndarray]:
    c_he, c_vertex, c_blossom, e_stem, _, _ = T.corners
    status, vertex_of, next_cw, lam, orient = K.close_kernel(
        c_he, c_vertex, c_blossom, e_stem, T.labelling.labels, T.n
    )
    if status != K.OK:
        return status, None, None  # type: ignore[return-value]
    m = PlanarMap(next_cw, vertex_of, int(c_he[0]), orient, check=False)
    return status, m, lam


def close(T: BlossomingTree, corner: int | None = None, *, validate: bool = False) -> ClosureResult:
    """χ: close ``T`` re-planted at the balanced corner ``corner``.

    Without ``corner`` the tree must already be balanced at its root corner.
    """
    if corner is None:
        corner = 0
    corner = int(corner)
    if corner not in balanced_corners(T):
        raise DomainError(f"corner {corner} is not a balanced corner of the tree")
    if corner != 0:
        R, new_id = T.reroot(corner)
    else:
        R, new_id = T, np.arange(T.n, dtype=np.int64)
    status, m, lam = _close_balanced(R)
    if status != K.OK:
        raise AssertionError("closure of a balanced tree failed")
    if validate:
        m._validate()
    lam.setflags(write=False)
    return ClosureResult(m, lam, R.n, R.n + 1, R, new_id)


def close_marked(T: BlossomingTree, corner: int, marked: int) -> tuple[ClosureResult, int]:
    """χ•: closure at ``corner`` together with the image of the inner corner ``marked``."""
    c_blossom = T.corners[2]
    if c_blossom[marked]:
        raise DomainError("the marked corner must be an inner corner")
    res = close(T, corner)
    N = T.n_corners
    return res, int(res.inner_corner_image[(marked - corner) % N])


def sample_closure(n: int, family: MapFamily | str, seed=None) -> ClosureResult:
    """Uniform planted simple map with ``n`` inner tree vertices (``n + 2`` map
    vertices): a uniform blossoming tree closed at one of its two balanced
    corners, chosen uniformly."""
    rng = make_rng(seed)
    T = sample_blossoming_tree(n, family, rng)
    corners = balanced_corners(T)
    return close(T, corners[int(rng.integers(2))])


def open_map(m: PlanarMap, family: MapFamily | str, *, check_minimal: bool = True) -> tuple[BlossomingTree, np.ndarray]:
    """Inverse of the closure.

    ``m`` must carry its minimal orientation.  Returns the balanced tree and,
    for every vertex of ``m``, its preorder id in the tree (``-1`` for ``A``
    and ``B``).
    """
    family = MapFamily.parse(family)
    if m.orientation is None:
        raise DomainError("the map needs its minimal orientation")
    if check_minimal and not is_minimal(m):
        raise DomainError("orientation is not minimal")
    status, code, new_id = K.open_kernel(m.next_cw, m.vertex_of, m.orientation, m.root, m.n_vertices - 2)
    if status != K.OK:
        raise DomainError("opening did not produce a spanning tree")
    try:
        T = BlossomingTree(code, family)
    except ValueError as exc:
        raise DomainError(f"opening produced an invalid blossoming tree: {exc}") from None
    return T, new_id


# ---------------------------------------------------------------------------
# oracle: iterated local closures
# ---------------------------------------------------------------------------


def close_by_local_closures(T: BlossomingTree) -> PlanarMap:
    """Closure of a tree balanced at its root corner by iterated local closures.

    A stem whose blossom corner is followed, along the outer face, by ``k'``
    inner edges (``k' = 2`` for triangulations, 3 for quadrangulations) is
    closed onto the corner reached; this is repeated until no stem qualifies.
    The leftover stems go to ``A`` when they come before the second balanced
    corner and to ``B`` otherwise.  Half-edge ids agree with :func:`close`.
    """
    if 0 not in balanced_corners(T):
        raise DomainError("tree is not balanced at its root corner")
    c_he, c_vertex, c_blossom, e_stem, _, _ = T.corners
    run = 2 if T.family is MapFamily.TRIANGULATION else 3
    N = c_he.shape[0]
    m = N // 2
    n = T.n
    # rotation lists at inner vertices, outer face as a cyclic list
    rot: dict[int, list[int]] = {v: [] for v in range(n)}
    for i in range(N):
        if not c_blossom[i]:
            rot[int(c_vertex[i])].append(int(c_he[i]))
    face = [int(h) for h in c_he]
    open_stem = {e for e in range(m) if e_stem[e]}
    vertex = {int(c_he[i]): int(c_vertex[i]) for i in range(N)}

    def is_open_blossom_side(h: int) -> bool:
        return (h & 1) == 1 and (h >> 1) in open_stem

    changed = True
    while changed:
        changed = False
        L = len(face)
        for i in range(L):
            h = face[i]
            if h & 1 or (h >> 1) not in open_stem:
                continue
            if face[(i + 1) % L] != h + 1:
                continue
            seq = [face[(i + 2 + j) % L] for j in range(run + 1)]
            if any((g >> 1) in open_stem for g in seq[:run]):
                continue
            target = seq[run]
            if is_open_blossom_side(target):
                continue
            w = vertex[target]
            r = rot[w]
            r.insert(r.index(target), h + 1)
            vertex[h + 1] = w
            open_stem.discard(h >> 1)
            drop = {(i + 1 + j) % L for j in range(run + 1)}
            face = [g for j, g in enumerate(face) if j not in drop]
            changed = True
            break
    second = balanced_corners(T)[1]
    pos = {int(c_he[i]): i for i in range(N)}
    leftover = sorted((pos[2 * e + 1] for e in open_stem))
    to_a = [int(c_he[i]) for i in leftover if i < second]
    to_b = [int(c_he[i]) for i in leftover if i > second]
    ab = 2 * m
    rot[n] = list(reversed(to_a)) + [ab]
    rot[n + 1] = [ab + 1] + list(reversed(to_b))
    H = 2 * (m + 1)
    next_cw = np.full(H, -1, dtype=np.int64)
    vertex_of = np.full(H, -1, dtype=np.int64)
    for v, hs in rot.items():
        for j, h in enumerate(hs):
            next_cw[h] = hs[(j + 1) % len(hs)]
            vertex_of[h] = v
    if np.any(next_cw < 0):
        raise MapError("local closures left dangling half-edges")
    orient = np.ones(m + 1, dtype=np.int8)
    orient[:m][e_stem] = 0
    return PlanarMap(next_cw, vertex_of, int(c_he[0]), orient)
