"""Planted plane trees.

A planted plane tree is stored as a parent array together with the clockwise
order of the children of every vertex.  For a non-root vertex the clockwise
order starts right after the edge to the parent, which is the lexicographic
(Ulam–Harris) order.  For the root, the cyclic order of its children is
recorded starting from an arbitrary child and ``root_corner`` says how many
children to skip to reach the root corner: the lexicographic order at the root
is the clockwise order started ``root_corner`` positions in.

Vertex ids are dense integers ``0..|V|-1``; Ulam–Harris addresses are computed
on demand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K


class TreeError(ValueError):
    """Raised for malformed trees or violated preconditions."""


@dataclass(frozen=True, eq=False)
class PlantedPlaneTree:
    parent: np.ndarray
    child_order: tuple[tuple[int, ...], ...]
    root_corner: int = 0

    # -- construction -----------------------------------------------------
    def __post_init__(self) -> None:
        parent = np.asarray(self.parent, dtype=np.int64)
        object.__setattr__(self, "parent", parent)
        n = parent.shape[0]
        if n == 0:
            raise TreeError("a tree has at least one vertex")
        roots = np.flatnonzero(parent < 0)
        if roots.shape[0] != 1:
            raise TreeError(f"expected exactly one root, found {roots.shape[0]}")
        if np.any(parent >= n):
            raise TreeError("parent id out of range")
        if len(self.child_order) != n:
            raise TreeError("child_order must list the children of every vertex")
        seen = np.zeros(n, dtype=bool)
        for v, kids in enumerate(self.child_order):
            for c in kids:
                if not 0 <= c < n or parent[c] != v or seen[c]:
                    raise TreeError(f"child_order[{v}] is inconsistent with parent")
                seen[c] = True
        if int(seen.sum()) != n - 1:
            raise TreeError("child_order misses some children")
        root = int(roots[0])
        deg_root = len(self.child_order[root])
        if deg_root == 0:
            if self.root_corner != 0:
                raise TreeError("root_corner must be 0 for a single vertex")
        elif not 0 <= self.root_corner < deg_root:
            raise TreeError("root_corner out of range")
        # acyclicity: every vertex must be reached from the root
        order, _ = K.preorder_walk(*self._csr_from(root), root, n)
        if np.unique(order).shape[0] != n:
            raise TreeError("parent array contains a cycle")

    def _csr_from(self, root: int) -> tuple[np.ndarray, np.ndarray]:
        n = self.parent.shape[0]
        ptr = np.zeros(n + 1, dtype=np.int64)
        idx: list[int] = []
        for v in range(n):
            kids = list(self.child_order[v])
            if v == root and kids:
                kids = kids[self.root_corner:] + kids[: self.root_corner]
            idx.extend(kids)
            ptr[v + 1] = len(idx)
        return ptr, np.asarray(idx, dtype=np.int64)

    @classmethod
    def from_parent(
        cls,
        parent: Sequence[int],
        child_order: Sequence[Sequence[int]] | None = None,
        root_corner: int = 0,
    ) -> "PlantedPlaneTree":
        """Build a tree; without ``child_order`` children are ordered by id."""
        parent = np.asarray(parent, dtype=np.int64)
        if child_order is None:
            kids: list[list[int]] = [[] for _ in range(parent.shape[0])]
            for v, p in enumerate(parent.tolist()):
                if p >= 0:
                    if p >= parent.shape[0]:
                        raise TreeError("parent id out of range")
                    kids[p].append(v)
            child_order = kids
        return cls(parent, tuple(tuple(int(c) for c in k) for k in child_order), int(root_corner))

    @classmethod
    def from_children(cls, children: Sequence[Sequence[int]], root: int = 0) -> "PlantedPlaneTree":
        """Build from lexicographic child lists (root corner before the first child)."""
        parent = np.full(len(children), -1, dtype=np.int64)
        for v, kids in enumerate(children):
            for c in kids:
                if parent[c] != -1 or c == root:
                    raise TreeError(f"vertex {c} has two parents")
                parent[c] = v
        return cls(parent, tuple(tuple(int(c) for c in k) for k in children), 0)

    @classmethod
    def single_vertex(cls) -> "PlantedPlaneTree":
        return cls(np.array([-1]), ((),), 0)

    # -- basic accessors ----------------------------------------------------
    @property
    def n(self) -> int:
        return int(self.parent.shape[0])

    @cached_property
    def root(self) -> int:
        return int(np.flatnonzero(self.parent < 0)[0])

    @cached_property
    def lex_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Children of each vertex in lexicographic order, as CSR arrays."""
        return self._csr_from(self.root)

    def children(self, v: int) -> list[int]:
        ptr, idx = self.lex_csr
        return idx[ptr[v] : ptr[v + 1]].tolist()

    def degree(self, v: int) -> int:
        return len(self.child_order[v]) + (0 if v == self.root else 1)

    @cached_property
    def _preorder(self) -> tuple[np.ndarray, np.ndarray]:
        ptr, idx = self.lex_csr
        return K.preorder_walk(ptr, idx, self.root, self.n)

    @property
    def preorder(self) -> np.ndarray:
        """Vertices in lexicographic order."""
        return self._preorder[0]

    @property
    def depth(self) -> np.ndarray:
        return self._preorder[1]

    @property
    def height(self) -> int:
        return int(self.depth.max())

    def subtree_sizes(self) -> np.ndarray:
        size = np.ones(self.n, dtype=np.int64)
        for v in self.preorder[::-1]:
            p = self.parent[v]
            if p >= 0:
                size[p] += size[v]
        return size

    # -- Ulam-Harris ----------------------------------------------------------
    def ulam_harris(self, v: int) -> tuple[int, ...]:
        """Address of ``v``: child ranks (1-based) along the root-to-``v`` path."""
        path: list[int] = []
        while self.parent[v] >= 0:
            p = int(self.parent[v])
            path.append(self.children(p).index(v) + 1)
            v = p
        return tuple(reversed(path))

    def addresses(self) -> list[tuple[int, ...]]:
        ptr, idx = self.lex_csr
        addr: list[tuple[int, ...]] = [()] * self.n
        for v in self.preorder.tolist():
            for r, c in enumerate(idx[ptr[v] : ptr[v + 1]].tolist(), start=1):
                addr[c] = addr[v] + (r,)
        return addr

    @classmethod
    def from_ulam_harris(cls, addresses: Iterable[Sequence[int]]) -> "PlantedPlaneTree":
        """Rebuild the tree from its address set; vertex ids follow lexicographic order."""
        addrs = sorted({tuple(a) for a in addresses})
        if not addrs or addrs[0] != ():
            raise TreeError("the address set must contain the root ()")
        pos = {a: i for i, a in enumerate(addrs)}
        children: list[list[int]] = [[] for _ in addrs]
        for a in addrs[1:]:
            if a[:-1] not in pos or any(x < 1 for x in a):
                raise TreeError(f"address {a} has no parent in the set")
            if a[-1] > 1 and a[:-1] + (a[-1] - 1,) not in pos:
                raise TreeError(f"address {a} has no elder sibling in the set")
            children[pos[a[:-1]]].append(pos[a])
        return cls.from_children(children)

    # -- canonical form / serialisation ---------------------------------------------
    def relabel_lex(self) -> tuple["PlantedPlaneTree", np.ndarray]:
        """Isomorphic copy with ids in lexicographic order, plus ``new_id``."""
        order = self.preorder
        new_id = np.empty(self.n, dtype=np.int64)
        new_id[order] = np.arange(self.n)
        ptr, idx = self.lex_csr
        children = [new_id[idx[ptr[v] : ptr[v + 1]]].tolist() for v in order.tolist()]
        return PlantedPlaneTree.from_children(children), new_id

    def shape_code(self) -> str:
        """Parenthesis word of the planted tree (equal iff isomorphic)."""
        ptr, idx = self.lex_csr
        visits, _ = K.contour_walk(ptr, idx, self.root, self.n)
        depth = self.depth[visits]
        return "".join("(" if d > 0 else ")" for d in np.diff(depth))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PlantedPlaneTree):
            return NotImplemented
        return (
            self.root_corner == other.root_corner
            and np.array_equal(self.parent, other.parent)
            and self.child_order == other.child_order
        )

    __hash__ = None  # type: ignore[assignment]

    def to_dict(self) -> dict:
        return {
            "parent": self.parent.tolist(),
            "child_order": [list(k) for k in self.child_order],
            "root_corner": int(self.root_corner),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "PlantedPlaneTree":
        try:
            return cls.from_parent(data["parent"], data["child_order"], data.get("root_corner", 0))
        except KeyError as exc:
            raise TreeError(f"missing field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, text: str) -> "PlantedPlaneTree":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ContourSequence:
    """Contour exploration ``r(0..2|V|-2)``.

    ``visits`` includes the closing return to the root, so it has ``2|V| - 1``
    entries (a single vertex gives ``[root]``).  ``corner_at[i]`` identifies the
    corner of ``visits[i]`` used at step ``i`` as ``corner_offset[v] + rank``,
    where corners of a vertex are ranked in contour order.
    """

    visits: np.ndarray
    corner_at: np.ndarray
    corner_offset: np.ndarray

    @property
    def steps(self) -> int:
        return int(self.visits.shape[0] - 1)

    def first_visit(self) -> np.ndarray:
        n = self.corner_offset.shape[0] - 1
        first = np.full(n, -1, dtype=np.int64)
        # reversed assignment keeps the smallest index
        first[self.visits[::-1]] = np.arange(self.visits.shape[0] - 1, -1, -1)
        return first


def contour_exploration(tree: PlantedPlaneTree) -> ContourSequence:
    ptr, idx = tree.lex_csr
    visits, rank = K.contour_walk(ptr, idx, tree.root, tree.n)
    deg = np.diff(ptr)
    deg = deg + (np.arange(tree.n) != tree.root)
    deg = np.maximum(deg, 1)  # the lone vertex still has its (empty) corner
    offset = np.zeros(tree.n + 1, dtype=np.int64)
    np.cumsum(deg, out=offset[1:])
    return ContourSequence(visits, offset[visits] + rank, offset)


def _vertex_set(tree: PlantedPlaneTree, R: Iterable[int]) -> np.ndarray:
    mask = np.zeros(tree.n, dtype=bool)
    for v in R:
        v = int(v)
        if not 0 <= v < tree.n:
            raise TreeError(f"vertex {v} is not in the tree")
        mask[v] = True
    return mask


@dataclass(frozen=True)
class SubTree:
    """A tree extracted from a larger one; ``origin[i]`` is the original id of ``i``."""

    tree: PlantedPlaneTree
    origin: np.ndarray


def reduced_tree(tree: PlantedPlaneTree, R: Iterable[int]) -> SubTree:
    """Tree on ``R`` joining each vertex to its nearest proper ancestor in ``R``.

    New ids follow the lexicographic order of ``R`` inside ``tree``.
    """
    mask = _vertex_set(tree, R)
    if not mask[tree.root]:
        raise TreeError("the root must belong to R")
    order = tree.preorder
    origin = order[mask[order]]
    new_id = np.full(tree.n, -1, dtype=np.int64)
    new_id[origin] = np.arange(origin.shape[0])
    anc = np.full(tree.n, -1, dtype=np.int64)  # nearest R-ancestor-or-self
    children: list[list[int]] = [[] for _ in range(origin.shape[0])]
    for v in order.tolist():
        p = tree.parent[v]
        up = anc[p] if p >= 0 else -1
        if mask[v]:
            if up >= 0:
                children[new_id[up]].append(int(new_id[v]))
            anc[v] = v
        else:
            anc[v] = up
    return SubTree(PlantedPlaneTree.from_children(children), origin)


def spanned_subtree(tree: PlantedPlaneTree, R: Iterable[int]) -> SubTree:
    """Union of the tree paths between vertices of ``R``, with its plane structure.

    The result is planted at the most recent common ancestor of ``R``.
    """
    mask = _vertex_set(tree, R)
    total = int(mask.sum())
    if total == 0:
        raise TreeError("R must be non-empty")
    cnt = mask.astype(np.int64)
    order = tree.preorder
    for v in order[::-1].tolist():
        p = tree.parent[v]
        if p >= 0:
            cnt[p] += cnt[v]
    depth = tree.depth
    full = np.flatnonzero(cnt == total)
    top = int(full[np.argmax(depth[full])])
    size = tree.subtree_sizes()
    pos = np.empty(tree.n, dtype=np.int64)
    pos[order] = np.arange(tree.n)
    block = order[pos[top] : pos[top] + size[top]]
    keep = block[cnt[block] >= 1]
    new_id = np.full(tree.n, -1, dtype=np.int64)
    new_id[keep] = np.arange(keep.shape[0])
    children: list[list[int]] = [[] for _ in range(keep.shape[0])]
    for v in keep[1:].tolist():
        children[new_id[tree.parent[v]]].append(int(new_id[v]))
    return SubTree(PlantedPlaneTree.from_children(children), keep)
