"""Blossoming trees, their corner labelling, balanced rootings and the
bijection with validly labelled plane trees.

A blossoming tree is a plane tree in which every inner vertex carries ``k``
leaves called blossoms (``k = 2`` for triangulations, ``k = 1`` for
quadrangulations), attached by edges called stems.  Internally a planted
blossoming tree is its contour *code*: one symbol per step of the contour
walk, ``STEM`` for a stem (walked out and back), ``DOWN`` for an inner edge
walked away from the root and ``UP`` for an inner edge walked back.  The code
determines the planted tree, and every code of the right shape is one, so
distinct planted trees are distinct codes.

Corners are indexed by their position in the contour, starting from the root
corner.  See :mod:`mapforge._kernels` for the edge and half-edge numbering.
"""

from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterator

import numpy as np

from . import _kernels as K
from ._rng import make_rng
from .plane_tree import PlantedPlaneTree, TreeError

STEM, DOWN, UP = K.STEM, K.DOWN, K.UP

DEFAULT_GUARD_N = 8


class GuardError(RuntimeError):
    """Raised when an exhaustive computation exceeds the size guard."""


class ValidityError(ValueError):
    """Raised for labellings that are not valid displacement vectors."""


class MapFamily(enum.Enum):
    TRIANGULATION = "tri"
    QUADRANGULATION = "quad"

    @classmethod
    def parse(cls, value: "MapFamily | str") -> "MapFamily":
        if isinstance(value, MapFamily):
            return value
        key = str(value).strip().lower()
        aliases = {"tri": cls.TRIANGULATION, "triangulation": cls.TRIANGULATION,
                   "quad": cls.QUADRANGULATION, "quadrangulation": cls.QUADRANGULATION}
        if key not in aliases:
            raise ValueError(f"unknown map family {value!r} (expected 'tri' or 'quad')")
        return aliases[key]

    @property
    def k(self) -> int:
        """Stems per inner vertex."""
        return 2 if self is MapFamily.TRIANGULATION else 1

    @property
    def stem_step(self) -> int:
        """Label increase when the contour returns from a blossom."""
        return 1 if self is MapFamily.TRIANGULATION else 2

    @property
    def face_degree(self) -> int:
        return 3 if self is MapFamily.TRIANGULATION else 4

    @property
    def alphabet(self) -> tuple[int, ...]:
        return (-1, 0, 1) if self is MapFamily.TRIANGULATION else (-1, 1)

    @property
    def geometric_p(self) -> Fraction:
        """Success parameter p of the geometric law P(G = c) = p (1 - p)^c."""
        return Fraction(3, 4) if self is MapFamily.TRIANGULATION else Fraction(2, 3)

    @property
    def min_inner(self) -> int:
        """Smallest number of inner vertices giving a simple map."""
        return 1 if self is MapFamily.TRIANGULATION else 2

    # proposal used by the size-biased rejection sampler: a geometric law with
    # ratio rho, accepted with probability C(g + k, k) (q / rho)^g / ceiling
    @property
    def proposal_ratio(self) -> Fraction:
        return Fraction(1, 2) if self is MapFamily.TRIANGULATION else Fraction(2, 3)

    @property
    def acceptance_ceiling(self) -> Fraction:
        return Fraction(3, 2) if self is MapFamily.TRIANGULATION else Fraction(1)


# ---------------------------------------------------------------------------
# offspring law
# ---------------------------------------------------------------------------


def offspring_pmf(family: MapFamily | str, c: int) -> Fraction:
    """Exact P(B = c): the geometric law size-biased by C(c + k, k).

    This is the negative binomial law with ``k + 1`` trials, so
    ``P(B = c) = C(c + k, k) p^(k+1) q^c`` with ``q = 1 - p``.
    """
    family = MapFamily.parse(family)
    if c < 0:
        return Fraction(0)
    p = family.geometric_p
    q = 1 - p
    return comb(c + family.k, family.k) * p ** (family.k + 1) * q**c


def _acceptance_weight(family: MapFamily, g: int) -> Fraction:
    ratio = (1 - family.geometric_p) / family.proposal_ratio
    return comb(g + family.k, family.k) * ratio**g / family.acceptance_ceiling


def construction_pmf(family: MapFamily | str, c: int) -> Fraction:
    """Law of the output of the rejection sampler, in exact arithmetic.

    The proposal is ``P(g) = (1 - rho) rho^g`` and ``g`` is kept with
    probability ``C(g + k, k) (q / rho)^g / M``.  The acceptance probability sums
    in closed form via ``sum_g C(g + k, k) x^g = (1 - x)^-(k + 1)``.
    """
    family = MapFamily.parse(family)
    if c < 0:
        return Fraction(0)
    rho = family.proposal_ratio
    q = 1 - family.geometric_p
    accept = (1 - rho) / family.acceptance_ceiling / (1 - q) ** (family.k + 1)
    return (1 - rho) * rho**c * _acceptance_weight(family, c) / accept


def sample_offspring(family: MapFamily | str, size: int, seed=None) -> np.ndarray:
    """``size`` i.i.d. draws of B by geometric proposals and acceptance."""
    family = MapFamily.parse(family)
    rng = make_rng(seed)
    rho = float(family.proposal_ratio)
    ratio = float((1 - family.geometric_p) / family.proposal_ratio)
    ceiling = float(family.acceptance_ceiling)
    k = family.k
    out = np.empty(size, dtype=np.int64)
    filled = 0
    while filled < size:
        m = int((size - filled) * 1.8) + 16
        g = rng.geometric(1.0 - rho, m) - 1
        u = rng.random(m)
        w = np.ones(m)
        for j in range(1, k + 1):
            w *= (g + j) / j
        keep = g[u * ceiling < w * ratio**g]
        take = min(keep.shape[0], size - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out


def conditioned_offspring(n: int, family: MapFamily | str, seed=None, method: str = "bridge") -> np.ndarray:
    """Preorder offspring counts of a GW tree with law B conditioned on ``n`` vertices.

    ``method="bridge"`` uses that ``n`` i.i.d. copies of B (each a sum of
    ``k + 1`` geometric variables) conditioned to sum to ``n - 1`` are a uniform
    weak composition of ``n - 1`` into ``(k + 1) n`` parts; ``method="rejection"``
    draws i.i.d. copies until the sum is right.  Both finish with the cycle
    lemma rotation.
    """
    family = MapFamily.parse(family)
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = make_rng(seed)
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    k = family.k
    if method == "bridge":
        balls = n - 1
        boxes = (k + 1) * n
        pos = np.sort(rng.choice(balls + boxes - 1, size=balls, replace=False))
        box = pos - np.arange(balls)
        counts = np.bincount(box, minlength=boxes).reshape(n, k + 1).sum(axis=1)
    elif method == "rejection":
        while True:
            counts = sample_offspring(family, n, rng)
            if int(counts.sum()) == n - 1:
                break
    else:
        raise ValueError(f"unknown method {method!r}")
    shift = K.cycle_lemma_shift(counts)
    return np.roll(counts, -shift).astype(np.int64)


def sample_gw_tree(n: int, family: MapFamily | str, seed=None) -> PlantedPlaneTree:
    """Galton–Watson tree with offspring law B conditioned to have ``n`` vertices."""
    offspring = conditioned_offspring(n, family, seed)
    return PlantedPlaneTree.from_parent(K.parents_from_lukasiewicz(offspring))


def _random_stem_slots(offspring: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    slots = offspring + k
    if k == 1:
        return np.floor(rng.random(offspring.shape[0]) * slots).astype(np.int64)[:, None]
    # uniform ordered pair of distinct slots, then sorted
    a = np.floor(rng.random(offspring.shape[0]) * slots).astype(np.int64)
    b = np.floor(rng.random(offspring.shape[0]) * (slots - 1)).astype(np.int64)
    b = b + (b >= a)
    return np.sort(np.stack([a, b], axis=1), axis=1)


# ---------------------------------------------------------------------------
# blossoming trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CornerLabelling:
    """Labels of the corners of a planted blossoming tree, in contour order."""

    labels: np.ndarray
    is_blossom: np.ndarray
    stem_step: int

    def closing_label(self) -> int:
        """Label reached when the replay comes back to the root corner."""
        last = int(self.labels[-1])
        if self.is_blossom[-1]:
            return last + self.stem_step
        return last if self.is_blossom[0] else last - 1

    def replay_ok(self) -> bool:
        lab, blo = self.labels, self.is_blossom
        if lab.shape[0] == 0 or lab[0] != 2:
            return False
        nxt_blossom = np.append(blo[1:], False)
        expected = np.where(blo[:-1], self.stem_step, np.where(nxt_blossom[:-1], 0, -1))
        return bool(np.array_equal(np.diff(lab), expected))


class BlossomingTree:
    """A planted blossoming tree, held as its contour code."""

    def __init__(self, code, family: MapFamily | str, *, check: bool = True) -> None:
        self.family = MapFamily.parse(family)
        self.code = np.ascontiguousarray(code, dtype=np.int8)
        self.code.setflags(write=False)
        if check:
            n = int(K.check_code(self.code, self.family.k))
            if n < 1:
                raise TreeError("not a blossoming-tree code for this family")
        else:
            n = int(np.count_nonzero(self.code == DOWN)) + 1
        self.n = n

    # -- construction -----------------------------------------------------
    @classmethod
    def from_tree(cls, tree: PlantedPlaneTree, is_blossom, family: MapFamily | str) -> "BlossomingTree":
        """Encode a planted plane tree whose leaves flagged ``is_blossom`` are blossoms."""
        is_blossom = np.asarray(is_blossom, dtype=bool)
        if is_blossom.shape[0] != tree.n:
            raise TreeError("is_blossom must have one flag per vertex")
        if is_blossom[tree.root]:
            raise TreeError("the root corner must be incident to an inner vertex")
        out: list[int] = []
        stack = [(tree.root, iter(tree.children(tree.root)))]
        while stack:
            v, it = stack[-1]
            c = next(it, None)
            if c is None:
                stack.pop()
                if stack:
                    out.append(UP)
                continue
            if is_blossom[c]:
                if tree.children(c):
                    raise TreeError(f"blossom {c} is not a leaf")
                out.append(STEM)
            else:
                out.append(DOWN)
                stack.append((c, iter(tree.children(c))))
        return cls(np.array(out, dtype=np.int8), family)

    @classmethod
    def single(cls, family: MapFamily | str) -> "BlossomingTree":
        family = MapFamily.parse(family)
        return cls(np.full(family.k, STEM, dtype=np.int8), family)

    # -- value semantics --------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlossomingTree):
            return NotImplemented
        return self.family is other.family and np.array_equal(self.code, other.code)

    def __hash__(self) -> int:
        return hash((self.family, self.code.tobytes()))

    def __repr__(self) -> str:
        word = "".join("sdu"[s] for s in self.code[:40].tolist())
        more = "..." if self.code.shape[0] > 40 else ""
        return f"BlossomingTree({self.family.value}, n={self.n}, code={word}{more})"

    def word(self) -> str:
        return "".join("sdu"[s] for s in self.code.tolist())

    # -- derived structure ---------------------------------------------------------
    @cached_property
    def corners(self) -> tuple[np.ndarray, ...]:
        """``(c_he, c_vertex, c_blossom, e_stem, e_top, e_bottom)``, see the kernels."""
        return K.tree_contour(self.code, self.n)

    @property
    def n_corners(self) -> int:
        return int(self.corners[0].shape[0])

    def inner_corners(self) -> np.ndarray:
        return np.flatnonzero(~self.corners[2])

    @cached_property
    def labelling(self) -> CornerLabelling:
        return CornerLabelling(
            K.corner_labels(self.corners[2], self.family.stem_step),
            self.corners[2],
            self.family.stem_step,
        )

    @property
    def tree(self) -> PlantedPlaneTree:
        """The underlying planted plane tree, blossoms included (ids ``n, n+1, ...``)."""
        _, _, _, _, top, bottom = self.corners
        nv = self.n * (1 + self.family.k)
        parent = np.full(nv, -1, dtype=np.int64)
        parent[bottom] = top
        children: list[list[int]] = [[] for _ in range(nv)]
        for t, b in zip(top.tolist(), bottom.tolist()):
            children[t].append(b)
        return PlantedPlaneTree(parent, tuple(tuple(c) for c in children), 0)

    @property
    def is_blossom(self) -> np.ndarray:
        flags = np.zeros(self.n * (1 + self.family.k), dtype=bool)
        flags[self.n :] = True
        return flags

    def reroot(self, corner: int) -> tuple["BlossomingTree", np.ndarray]:
        """Re-plant at contour corner ``corner`` (must be inner).

        Returns the new tree and, for each inner vertex, its id in the new tree.
        """
        c_he, c_vertex, c_blossom, e_stem, _, _ = self.corners
        corner = int(corner)
        if not 0 <= corner < c_he.shape[0] or c_blossom[corner]:
            raise TreeError(f"corner {corner} is not an inner corner")
        code = K.reroot_code(c_he, e_stem, corner)
        new_id = K.reroot_vertex_map(c_vertex, c_blossom, corner, self.n)
        return BlossomingTree(code, self.family, check=False), new_id

    def to_dict(self) -> dict:
        data = self.tree.to_dict()
        data["is_blossom"] = self.is_blossom.tolist()
        data["family"] = self.family.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "BlossomingTree":
        tree = PlantedPlaneTree.from_dict(data)
        return cls.from_tree(tree, data["is_blossom"], data.get("family", "tri"))


def attach_stems(tree: PlantedPlaneTree, family: MapFamily | str, seed=None) -> BlossomingTree:
    """Insert ``k`` stems at every vertex, uniformly among the interleavings."""
    family = MapFamily.parse(family)
    rng = make_rng(seed)
    tree, _ = tree.relabel_lex()
    offspring = np.diff(tree.lex_csr[0])
    slots = _random_stem_slots(offspring, family.k, rng)
    return BlossomingTree(K.build_code(offspring, slots, family.k), family, check=False)


def sample_blossoming_tree(n: int, family: MapFamily | str, seed=None) -> BlossomingTree:
    """Uniform element of T_n: conditioned GW tree with uniformly attached stems."""
    family = MapFamily.parse(family)
    rng = make_rng(seed)
    offspring = conditioned_offspring(n, family, rng)
    slots = _random_stem_slots(offspring, family.k, rng)
    return BlossomingTree(K.build_code(offspring, slots, family.k), family, check=False)


def corner_labelling(T: BlossomingTree) -> CornerLabelling:
    return T.labelling


def balanced_corners(T: BlossomingTree) -> tuple[int, int]:
    """The two contour corners at which ``T`` is balanced, in contour order.

    Re-planting at ``j`` shifts labels by ``2 - lambda(j)`` on corners from ``j``
    on and by ``4 - lambda(j)`` before ``j`` (one full turn of the contour raises
    the label by 2), so "all labels stay at least 2" reads
    ``lambda(j) <= min(lambda[j:])`` and ``lambda(j) <= min(lambda[:j]) + 2``.

    Triangulations additionally need ``j`` to sit between two stems.  For
    quadrangulations the label condition and "one incident stem" leave a third
    candidate in some trees; the balanced corners are those whose departing edge
    is a stem and whose arriving inner edge leaves a vertex right after one of
    its stems (the one-edge gaps between unclosed stems on the outer face).
    """
    if T.n < T.family.min_inner:
        raise ValidityError(f"a {T.family.value} tree needs at least {T.family.min_inner} inner vertices "
                            "to close into a simple map")
    c_he, _, c_blossom, e_stem, _, _ = T.corners
    lab = T.labelling.labels
    stem_dep = e_stem[c_he >> 1]
    if T.family is MapFamily.TRIANGULATION:
        local = stem_dep & np.roll(stem_dep, 1)
    else:
        local = stem_dep & np.roll(c_blossom, 2) & ~np.roll(c_blossom, 1)
    suffix_min = np.minimum.accumulate(lab[::-1])[::-1]
    prefix_min = np.empty_like(lab)
    prefix_min[0] = np.iinfo(np.int64).max // 2
    prefix_min[1:] = np.minimum.accumulate(lab)[:-1]
    ok = ~c_blossom & local & (lab <= suffix_min) & (lab <= prefix_min + 2)
    found = np.flatnonzero(ok)
    if found.shape[0] != 2:
        raise AssertionError(f"expected exactly two balanced corners, found {found.shape[0]}")
    return int(found[0]), int(found[1])


def is_balanced(T: BlossomingTree) -> bool:
    return 0 in balanced_corners(T)


def closes_at(T: BlossomingTree, corner: int) -> bool:
    """Direct check that re-planting at inner ``corner`` gives a closable tree:
    all labels at least 2, the departing edge a stem, and every unclosed
    blossom labelled 2 or 3 (so it can be attached to ``A`` or ``B``)."""
    c_he, _, c_blossom, e_stem, _, _ = T.corners
    if c_blossom[corner] or not e_stem[c_he[corner] >> 1]:
        return False
    R, _ = T.reroot(corner)
    lab = R.labelling.labels
    if lab.min() < 2:
        return False
    blossom = R.corners[2]
    succ = K.stem_matching(blossom, lab)
    return bool(np.all(lab[blossom & (succ < 0)] <= 3))


def balanced_by_counting(T: BlossomingTree, corner: int = 0) -> bool:
    """Balance of ``(T, corner)`` by counting blossoms on cyclic contour intervals.

    ``corner`` must sit between two stems, and every interval of corners
    starting at ``corner`` must satisfy ``3 * #blossom corners + 1 >= #corners``.
    This characterisation is specific to triangulations; for quadrangulations
    :func:`closes_at` is used instead.
    """
    if T.family is MapFamily.QUADRANGULATION:
        return closes_at(T, corner)
    c_he, _, c_blossom, e_stem, _, _ = T.corners
    N = c_he.shape[0]
    if c_blossom[corner]:
        return False
    if not (e_stem[c_he[(corner - 1) % N] >> 1] and e_stem[c_he[corner] >> 1]):
        return False
    blossoms = 0
    for size in range(1, N + 1):
        blossoms += bool(c_blossom[(corner + size - 1) % N])
        if 3 * blossoms + 1 < size:
            return False
    return True


def successor_by_counting(T: BlossomingTree, corner: int) -> int:
    """Closing corner of the blossom corner ``corner`` by counting, or ``-1``.

    It is the first corner ``c'`` after ``corner`` (cyclically) such that the
    interval ``[corner, c']``, both ends included, has
    ``(s + 2) * #blossom corners < #corners``.
    """
    _, _, c_blossom, _, _, _ = T.corners
    N = c_blossom.shape[0]
    if not c_blossom[corner]:
        raise ValueError("successor is defined for blossom corners only")
    mult = T.family.stem_step + 2
    blossoms = 1
    for size in range(1, N):
        j = (corner + size) % N
        blossoms += bool(c_blossom[j])
        if mult * blossoms < size + 1:
            return j
    return -1


def successor(T: BlossomingTree, corner: int) -> int:
    """First corner after blossom corner ``corner`` with label one less, or ``-1``.

    Unclosed blossoms (no such corner before the contour returns) give ``-1``.
    Computed by bracket matching on the current rooting, which agrees with the
    definition for balanced rootings.
    """
    c_blossom = T.corners[2]
    if not c_blossom[corner]:
        raise ValueError("successor is defined for blossom corners only")
    return int(_matching(T)[corner])


def _matching(T: BlossomingTree) -> np.ndarray:
    cache = T.__dict__.setdefault("_succ", None)
    if cache is None:
        cache = K.stem_matching(T.corners[2], T.labelling.labels)
        T.__dict__["_succ"] = cache
    return cache


# ---------------------------------------------------------------------------
# valid labellings
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ValidLabelledTree:
    """Plane tree with an integer displacement on each edge.

    ``disp[v]`` is the displacement of the edge from ``v`` to its parent
    (``disp[root] = 0``).  Vertex ids are in lexicographic order.
    """

    tree: PlantedPlaneTree
    disp: np.ndarray
    family: MapFamily = MapFamily.TRIANGULATION

    def __post_init__(self) -> None:
        object.__setattr__(self, "disp", np.asarray(self.disp, dtype=np.int64))
        object.__setattr__(self, "family", MapFamily.parse(self.family))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValidLabelledTree):
            return NotImplemented
        return (self.family is other.family and self.tree == other.tree
                and np.array_equal(self.disp, other.disp))

    __hash__ = None  # type: ignore[assignment]

    def sibling_blocks(self) -> Iterator[np.ndarray]:
        ptr, idx = self.tree.lex_csr
        for v in range(self.tree.n):
            if ptr[v + 1] > ptr[v]:
                yield self.disp[idx[ptr[v] : ptr[v + 1]]]

    def is_valid(self) -> bool:
        alphabet = np.array(self.family.alphabet)
        non_root = np.arange(self.tree.n) != self.tree.root
        if not np.isin(self.disp[non_root], alphabet).all():
            return False
        return all(bool(np.all(np.diff(b) >= 0)) for b in self.sibling_blocks())

    def X(self) -> np.ndarray:
        """Sum of displacements along the path from the root."""
        order = self.tree.preorder
        pos = np.empty(self.tree.n, dtype=np.int64)
        pos[order] = np.arange(self.tree.n)
        parent = self.tree.parent[order]
        parent = np.where(parent >= 0, pos[np.maximum(parent, 0)], -1)
        x = K.accumulate_from_root(parent, self.disp[order])
        out = np.empty_like(x)
        out[order] = x
        return out


def to_valid_labelling(T: BlossomingTree, corner: int | None = None) -> ValidLabelledTree:
    """φ_n: strip the blossoms of ``(T, corner)``, recording stems as displacements.

    The edge from ``p`` to a child gets ``s * (#stems of p before it) - 1``.
    ``corner`` defaults to the current root corner; ids of the result are the
    preorder ids of the tree re-planted at ``corner``.
    """
    if corner is not None and corner != 0:
        T, _ = T.reroot(corner)
    parent, disp = K.valid_labelling_from_code(T.code, T.n, T.family.stem_step)
    return ValidLabelledTree(PlantedPlaneTree.from_parent(parent), disp, T.family)


def from_valid_labelling(V: ValidLabelledTree) -> BlossomingTree:
    """φ_n^{-1}: put the stems back between children according to the jumps."""
    fam = V.family
    tree, new_id = V.tree.relabel_lex()
    disp = np.empty_like(V.disp)
    disp[new_id] = V.disp
    ptr, idx = tree.lex_csr
    code = K.code_from_valid_labelling(ptr, idx, disp, tree.root, tree.n, fam.k, fam.stem_step)
    if code.shape[0] == 0 or not V.is_valid():
        raise ValidityError("displacements do not form a valid labelling")
    return BlossomingTree(code, fam, check=False)


@dataclass(frozen=True)
class VertexLabels:
    """``Y``: minimum corner label per inner vertex; ``X``: root-path displacement sum."""

    Y: np.ndarray
    X: np.ndarray


def vertex_labels(obj: BlossomingTree | ValidLabelledTree) -> VertexLabels:
    if isinstance(obj, ValidLabelledTree):
        X = obj.X()
        T = from_valid_labelling(obj)
        # ids of T are preorder ids; translate back to obj's ids
        _, new_id = obj.tree.relabel_lex()
        Y = _y_labels(T)[new_id]
        return VertexLabels(Y, X)
    T = obj
    parent, disp = K.valid_labelling_from_code(T.code, T.n, T.family.stem_step)
    return VertexLabels(_y_labels(T), K.accumulate_from_root(parent, disp))


def _y_labels(T: BlossomingTree) -> np.ndarray:
    _, c_vertex, c_blossom, _, _, _ = T.corners
    y, _ = K.vertex_minima(c_vertex, c_blossom, T.labelling.labels, T.n)
    return y


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def guard_limit() -> int:
    raw = os.environ.get("MAPFORGE_GUARD_N")
    if raw is None:
        return DEFAULT_GUARD_N
    try:
        return int(raw)
    except ValueError:
        raise GuardError(f"MAPFORGE_GUARD_N must be an integer, got {raw!r}") from None


def _lukasiewicz_words(n: int) -> Iterator[tuple[int, ...]]:
    """Preorder offspring sequences of all plane trees with ``n`` vertices."""

    def rec(prefix: list[int], open_slots: int, remaining: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            if open_slots == 0:
                yield tuple(prefix)
            return
        if open_slots == 0:
            return
        for c in range(0, remaining):
            if open_slots - 1 + c > remaining - 1:
                break
            prefix.append(c)
            yield from rec(prefix, open_slots - 1 + c, remaining - 1)
            prefix.pop()

    yield from rec([], 1, n)


def enumerate_trees(n: int, family: MapFamily | str) -> list[BlossomingTree]:
    """All planted blossoming trees with ``n`` inner vertices, root at an inner corner.

    Planted trees have no non-trivial symmetries, so isomorphism classes are
    exactly the distinct codes; the list is sorted by code.
    """
    family = MapFamily.parse(family)
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > guard_limit():
        raise GuardError(f"enumeration limited to n <= {guard_limit()} (set MAPFORGE_GUARD_N)")
    k = family.k
    codes: list[np.ndarray] = []
    for word in _lukasiewicz_words(n):
        off = np.array(word, dtype=np.int64)
        choices = [list(itertools.combinations(range(c + k), k)) for c in word]
        for combo in itertools.product(*choices):
            slots = np.array(combo, dtype=np.int64).reshape(n, k)
            codes.append(K.build_code(off, slots, k))
    codes.sort(key=lambda c: c.tobytes())
    return [BlossomingTree(c, family, check=False) for c in codes]


def enumerate_balanced(n: int, family: MapFamily | str) -> list[BlossomingTree]:
    family = MapFamily.parse(family)
    if n < family.min_inner:
        raise ValidityError(f"no simple {family.value} map comes from trees with {n} inner vertices")
    return [T for T in enumerate_trees(n, family) if is_balanced(T)]
