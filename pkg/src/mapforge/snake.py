"""Contour and label processes, partial symmetrization, scaling statistics.

* :func:`processes` reads the height ``C`` and the label ``Z = X`` along the
  contour exploration of a valid labelled tree.
* :func:`partial_symmetrize` applies a uniformly random valid permutation to
  every sibling block: vertices of the subtree spanned by ``R`` keep their
  children in place and have their displacements rearranged, every other
  vertex has its children (with their displacements and subtrees) reordered.
* :func:`symmetrized_displacement_law_test`, :func:`two_point_statistics` and
  :func:`cs_family_report` are Monte-Carlo harnesses.  Limit laws are only
  compared across families and across sizes; no limit quantile is assumed.

Scalings (``m`` = number of tree vertices): triangulations use
``a = (3m)^{-1/2}``, ``b = (4m/3)^{-1/4}``; quadrangulations use
``a = 3/(4 m^{1/2})``, ``b = (3/(8m))^{1/4}``.  Map distances between uniform
vertices of an ``n``-vertex map are rescaled by ``c n^{-1/4}`` with
``c = (3/4)^{1/4}`` (tri) or ``(3/8)^{1/4}`` (quad).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from scipy import stats

from . import _kernels as K
from ._rng import make_rng, stream_rng
from .blossoming import (
    MapFamily,
    ValidLabelledTree,
    balanced_corners,
    sample_blossoming_tree,
    to_valid_labelling,
)
from .closure import close_marked, sample_closure
from .geodesics import bfs_distance, label_distance_profile
from .plane_tree import PlantedPlaneTree, TreeError, contour_exploration

T = TypeVar("T")


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def scaling_constants(family: MapFamily | str, m: int) -> tuple[float, float]:
    """``(a, b)`` rescaling ``C`` and ``Z`` of a tree with ``m`` vertices."""
    fam = MapFamily.parse(family)
    if m < 1:
        raise ValueError("a tree has at least one vertex")
    if fam is MapFamily.TRIANGULATION:
        return (3 * m) ** -0.5, (4 * m / 3) ** -0.25
    return 3 / (4 * m**0.5), (3 / (8 * m)) ** 0.25


def two_point_constant(family: MapFamily | str) -> float:
    """``c`` such that ``c n^{-1/4} d(U, V)`` has a family-independent limit."""
    fam = MapFamily.parse(family)
    return (3 / 4) ** 0.25 if fam is MapFamily.TRIANGULATION else (3 / 8) ** 0.25


# ---------------------------------------------------------------------------
# contour / label processes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProcessPair:
    """Heights ``C`` and labels ``Z`` at the contour steps ``i / (len - 1)``."""

    C: np.ndarray
    Z: np.ndarray

    @property
    def steps(self) -> int:
        return int(self.C.shape[0] - 1)

    def _grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.C.shape[0]) if self.steps else np.zeros(1)

    def __call__(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Linear interpolation of ``(C, Z)`` at times ``t`` in ``[0, 1]``."""
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise ValueError("times must lie in [0, 1]")
        if not self.steps:
            return np.zeros_like(t), np.zeros_like(t)
        g = self._grid()
        return np.interp(t, g, self.C), np.interp(t, g, self.Z)

    def rescaled(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        return a * self.C.astype(float), b * self.Z.astype(float)

    def check(self) -> bool:
        """Excursion shape: starts and ends at 0, unit height steps, Z(0) = 0."""
        C = self.C
        if C[0] != 0 or C[-1] != 0 or self.Z[0] != 0 or np.any(C < 0):
            return False
        return bool(np.all(np.abs(np.diff(C)) == 1))


def processes(V: ValidLabelledTree) -> ProcessPair:
    cs = contour_exploration(V.tree)
    depth = V.tree.depth
    X = V.X()
    return ProcessPair(depth[cs.visits].astype(np.int64), X[cs.visits].astype(np.int64))


# ---------------------------------------------------------------------------
# valid permutations and R-symmetrization
# ---------------------------------------------------------------------------


def valid_permutation_count(block: Sequence[int]) -> int:
    """|S(T, v)|: arrangements of the displacement multiset of a sibling block."""
    _, counts = np.unique(np.asarray(block, dtype=np.int64), return_counts=True)
    out = math.factorial(int(sum(counts)))
    for c in counts:
        out //= math.factorial(int(c))
    return out


def spanned_mask(tree: PlantedPlaneTree, R: Iterable[int]) -> np.ndarray:
    """Vertices of the subtree spanned by ``R`` (which must contain the root)."""
    mask = np.zeros(tree.n, dtype=bool)
    members = [int(v) for v in R]
    if tree.root not in members:
        raise TreeError("R must contain the root")
    mask[tree.root] = True
    parent = tree.parent
    for v in members:
        if not 0 <= v < tree.n:
            raise TreeError(f"vertex {v} is not in the tree")
        while not mask[v]:
            mask[v] = True
            v = int(parent[v])
    return mask


@dataclass(frozen=True, eq=False)
class SymmetrizationPlan:
    """The random choices of one R-symmetrization.

    ``child_slots`` is the new lexicographic child list in CSR form (sharing
    ``ptr`` with the input tree), ``disp`` the new displacements; vertex ids are
    unchanged, so ids double as the image map.
    """

    R: np.ndarray
    span: np.ndarray
    ptr: np.ndarray
    child_slots: np.ndarray
    disp: np.ndarray

    def children(self, v: int) -> list[int]:
        return self.child_slots[self.ptr[v] : self.ptr[v + 1]].tolist()


@dataclass(frozen=True, eq=False)
class Symmetrization:
    tree: ValidLabelledTree
    """The symmetrized tree; ids are those of the input (not lexicographic)."""
    plan: SymmetrizationPlan


def _plan(V: ValidLabelledTree, R: np.ndarray, span: np.ndarray, rng: np.random.Generator) -> SymmetrizationPlan:
    ptr, idx = V.tree.lex_csr
    keys = rng.random(idx.shape[0])
    slots, disp = K.symmetrize_blocks(ptr, idx, V.disp, span, keys)
    return SymmetrizationPlan(R, span, ptr, slots, disp)


def partial_symmetrize(V: ValidLabelledTree, R: Iterable[int], seed=None) -> Symmetrization:
    """R-symmetrization of ``V``; the root must belong to ``R``."""
    R = np.unique(np.asarray(list(R), dtype=np.int64))
    span = spanned_mask(V.tree, R.tolist())
    plan = _plan(V, R, span, make_rng(seed))
    ptr = plan.ptr
    kids = tuple(tuple(plan.child_slots[ptr[v] : ptr[v + 1]].tolist()) for v in range(V.tree.n))
    tree = PlantedPlaneTree(V.tree.parent, kids, 0)
    return Symmetrization(ValidLabelledTree(tree, plan.disp, V.family), plan)


def contour_times_preserved(V: ValidLabelledTree, W: ValidLabelledTree, span: np.ndarray) -> bool:
    """``r_V(j) = v  <=>  r_W(j) = v`` for every spanned vertex ``v``."""
    a = contour_exploration(V.tree).visits
    b = contour_exploration(W.tree).visits
    if a.shape != b.shape:
        return False
    ia = np.where(span[a], a, -1)
    ib = np.where(span[b], b, -1)
    return bool(np.array_equal(ia, ib))


def fluctuation(V: ValidLabelledTree, span: np.ndarray) -> int:
    """Δ: largest label gap between a contour step and the next spanned visit."""
    visits = contour_exploration(V.tree).visits
    return int(K.span_fluctuation(visits, V.X(), span))


def _root_sums(tree: PlantedPlaneTree, step: np.ndarray) -> np.ndarray:
    order = tree.preorder
    pos = np.empty(tree.n, dtype=np.int64)
    pos[order] = np.arange(tree.n)
    parent = tree.parent[order]
    parent = np.where(parent >= 0, pos[np.maximum(parent, 0)], -1)
    s = K.accumulate_from_root(parent, step[order])
    out = np.empty_like(s)
    out[order] = s
    return out


def ancestral_sum_gap(V: ValidLabelledTree, span: np.ndarray, R: np.ndarray) -> int:
    """max over v in R of |A(v) - X(v)|, where A(v) sums the displacements of
    the root-path edges whose upper end has a single child in the span."""
    tree = V.tree
    parent = tree.parent
    nonroot = parent >= 0
    span_kids = np.bincount(parent[nonroot & span], minlength=tree.n)
    single = np.zeros(tree.n, dtype=bool)
    single[nonroot] = span_kids[parent[nonroot]] == 1
    A = _root_sums(tree, np.where(single, V.disp, 0))
    X = V.X()
    return int(np.abs(A[R] - X[R]).max()) if R.shape[0] else 0


@dataclass(frozen=True)
class SymmetrizationCheck:
    contour_preserved: bool
    sizes_preserved: bool
    delta: int
    delta_sym: int
    ancestral_gap: int
    ancestral_gap_sym: int
    r_size: int

    @property
    def ok(self) -> bool:
        bound = self.r_size - 1
        return (self.contour_preserved and self.sizes_preserved
                and abs(self.delta - self.delta_sym) <= 2
                and self.ancestral_gap <= bound and self.ancestral_gap_sym <= bound)


def check_symmetrization(V: ValidLabelledTree, R: Iterable[int], seed=None) -> SymmetrizationCheck:
    """Run :func:`partial_symmetrize` and evaluate every preserved quantity."""
    S = partial_symmetrize(V, R, seed)
    W, plan = S.tree, S.plan
    span = plan.span
    sizes_v = V.tree.subtree_sizes()
    sizes_w = W.tree.subtree_sizes()
    same_sizes = bool(np.array_equal(sizes_v, sizes_w))
    if same_sizes:
        for v in np.flatnonzero(span).tolist():
            a = sorted(sizes_v[V.tree.children(v)].tolist())
            b = sorted(sizes_w[W.tree.children(v)].tolist())
            if a != b:
                same_sizes = False
                break
    return SymmetrizationCheck(
        contour_preserved=contour_times_preserved(V, W, span),
        sizes_preserved=same_sizes,
        delta=fluctuation(V, span),
        delta_sym=fluctuation(W, span),
        ancestral_gap=ancestral_sum_gap(V, span, plan.R),
        ancestral_gap_sym=ancestral_sum_gap(W, span, plan.R),
        r_size=int(plan.R.shape[0]),
    )


def sample_valid_labelled_tree(n: int, family: MapFamily | str, seed=None) -> ValidLabelledTree:
    """Valid labelled tree of a uniform blossoming tree with ``n`` inner vertices."""
    return to_valid_labelling(sample_blossoming_tree(n, family, make_rng(seed)))


def random_marked_set(tree: PlantedPlaneTree, size: int, seed=None) -> np.ndarray:
    """The root together with ``size`` further distinct uniform vertices."""
    rng = make_rng(seed)
    others = np.flatnonzero(np.arange(tree.n) != tree.root)
    size = min(size, others.shape[0])
    pick = rng.choice(others, size=size, replace=False) if size else np.empty(0, np.int64)
    return np.sort(np.concatenate([[tree.root], pick]).astype(np.int64))


# ---------------------------------------------------------------------------
# displacement laws
# ---------------------------------------------------------------------------


def _arrangements(family: MapFamily, k: int) -> list[tuple[int, ...]]:
    """Displacement vectors of a non-root vertex with ``k`` children, one per
    equally likely placement of its stems in the ``k + 1`` gaps."""
    out = []
    for gaps in combinations_with_replacement(range(k + 1), family.k):
        out.append(tuple(family.stem_step * sum(g <= i for g in gaps) - 1 for i in range(k)))
    return out


def exact_marginal_mean(family: MapFamily | str, k: int, i: int, symmetrized: bool = False) -> Fraction:
    """Exact mean of coordinate ``i`` (0-based) of the displacement vector of
    a non-root vertex with ``k`` children, before or after symmetrization."""
    fam = MapFamily.parse(family)
    if not 0 <= i < k:
        raise ValueError("coordinate out of range")
    arr = _arrangements(fam, k)
    if symmetrized:
        return Fraction(sum(sum(a) for a in arr), len(arr) * k)
    return Fraction(sum(a[i] for a in arr), len(arr))


@dataclass(frozen=True)
class CoordinateStats:
    k: int
    i: int
    count: int
    mean_raw: float
    exact_raw: Fraction
    mean_sym: float
    se_sym: float
    chi2_pvalue: float

    @property
    def z_sym(self) -> float:
        return self.mean_sym / self.se_sym if self.se_sym > 0 else 0.0


@dataclass(frozen=True)
class DisplacementLawReport:
    family: MapFamily
    n: int
    samples: int
    coords: tuple[CoordinateStats, ...]

    def max_abs_z(self) -> float:
        return max((abs(c.z_sym) for c in self.coords), default=0.0)

    def coordinate(self, k: int, i: int) -> CoordinateStats:
        for c in self.coords:
            if c.k == k and c.i == i:
                return c
        raise KeyError((k, i))


def symmetrized_displacement_law_test(
    n: int, N: int, seed=0, family: MapFamily | str = "tri", *, max_k: int = 4, min_count: int = 50
) -> DisplacementLawReport:
    """Per (number of children ``k``, child index ``i``) displacement means of
    ``N`` sampled trees with ``n`` inner vertices, before and after a full
    symmetrization (``R`` = root).  Root blocks are left out: their stems are
    counted from the root corner, not from a parent edge."""
    fam = MapFamily.parse(family)
    alphabet = np.array(fam.alphabet)
    A = alphabet.shape[0]
    cnt = np.zeros((max_k + 1, max_k), np.int64)
    s_raw = np.zeros((max_k + 1, max_k))
    s_sym = np.zeros((max_k + 1, max_k))
    q_sym = np.zeros((max_k + 1, max_k))
    freq = np.zeros((max_k + 1, max_k, A), np.int64)
    lookup = {int(a): j for j, a in enumerate(alphabet)}
    for s in range(N):
        rng = stream_rng(seed, s)
        V = sample_valid_labelled_tree(n, fam, rng)
        span = np.zeros(V.tree.n, dtype=bool)
        span[V.tree.root] = True
        plan = _plan(V, np.array([V.tree.root]), span, rng)
        ptr, idx = V.tree.lex_csr
        deg = np.diff(ptr)
        for v in np.flatnonzero((deg >= 1) & (deg <= max_k)).tolist():
            if v == V.tree.root:
                continue
            k = int(deg[v])
            kids = idx[ptr[v] : ptr[v + 1]]
            raw = V.disp[kids]
            # a full symmetrization is a uniform arrangement of each block;
            # outside the span it moves children, so read values in slot order
            sym = plan.disp[plan.child_slots[ptr[v] : ptr[v + 1]]]
            cnt[k, :k] += 1
            s_raw[k, :k] += raw
            s_sym[k, :k] += sym
            q_sym[k, :k] += sym.astype(float) ** 2
            for i, x in enumerate(sym.tolist()):
                freq[k, i, lookup[x]] += 1
    coords = []
    for k in range(1, max_k + 1):
        for i in range(k):
            c = int(cnt[k, i])
            if c < min_count:
                continue
            m = s_sym[k, i] / c
            var = max(q_sym[k, i] / c - m * m, 0.0) * c / max(c - 1, 1)
            p = float(stats.chisquare(freq[k, i]).pvalue)
            coords.append(CoordinateStats(k, i, c, s_raw[k, i] / c, exact_marginal_mean(fam, k, i),
                                          float(m), math.sqrt(var / c), p))
    return DisplacementLawReport(fam, n, N, tuple(coords))


# ---------------------------------------------------------------------------
# sample-parallel helper
# ---------------------------------------------------------------------------


def run_streams(fn: Callable[[int], T], count: int, threads: int = 1) -> list[T]:
    """``[fn(0), ..., fn(count - 1)]``, optionally on a thread pool; results are
    in index order regardless of scheduling."""
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


# ---------------------------------------------------------------------------
# two-point function
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TwoPointSample:
    family: MapFamily
    n: int
    seed: int
    distances: np.ndarray
    values: np.ndarray
    """``c n^{-1/4} d(U, V)``."""

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["family", "n", "seed", "sample_idx", "value"])
        for i, v in enumerate(self.values.tolist()):
            w.writerow([self.family.value, self.n, self.seed, i, repr(float(v))])
        return buf.getvalue()


def _check_map_size(family: MapFamily, n: int) -> None:
    if n - 2 < family.min_inner or n < 4:
        raise ValueError(f"a simple {family.value} map needs at least 4 vertices, got n={n}")


def two_point_statistics(family: MapFamily | str, n: int, N: int, seed: int = 0, threads: int = 1) -> TwoPointSample:
    """``N`` independent maps with ``n`` vertices, one independent uniform pair
    ``(U, V)`` of vertices each; sample ``i`` uses stream ``i`` of ``seed``."""
    fam = MapFamily.parse(family)
    _check_map_size(fam, n)

    def one(i: int) -> int:
        rng = stream_rng(seed, i)
        res = sample_closure(n - 2, fam, rng)
        u, v = rng.integers(n, size=2)
        return int(bfs_distance(res.map, int(u))[int(v)])

    d = np.asarray(run_streams(one, N, threads), dtype=np.int64)
    c = two_point_constant(fam)
    return TwoPointSample(fam, n, int(seed), d, c * n**-0.25 * d)


@dataclass(frozen=True)
class KSResult:
    statistic: float
    pvalue: float


def lattice_smoothed(sample: TwoPointSample, seed=None) -> np.ndarray:
    """``c n^{-1/4} (d + U - 1/2)`` with independent uniform ``U``: removes the
    integer lattice of ``d``, whose rescaled spacing differs between families.
    A diagnostic only; the two-point statistic itself is :attr:`TwoPointSample.values`."""
    rng = make_rng(seed)
    c = two_point_constant(sample.family) * sample.n**-0.25
    return c * (sample.distances + rng.random(sample.distances.shape[0]) - 0.5)


def ks_distance(x: Sequence[float], y: Sequence[float]) -> KSResult:
    r = stats.ks_2samp(np.asarray(x, float), np.asarray(y, float))
    return KSResult(float(r.statistic), float(r.pvalue))


def cross_family_ks(n: int, N: int, seed: int = 0, threads: int = 1) -> tuple[KSResult, TwoPointSample, TwoPointSample]:
    """KS distance between the rescaled tri and quad two-point samples.
    The two families use different run seeds derived from ``seed``."""
    tri = two_point_statistics("tri", n, N, stream_rng(seed, 0).integers(2**63), threads)
    quad = two_point_statistics("quad", n, N, stream_rng(seed, 1).integers(2**63), threads)
    return ks_distance(tri.values, quad.values), tri, quad


# ---------------------------------------------------------------------------
# CS-family diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CSSample:
    """Diagnostics of one marked closure ``(M, ξ, ξ̂)`` with ``m`` inner vertices."""

    m: int
    dist_to_R: int
    z_bound_checked: int
    z_bound_violations: int
    z_bound_max_excess: int
    """max of d(r(i), r(j)) - [Z(i) + Z(j) - 2 max(Ž(i,j), Ž(j,i))] over the checked pairs."""
    label_err_scaled: float
    d_marked_root: int
    min_Z: int
    d_uniform: int


def _cyclic_min(table, last: int, i: int, j: int) -> tuple[int, int]:
    """(min over [i, j], min over the complementary cyclic arc from j to i)."""
    lo, hi = (i, j) if i <= j else (j, i)
    inside = int(K.range_min(table, lo, hi))
    outside = min(int(K.range_min(table, hi, last)), int(K.range_min(table, 0, lo)))
    return (inside, outside) if i <= j else (outside, inside)


CS_ADDITIVE = 18


def cs_sample(family: MapFamily | str, m: int, rng: np.random.Generator,
              n_sources: int = 4, n_targets: int = 250) -> CSSample:
    fam = MapFamily.parse(family)
    T = sample_blossoming_tree(m, fam, rng)
    xi = balanced_corners(T)[int(rng.integers(2))]
    inner = np.flatnonzero(~T.corners[2])
    xh = int(inner[rng.integers(inner.shape[0])])
    res, _ = close_marked(T, xi, xh)
    M = res.map
    # map vertex of every vertex of the tree re-planted at the marked corner
    _, to_marked = T.reroot(xh)
    mapv = np.empty(T.n, dtype=np.int64)
    mapv[to_marked] = res.tree_vertex_ids
    V = to_valid_labelling(T, xh)
    visits = contour_exploration(V.tree).visits
    Z = V.X()[visits]
    rv = mapv[visits]
    last = Z.shape[0] - 1
    table = K.sparse_table(Z)

    ptr, nbr, _ = M.adjacency
    in_R = np.zeros(M.n_vertices, dtype=bool)
    in_R[: T.n] = True
    dist_to_R = 0
    for x in (res.vertex_A, res.vertex_B):
        dist_to_R = max(dist_to_R, 1 if in_R[nbr[ptr[x] : ptr[x + 1]]].any() else 2)

    checked = viol = 0
    excess = -(1 << 62)
    for i in rng.integers(last + 1, size=n_sources).tolist():
        dist = K.bfs(ptr, nbr, int(rv[i]))
        for j in rng.integers(last + 1, size=n_targets).tolist():
            a, b = _cyclic_min(table, last, i, j)
            bound = int(Z[i] + Z[j] - 2 * max(a, b))
            gap = int(dist[rv[j]]) - bound
            excess = max(excess, gap)
            checked += 1
            viol += gap > CS_ADDITIVE
    u_n = int(M.vertex_of[M.root])
    d_root = bfs_distance(M, u_n)
    marked_vertex = int(rv[0])
    U, W = rng.integers(T.n, size=2)
    return CSSample(
        m=m,
        dist_to_R=dist_to_R,
        z_bound_checked=checked,
        z_bound_violations=viol,
        z_bound_max_excess=int(excess),
        label_err_scaled=label_distance_profile(res).max_err_scaled,
        d_marked_root=int(d_root[marked_vertex]),
        min_Z=int(Z.min()),
        d_uniform=int(bfs_distance(M, int(U))[int(W)]),
    )


@dataclass(frozen=True)
class Condition:
    statistic: object
    passed: bool
    threshold: object

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "pass": bool(self.passed), "threshold": self.threshold}


@dataclass
class CSReport:
    family: MapFamily
    n_list: tuple[int, ...]
    samples: int
    seed: int
    conditions: dict[str, Condition] = field(default_factory=dict)
    per_n: dict[int, list[CSSample]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def to_json(self) -> str:
        return json.dumps({k: c.to_dict() for k, c in self.conditions.items()}, indent=2, sort_keys=True)


def _decreasing(xs: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def cs_family_report(family: MapFamily | str, n_list: Sequence[int], N: int, seed: int = 0,
                     threads: int = 1, n_sources: int = 4, n_targets: int = 250) -> CSReport:
    """Finite-``n`` diagnostics of the CS-family conditions.

    ``n_list`` holds map vertex counts; the tree has ``n - 2`` vertices.
    Conditions: ``2(i)`` max distance of A, B to the tree vertices (= 1);
    ``3(i)`` the Z-based distance bound with additive constant 18 on sampled
    contour pairs (zero violations); ``3(ii)`` the median rescaled label error
    decreases along ``n_list``; ``2(ii)`` KS distance between
    ``b d(v(ξ̂), u_n)`` and ``b d(U, V)`` at the largest ``n`` (p-value above
    0.001); ``label-root`` the median of ``b |d(v(ξ̂), u_n) + min Z|``
    decreases along ``n_list``.
    """
    fam = MapFamily.parse(family)
    n_list = tuple(int(n) for n in n_list)
    for n in n_list:
        _check_map_size(fam, n)
    rep = CSReport(fam, n_list, N, int(seed))
    for k, n in enumerate(n_list):
        base = int(stream_rng(seed, k).integers(2**63))
        rep.per_n[n] = run_streams(lambda i, n=n, base=base: cs_sample(fam, n - 2, stream_rng(base, i),
                                                                     n_sources, n_targets), N, threads)
    all_s = [s for v in rep.per_n.values() for s in v]
    rep.conditions["2(i)"] = Condition(max(s.dist_to_R for s in all_s), max(s.dist_to_R for s in all_s) == 1, 1)
    excess = max(s.z_bound_max_excess for s in all_s)
    viol = sum(s.z_bound_violations for s in all_s)
    rep.conditions["3(i)"] = Condition({"violations": viol, "max_excess": excess,
                                        "checked": sum(s.z_bound_checked for s in all_s)},
                                       viol == 0, CS_ADDITIVE)
    med = [float(np.median([s.label_err_scaled for s in rep.per_n[n]])) for n in n_list]
    rep.conditions["3(ii)"] = Condition(med, _decreasing(med), "strictly decreasing in n")
    ks, gaps = [], []
    for n in n_list:
        _, b = scaling_constants(fam, n - 2)
        ss = rep.per_n[n]
        r = ks_distance([b * s.d_marked_root for s in ss], [b * s.d_uniform for s in ss])
        ks.append([r.statistic, r.pvalue])
        gaps.append(float(np.median([b * abs(s.d_marked_root + s.min_Z) for s in ss])))
    rep.conditions["2(ii)"] = Condition(ks, ks[-1][1] > 1e-3, "KS p-value > 0.001 at the largest n")
    rep.conditions["label-root"] = Condition(gaps, _decreasing(gaps), "strictly decreasing in n")
    return rep
