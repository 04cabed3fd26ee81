"""Finite metric spaces, correspondences, distortion, and exact
Gromov–Hausdorff distance on tiny spaces.

``d_GH(A, B) = 1/2 inf_C dis(C)`` over correspondences ``C``.  Distortion is
monotone under adding pairs, so the infimum is attained on an
inclusion-minimal correspondence.  :func:`gh_bruteforce` runs a
branch-and-bound search: it repeatedly picks the uncovered point with the
fewest admissible partners and branches over the pair that covers it.  Every
minimal correspondence is reachable, and a branch is cut as soon as its
distortion reaches the best value found so far.

:func:`ghp_upper_bound` evaluates, for one correspondence and one coupling of
the weights, the smallest ``ε`` with ``ν(C) ≥ 1 − ε`` and ``dis(C) ≤ 2ε``.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .blossoming import GuardError

GH_GUARD = 49
"""Largest ``|A| * |B|`` accepted by :func:`gh_bruteforce`."""

TOL = 1e-9


class MetricError(ValueError):
    """Invalid metric space, correspondence or coupling."""


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    dist: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        d = np.asarray(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise MetricError("the distance matrix must be square and non-empty")
        if not np.all(np.isfinite(d)):
            raise MetricError("distances must be finite")
        if np.any(d < -TOL) or np.any(np.abs(np.diag(d)) > TOL):
            raise MetricError("distances must be non-negative with a zero diagonal")
        if not np.allclose(d, d.T, atol=TOL, rtol=0):
            raise MetricError("the distance matrix must be symmetric")
        # d[i, j] <= d[i, k] + d[k, j] for all i, j, k
        if np.any(d[:, None, :] > d[:, :, None] + d[None, :, :] + TOL):
            raise MetricError("the triangle inequality fails")
        object.__setattr__(self, "dist", d)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (d.shape[0],) or np.any(w < -TOL) or abs(w.sum() - 1) > 1e-6:
                raise MetricError("weights must be a probability vector, one entry per point")
            object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return int(self.dist.shape[0])

    def __len__(self) -> int:
        return self.size

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    @classmethod
    def point(cls) -> "FiniteMetricSpace":
        return cls(np.zeros((1, 1)), np.ones(1))

    @classmethod
    def from_points(cls, coords: Sequence[Sequence[float]], weights=None) -> "FiniteMetricSpace":
        x = np.asarray(coords, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
        return cls(d, weights)

    def relabelled(self, perm: Sequence[int]) -> "FiniteMetricSpace":
        """Isometric copy whose point ``i`` is point ``perm[i]`` of ``self``."""
        p = np.asarray(perm, dtype=np.int64)
        w = None if self.weights is None else self.weights[p]
        return FiniteMetricSpace(self.dist[np.ix_(p, p)], w)

    @classmethod
    def from_csv(cls, source: str | os.PathLike) -> "FiniteMetricSpace":
        """Read a ``k x k`` distance matrix; a ``k x (k + 1)`` table carries
        the weights in its last column.  ``source`` is a path or CSV text."""
        text = str(source)
        if "\n" not in text and "," not in text:
            with open(source, newline="") as fh:
                text = fh.read()
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        try:
            table = np.array([[float(c) for c in r] for r in rows], dtype=float)
        except ValueError as exc:
            raise MetricError(f"non-numeric CSV entry: {exc}") from None
        if table.ndim != 2:
            raise MetricError("rows have different lengths")
        k, c = table.shape
        if c == k:
            return cls(table)
        if c == k + 1:
            return cls(table[:, :k], table[:, k])
        raise MetricError(f"expected {k} or {k + 1} columns, found {c}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for i in range(self.size):
            row = [repr(float(x)) for x in self.dist[i]]
            if self.weights is not None:
                row.append(repr(float(self.weights[i])))
            w.writerow(row)
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class Correspondence:
    """A relation between the points of two spaces, as an ``(m, 2)`` array."""

    pairs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "pairs", np.unique(p, axis=0))

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "Correspondence":
        return cls(np.array(list(pairs), dtype=np.int64).reshape(-1, 2))

    @classmethod
    def full(cls, na: int, nb: int) -> "Correspondence":
        a, b = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
        return cls(np.stack([a.ravel(), b.ravel()], axis=1))

    @classmethod
    def identity(cls, n: int) -> "Correspondence":
        return cls(np.stack([np.arange(n), np.arange(n)], axis=1))

    def __len__(self) -> int:
        return int(self.pairs.shape[0])

    def union(self, other: "Correspondence") -> "Correspondence":
        return Correspondence(np.concatenate([self.pairs, other.pairs]))

    def is_correspondence(self, na: int, nb: int) -> bool:
        p = self.pairs
        if p.shape[0] == 0:
            return False
        if p.min() < 0 or p[:, 0].max() >= na or p[:, 1].max() >= nb:
            return False
        return np.unique(p[:, 0]).shape[0] == na and np.unique(p[:, 1]).shape[0] == nb

    def check(self, A: FiniteMetricSpace, B: FiniteMetricSpace) -> None:
        if not self.is_correspondence(A.size, B.size):
            raise MetricError("the relation is not a correspondence (some point has no partner)")


def distortion(C: Correspondence, A: FiniteMetricSpace, B: FiniteMetricSpace) -> float:
    """dis(C) = max |d_A(x, y) - d_B(x', y')| over pairs (x, x'), (y, y') in C."""
    C.check(A, B)
    x, y = C.pairs[:, 0], C.pairs[:, 1]
    return float(np.abs(A.dist[np.ix_(x, x)] - B.dist[np.ix_(y, y)]).max())


def _check_guard(A: FiniteMetricSpace, B: FiniteMetricSpace) -> None:
    if A.size * B.size > GH_GUARD:
        raise GuardError(f"|A|*|B| = {A.size * B.size} exceeds the brute-force limit {GH_GUARD}")


def gh_search(A: FiniteMetricSpace, B: FiniteMetricSpace,
              forced: Iterable[tuple[int, int]] = ()) -> tuple[float, Correspondence]:
    """Minimal distortion over correspondences containing ``forced``, and a
    correspondence attaining it."""
    _check_guard(A, B)
    na, nb = A.size, B.size
    P = na * nb
    px = np.repeat(np.arange(na), nb)
    py = np.tile(np.arange(nb), na)
    # cost[p, q]: distortion contributed by having both pairs p and q
    cost = np.abs(A.dist[np.ix_(px, px)] - B.dist[np.ix_(py, py)])
    forced = [(int(a), int(b)) for a, b in forced]
    for a, b in forced:
        if not (0 <= a < na and 0 <= b < nb):
            raise MetricError(f"forced pair {(a, b)} is out of range")
    start = sorted({a * nb + b for a, b in forced})
    d0 = float(cost[np.ix_(start, start)].max()) if start else 0.0

    # the full relation is a correspondence containing the forced pairs
    best_pairs = Correspondence.full(na, nb)
    best = float(cost.max())

    chosen = list(start)

    def covered() -> tuple[np.ndarray, np.ndarray]:
        ca = np.zeros(na, bool)
        cb = np.zeros(nb, bool)
        for p in chosen:
            ca[px[p]] = True
            cb[py[p]] = True
        return ca, cb

    def rec(cur: float, worst: np.ndarray) -> None:
        # worst[p] = max cost of p against the chosen pairs
        nonlocal best, best_pairs
        ca, cb = covered()
        if ca.all() and cb.all():
            if cur < best:
                best = cur
                best_pairs = Correspondence(np.stack([px[chosen], py[chosen]], axis=1))
            return
        # candidate pairs for each uncovered point, keeping only those below best
        target, options = None, None
        for side, cov in ((0, ca), (1, cb)):
            for e in np.flatnonzero(~cov).tolist():
                cand = np.flatnonzero((px if side == 0 else py) == e)
                cand = cand[np.maximum(worst[cand], cur) < best]
                if options is None or cand.shape[0] < options.shape[0]:
                    target, options = (side, e), cand
                    if cand.shape[0] == 0:
                        return
        assert options is not None and target is not None
        order = options[np.argsort(worst[options], kind="stable")]
        for p in order.tolist():
            new = max(cur, float(worst[p]))
            if new >= best:
                break
            chosen.append(p)
            rec(new, np.maximum(worst, cost[p]))
            chosen.pop()

    worst0 = cost[start].max(axis=0) if start else np.zeros(P)
    rec(d0, worst0)
    return best, best_pairs


def gh_bruteforce(A: FiniteMetricSpace, B: FiniteMetricSpace,
                  forced: Iterable[tuple[int, int]] = ()) -> float:
    """Exact d_GH(A, B); ``forced`` pairs (marked points) must belong to ``C``."""
    dis, _ = gh_search(A, B, forced)
    return dis / 2


def coupling_check(A: FiniteMetricSpace, B: FiniteMetricSpace, nu: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    if A.weights is None or B.weights is None:
        raise MetricError("both spaces need weights")
    if nu.shape != (A.size, B.size) or np.any(nu < -tol):
        raise MetricError("the coupling must be a non-negative |A| x |B| matrix")
    if np.abs(nu.sum(axis=1) - A.weights).max() > tol or np.abs(nu.sum(axis=0) - B.weights).max() > tol:
        raise MetricError("the coupling's marginals do not match the weights")
    return nu


def ghp_upper_bound(A: FiniteMetricSpace, B: FiniteMetricSpace, C: Correspondence, nu) -> float:
    """max(1 - ν(C), dis(C) / 2): the smallest ε certified by ``(C, ν)``."""
    nu = coupling_check(A, B, nu)
    dis = distortion(C, A, B)
    mass = float(nu[C.pairs[:, 0], C.pairs[:, 1]].sum())
    return max(1.0 - mass, dis / 2, 0.0)
