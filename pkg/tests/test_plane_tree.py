from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mapforge.plane_tree import (
    PlantedPlaneTree,
    TreeError,
    contour_exploration,
    reduced_tree,
    spanned_subtree,
)


def star(k: int) -> PlantedPlaneTree:
    return PlantedPlaneTree.from_children([list(range(1, k + 1))] + [[] for _ in range(k)])


def path(n: int) -> PlantedPlaneTree:
    return PlantedPlaneTree.from_parent([-1] + list(range(n - 1)))


@st.composite
def trees(draw, max_n: int = 60):
    """Random plane trees from random parent arrays (parent id < child id)."""
    n = draw(st.integers(1, max_n))
    parent = [-1] + [draw(st.integers(0, v - 1)) for v in range(1, n)]
    return PlantedPlaneTree.from_parent(parent)


# -- contour ---------------------------------------------------------------


@pytest.mark.parametrize(
    "tree, visits",
    [
        (PlantedPlaneTree.single_vertex(), [0]),
        (path(2), [0, 1, 0]),
        (star(3), [0, 1, 0, 2, 0, 3, 0]),
        (path(3), [0, 1, 2, 1, 0]),
    ],
)
def test_contour_examples(tree, visits):
    cs = contour_exploration(tree)
    assert cs.visits.tolist() == visits
    assert cs.steps == 2 * tree.n - 2


def test_single_vertex_contour_is_degenerate():
    cs = contour_exploration(PlantedPlaneTree.single_vertex())
    assert cs.steps == 0 and cs.visits.shape == (1,)


@given(trees())
def test_contour_walks_every_edge_twice(tree):
    cs = contour_exploration(tree)
    v = cs.visits
    assert v[0] == tree.root and v[-1] == tree.root
    assert cs.steps == 2 * tree.n - 2
    edges = {}
    for a, b in zip(v[:-1].tolist(), v[1:].tolist()):
        assert tree.parent[a] == b or tree.parent[b] == a
        key = (min(a, b), max(a, b))
        edges[key] = edges.get(key, 0) + 1
    assert len(edges) == tree.n - 1 and set(edges.values()) <= {2}
    counts = np.bincount(v[:-1], minlength=tree.n) if tree.n > 1 else np.array([1])
    for u in range(tree.n):
        if u != tree.root:
            assert counts[u] == tree.degree(u)


@given(trees())
def test_first_visit_is_preorder(tree):
    cs = contour_exploration(tree)
    first = cs.first_visit()
    assert np.array_equal(np.argsort(first, kind="stable"), tree.preorder)


# -- structure and serialisation ------------------------------------------------


def test_rejects_bad_parent_arrays():
    with pytest.raises(TreeError):
        PlantedPlaneTree.from_parent([-1, -1])
    with pytest.raises(TreeError):
        PlantedPlaneTree.from_parent([1, 2, 0])
    with pytest.raises(TreeError):
        PlantedPlaneTree.from_parent([-1, 5])


@given(trees())
def test_ulam_harris_round_trip(tree):
    addresses = tree.addresses()
    assert addresses[tree.root] == ()
    rebuilt = PlantedPlaneTree.from_ulam_harris(addresses)
    assert rebuilt.shape_code() == tree.shape_code()


@given(trees())
def test_json_round_trip(tree):
    text = tree.to_json()
    json.loads(text)
    assert PlantedPlaneTree.from_json(text) == tree


@given(trees())
def test_height_and_sizes(tree):
    assert tree.height == int(tree.depth.max())
    sizes = tree.subtree_sizes()
    assert sizes[tree.root] == tree.n
    for v in range(tree.n):
        assert sizes[v] == 1 + sum(int(sizes[c]) for c in tree.children(v))


# -- reduced and spanned trees ----------------------------------------------------


def test_reduced_tree_examples():
    t = path(3)
    assert reduced_tree(t, [0]).tree.n == 1
    same = reduced_tree(t, range(3))
    assert same.tree.shape_code() == t.shape_code()
    sub = reduced_tree(t, [0, 2])
    assert sub.tree.n == 2 and sub.origin.tolist() == [0, 2]
    assert sub.tree.children(0) == [1]


def test_reduced_tree_needs_root():
    with pytest.raises(TreeError):
        reduced_tree(path(3), [1, 2])


def test_spanned_subtree_examples():
    t = star(3)
    single = spanned_subtree(t, [2])
    assert single.tree.n == 1 and single.origin.tolist() == [2]
    pair = spanned_subtree(t, [1, 2])
    assert sorted(pair.origin.tolist()) == [0, 1, 2]
    assert pair.tree.n == 3
    whole = spanned_subtree(t, [1, 2, 3])
    assert whole.tree.shape_code() == t.shape_code()


def _brute_span(tree: PlantedPlaneTree, R) -> set[int]:
    """Vertices on tree paths between members of R, by walking to the root."""
    def to_root(v):
        out = [v]
        while tree.parent[out[-1]] >= 0:
            out.append(int(tree.parent[out[-1]]))
        return out

    keep = set()
    R = list(R)
    for a in R:
        for b in R:
            pa, pb = to_root(a), to_root(b)
            common = set(pa) & set(pb)
            keep |= {x for x in pa if x not in common} | {x for x in pb if x not in common}
            keep.add(next(x for x in pa if x in common))
    return keep


@given(trees(), st.data())
def test_spanned_subtree_matches_path_union(tree, data):
    R = data.draw(st.sets(st.integers(0, tree.n - 1), min_size=1, max_size=6))
    sub = spanned_subtree(tree, R)
    assert set(sub.origin.tolist()) == _brute_span(tree, R)
    assert sub.tree.n == len(sub.origin)


@given(trees(), st.data())
def test_reduced_tree_keeps_lexicographic_order(tree, data):
    R = data.draw(st.sets(st.integers(0, tree.n - 1), max_size=8)) | {tree.root}
    sub = reduced_tree(tree, R)
    rank = np.empty(tree.n, dtype=np.int64)
    rank[tree.preorder] = np.arange(tree.n)
    # new ids follow the original lexicographic order, which is also the new preorder
    assert np.all(np.diff(rank[sub.origin]) > 0)
    assert np.array_equal(sub.tree.preorder, np.arange(sub.tree.n))
    # parent in the reduced tree is the nearest R-ancestor
    for i, v in enumerate(sub.origin.tolist()):
        p = int(sub.tree.parent[i])
        u = int(tree.parent[v]) if v != tree.root else -1
        while u >= 0 and u not in R:
            u = int(tree.parent[u])
        assert (p < 0 and u < 0) or sub.origin[p] == u


@given(trees(), st.data())
def test_reduced_span_equals_contracted_span(tree, data):
    R = data.draw(st.sets(st.integers(0, tree.n - 1), min_size=1, max_size=6))
    span = spanned_subtree(tree, R)
    top = int(span.origin[span.tree.root])
    keep = set(R) | {top}
    # branch vertices of the spanned tree
    for i in range(span.tree.n):
        if span.tree.degree(i) >= 2 and int(span.origin[i]) != top:
            keep.add(int(span.origin[i]))
        if i == span.tree.root and len(span.tree.children(i)) >= 2:
            keep.add(top)
    local = {int(v): i for i, v in enumerate(span.origin.tolist())}
    within = reduced_tree(span.tree, [local[v] for v in keep])
    assert within.tree.n == len(keep)
    # contracted vertices are exactly the non-kept ones with a single child
    for i, v in enumerate(span.origin.tolist()):
        if v not in keep:
            assert len(span.tree.children(i)) == 1
    # each edge of the reduced tree is a chain to the nearest kept ancestor in the original tree
    for i in range(within.tree.n):
        v = int(span.origin[within.origin[i]])
        p = int(within.tree.parent[i])
        if p < 0:
            assert v == top
            continue
        u = int(tree.parent[v])
        while u not in keep:
            u = int(tree.parent[u])
        assert int(span.origin[within.origin[p]]) == u
