from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from mapforge.blossoming import (
    MapFamily,
    balanced_corners,
    enumerate_trees,
    sample_blossoming_tree,
)
from mapforge.closure import (
    DomainError,
    close,
    close_by_local_closures,
    close_marked,
    open_map,
    sample_closure,
)
from mapforge.planar_map import check_orientation, is_minimal

FAMILIES = ["tri", "quad"]
# rooted simple maps with n + 2 vertices, n = 1..5 (triangulations) and 2..5 (quadrangulations)
MAP_COUNTS = {"tri": {1: 1, 2: 1, 3: 3, 4: 13, 5: 68}, "quad": {2: 1, 3: 2, 4: 6, 5: 22}}


def assert_valid_closure(res, fam):
    m = res.map
    k = MapFamily.parse(fam).face_degree
    assert m.is_simple() and m.is_angulation(k)
    assert m.n_vertices - m.n_edges + m.n_faces == 2
    assert check_orientation(m, res.orientation, fam).ok
    assert is_minimal(m)


def test_single_vertex_gives_triangle():
    (T,) = enumerate_trees(1, "tri")
    res = close(T)
    assert_valid_closure(res, "tri")
    assert (res.map.n_vertices, res.map.n_edges, res.map.n_faces) == (3, 3, 2)


def test_n2_gives_tetrahedron(enumerated):
    keys = set()
    for T in enumerated["tri", 2][0]:
        for c in balanced_corners(T):
            res = close(T, c)
            assert_valid_closure(res, "tri")
            assert (res.map.n_vertices, res.map.n_faces) == (4, 4)
            keys.add(res.map.canonical_key())
    assert len(keys) == 1


def test_quad_n2_gives_square(square):
    assert_valid_closure(square, "quad")
    assert sorted(square.map.face_degrees().tolist()) == [4, 4]


def test_unbalanced_corner_rejected():
    T = sample_blossoming_tree(10, "tri", 0)
    bad = next(c for c in T.inner_corners().tolist() if c not in balanced_corners(T))
    with pytest.raises(DomainError):
        close(T, bad)


@pytest.mark.parametrize("fam", FAMILIES)
def test_special_corner_labels(fam):
    for s in range(20):
        res = sample_closure(40, fam, s)
        m = res.map
        at_a = res.lambda_star[m.vertex_of == res.vertex_A]
        at_b = res.lambda_star[m.vertex_of == res.vertex_B]
        assert sorted(at_a.tolist())[:2] == [0, 1] and (at_a == 0).sum() == 1 and at_a.max() == 1
        assert set(at_b.tolist()) == {1, 2} and (at_b == 1).sum() == 1
        sv = m.special_vertices()
        assert (sv["A"], sv["B"]) == (res.vertex_A, res.vertex_B)


@pytest.mark.parametrize("fam", FAMILIES)
def test_bijection_exhaustive(fam, enumerated):
    for n, count in MAP_COUNTS[fam].items():
        trees, balanced = enumerated[fam, n]
        keys = set()
        for B in balanced:
            res = close(B)
            assert_valid_closure(res, fam)
            assert res.map.n_vertices == n + 2
            T, _ = open_map(res.map, fam)
            assert T == B
            again = close(T)
            assert again.map == res.map and np.array_equal(again.lambda_star, res.lambda_star)
            keys.add(res.map.canonical_key())
        assert len(keys) == len(balanced) == count
        # every rooting at a balanced corner of every tree reopens to itself
        for T in trees:
            for c in balanced_corners(T):
                res = close(T, c)
                assert open_map(res.map, fam)[0] == (T.reroot(c)[0] if c else T)
                assert res.map.canonical_key() in keys


@pytest.mark.parametrize("fam", FAMILIES)
def test_bijection_sampled(fam):
    rng = np.random.default_rng(21)
    for _ in range(250):
        n = int(rng.integers(MapFamily.parse(fam).min_inner, 201))
        res = sample_closure(n, fam, rng)
        assert_valid_closure(res, fam)
        T, ids = open_map(res.map, fam)
        assert T == res.tree
        assert np.array_equal(ids[: n], np.arange(n)) and (ids[n:] == -1).all()
        assert close(T).map == res.map


def test_open_rejects_non_minimal():
    res = sample_closure(20, "tri", 0)
    with pytest.raises(DomainError):
        open_map(res.map.with_orientation(None), "tri")
    # reverse a clockwise face: outdegrees stay, minimality goes
    d = res.map.directed()
    for f in range(res.map.n_faces):
        hs = np.flatnonzero(res.map.face_of == f)
        if all(d[h ^ 1] for h in hs):
            ori = np.array(res.orientation)
            ori[hs >> 1] ^= 1
            with pytest.raises(DomainError):
                open_map(res.map.with_orientation(ori), "tri")
            return
    pytest.fail("no clockwise face found")


@pytest.mark.parametrize("fam", FAMILIES)
def test_local_closures_agree_exhaustive(fam, enumerated):
    for n in range(MapFamily.parse(fam).min_inner, 5):
        for B in enumerated[fam, n][1]:
            assert close_by_local_closures(B) == close(B).map


@pytest.mark.parametrize("fam", FAMILIES)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 100))
def test_local_closures_agree_random(fam, seed, n):
    res = sample_closure(n, fam, seed)
    assert close_by_local_closures(res.tree) == res.map


@pytest.mark.parametrize("fam, corners", [("tri", lambda n: 4 * n - 2), ("quad", lambda n: 3 * n - 2)])
def test_inner_corner_count(fam, corners):
    for n in range(MapFamily.parse(fam).min_inner, 7):
        for T in enumerate_trees(n, fam):
            assert T.inner_corners().shape[0] == corners(n)


@pytest.mark.parametrize("fam", FAMILIES)
def test_marked_closure_injective(fam, enumerated):
    for n in range(MapFamily.parse(fam).min_inner, 5):
        images = set()
        total = 0
        for B in enumerated[fam, n][1]:
            res, root_image = close_marked(B, 0, 0)
            assert root_image == res.map.root
            key = res.map.canonical_key()
            for c in B.inner_corners().tolist():
                _, h = close_marked(B, 0, c)
                images.add((key, h))
                total += 1
        assert len(images) == total


def test_marked_corner_must_be_inner():
    T = sample_blossoming_tree(5, "tri", 1)
    blossom = int(np.flatnonzero(T.corners[2])[0])
    with pytest.raises(DomainError):
        close_marked(T, balanced_corners(T)[0], blossom)


@pytest.mark.slow
@pytest.mark.parametrize("fam, n", [("tri", 3), ("quad", 4)])
def test_sampled_maps_uniform(fam, n):
    """Closing uniform trees gives uniform rooted maps."""
    N = 100_000 if fam == "tri" else 60_000
    rng = np.random.default_rng(17)
    seen = Counter(sample_closure(n, fam, rng).map.canonical_key() for _ in range(N))
    assert len(seen) == MAP_COUNTS[fam][n]
    assert stats.chisquare(list(seen.values())).pvalue > 1e-3


def test_closure_result_dict():
    res = sample_closure(10, "quad", 2)
    data = res.to_dict()
    assert data["family"] == "quad" and data["A"] == res.vertex_A
    assert len(data["lambda_star"]) == res.map.n_half_edges
