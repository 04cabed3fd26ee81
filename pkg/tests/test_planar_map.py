from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mapforge.closure import sample_closure
from mapforge.planar_map import (
    GenusError,
    MapError,
    PlanarMap,
    build_map,
    check_orientation,
    expected_outdegrees,
    is_minimal,
    minimal_orientation,
)

FAMILIES = ["tri", "quad"]


def directed_faces(m: PlanarMap) -> list[list[int]]:
    """Faces bounded by a directed cycle running against the face walk
    (the walk keeps the face on a fixed side, so these cycles are clockwise)."""
    directed = m.directed()
    out = []
    for f in range(m.n_faces):
        hs = np.flatnonzero(m.face_of == f).tolist()
        if all(directed[h ^ 1] for h in hs):
            out.append(hs)
    return out


def directed_cycle(m: PlanarMap) -> list[int]:
    """Edges of some directed cycle, by depth-first search."""
    directed = m.directed()
    out = {v: [h for h in m.rotation(v) if directed[h]] for v in range(m.n_vertices)}
    state = [0] * m.n_vertices
    stack: list[int] = []

    def dfs(v):
        state[v] = 1
        for h in out[v]:
            w = int(m.vertex_of[h ^ 1])
            stack.append(h)
            if state[w] == 1:
                start = next(i for i, g in enumerate(stack) if int(m.vertex_of[g]) == w)
                return [g >> 1 for g in stack[start:]]
            if state[w] == 0:
                found = dfs(w)
                if found:
                    return found
            stack.pop()
        state[v] = 2
        return None

    for v in range(m.n_vertices):
        if state[v] == 0:
            found = dfs(v)
            if found:
                return found
    return []


def reversed_edges(ori: np.ndarray, edges) -> np.ndarray:
    out = np.array(ori, dtype=np.int8)
    for e in edges:
        out[e] ^= 1
    return out


def test_triangle(triangle_map):
    m = triangle_map
    assert (m.n_vertices, m.n_edges, m.n_faces) == (3, 3, 2)
    assert sorted(m.face_degrees().tolist()) == [3, 3]
    assert m.is_simple()


def test_tetrahedron(tetrahedron):
    m = tetrahedron.map
    assert (m.n_vertices, m.n_edges, m.n_faces) == (4, 6, 4)
    assert m.is_angulation(3) and m.is_simple()


def test_square(square):
    m = square.map
    assert (m.n_vertices, m.n_edges, m.n_faces) == (4, 4, 2)
    assert sorted(m.face_degrees().tolist()) == [4, 4]


def test_cube():
    # vertices 0-3 on the top square, 4-7 below; edge i is half-edges 2i (from a) and 2i+1 (from b)
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)]
    rot = [[] for _ in range(8)]
    pos = np.array([[1, 1], [1, -1], [-1, -1], [-1, 1]], dtype=float)
    coords = np.vstack([pos, 2.5 * pos])
    for i, (a, b) in enumerate(edges):
        rot[a].append(2 * i)
        rot[b].append(2 * i + 1)
    for v in range(8):
        def angle(h, v=v):
            e = edges[h >> 1]
            w = e[1] if h % 2 == 0 else e[0]
            d = coords[w] - coords[v]
            return -np.arctan2(d[1], d[0])  # clockwise
        rot[v].sort(key=angle)
    m = build_map(rot, root=0)
    assert (m.n_vertices, m.n_edges, m.n_faces) == (8, 12, 6)
    assert m.is_angulation(4) and m.is_simple()


def test_genus_error():
    # one vertex, two interleaved loops: a torus
    with pytest.raises(GenusError):
        build_map([[0, 2, 1, 3]], root=0)


def test_rejects_malformed():
    with pytest.raises(MapError):
        build_map([[0, 1, 1]], root=0)
    with pytest.raises(MapError):
        PlanarMap([1, 0, 3], [0, 0, 1], 0)


def test_loops_and_multi_edges_not_simple():
    planar_loop = build_map([[0, 1, 2], [3]], root=0)  # loop at 0 plus a pendant edge
    assert not planar_loop.is_simple()
    digon = build_map([[0, 2], [1, 3]], root=0)
    assert not digon.is_simple()


@pytest.mark.parametrize("fam", FAMILIES)
def test_closure_orientation_passes(fam, tetrahedron, square):
    res = tetrahedron if fam == "tri" else square
    rep = check_orientation(res.map, res.orientation, fam)
    assert rep.ok and rep.offending.shape == (0,)
    if fam == "quad":
        assert sorted(rep.outdegree.tolist()) == [0, 1, 1, 2]
    else:
        assert sorted(rep.outdegree.tolist()) == [0, 1, 2, 3]


@pytest.mark.parametrize("fam", FAMILIES)
def test_reversing_one_edge_gives_two_violations(fam):
    res = sample_closure(30, fam, 1)
    m = res.map
    for e in (0, m.n_edges // 2, m.n_edges - 1):
        rep = check_orientation(m, reversed_edges(res.orientation, [e]), fam)
        assert not rep.ok and rep.offending.shape == (2,)
        assert sorted(rep.offending.tolist()) == sorted(m.vertex_of[[2 * e, 2 * e + 1]].tolist())


@pytest.mark.parametrize("fam", FAMILIES)
def test_expected_profile(fam):
    res = sample_closure(40, fam, 2)
    alpha = expected_outdegrees(res.map, fam)
    sv = res.map.special_vertices()
    assert (alpha[sv["A"]], alpha[sv["B"]]) == (0, 1)
    assert alpha[sv["v"]] == (2 if fam == "tri" else 1)
    # every edge counted once: total outdegree = number of edges
    assert alpha.sum() == res.map.n_edges


@pytest.mark.parametrize("fam", FAMILIES)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 60))
def test_closure_outputs_are_minimal_angulations(fam, seed, n):
    res = sample_closure(n, fam, seed)
    m = res.map
    k = 3 if fam == "tri" else 4
    assert m.n_vertices - m.n_edges + m.n_faces == 2
    assert 2 * m.n_edges == k * m.n_faces
    assert m.is_simple() and m.is_angulation(k)
    assert m.n_vertices == n + 2
    assert is_minimal(m)


@pytest.mark.parametrize("fam", FAMILIES)
def test_reversed_clockwise_cycle_is_not_minimal(fam):
    tested = 0
    for seed in range(15):
        res = sample_closure(25, fam, seed)
        m = res.map
        cycle = directed_cycle(m)
        if not cycle:  # minimal 2-orientations may be acyclic
            continue
        tested += 1
        ori = reversed_edges(res.orientation, cycle)
        assert check_orientation(m, ori, fam).ok  # outdegrees unchanged
        assert not is_minimal(m, ori)
    assert tested >= 5
    if fam == "tri":
        # smallest instance: a clockwise triangular face
        hs = directed_faces(m)[0]
        assert not is_minimal(m, reversed_edges(res.orientation, [h >> 1 for h in hs]))


def test_acyclic_orientation_is_minimal(triangle_map):
    # orient every edge from the smaller to the larger vertex id
    m = triangle_map
    ends = m.vertex_of.reshape(-1, 2)
    ori = (ends[:, 0] > ends[:, 1]).astype(np.int8)
    assert is_minimal(m, ori)


def test_triangle_orientation_forced(triangle_map):
    ori = minimal_orientation(triangle_map, "tri")
    rep = check_orientation(triangle_map, ori, "tri")
    assert rep.ok
    # degrees force every edge: any other orientation breaks the profile
    for mask in range(8):
        alt = np.array([(mask >> i) & 1 for i in range(3)], dtype=np.int8)
        assert check_orientation(triangle_map, alt, "tri").ok == np.array_equal(alt, ori)


def test_tetrahedron_minimal_orientation(tetrahedron):
    m = tetrahedron.map
    assert np.array_equal(minimal_orientation(m, "tri"), tetrahedron.orientation)


@pytest.mark.parametrize("fam", FAMILIES)
def test_minimal_orientation_recovers_closure(fam):
    rng = np.random.default_rng(8)
    for _ in range(250):
        res = sample_closure(int(rng.integers(2, 51)), fam, rng)
        bare = PlanarMap(res.map.next_cw, res.map.vertex_of, res.map.root)
        ori = minimal_orientation(bare, fam)
        assert np.array_equal(ori, res.orientation)
        # fixed point
        assert np.array_equal(minimal_orientation(bare.with_orientation(ori), fam), ori)


@pytest.mark.parametrize("fam", FAMILIES)
def test_minimal_orientation_from_scrambled_start(fam):
    """Starting data does not matter: a reversed clockwise face is undone."""
    res = sample_closure(40, fam, 6)
    m = res.map
    bad = m.with_orientation(reversed_edges(res.orientation, directed_cycle(m)))
    assert not is_minimal(bad)
    assert np.array_equal(minimal_orientation(bad, fam), res.orientation)


def test_minimal_orientation_rejects_non_simple():
    digon = build_map([[0, 2], [1, 3]], root=0)
    with pytest.raises(MapError):
        minimal_orientation(digon, "tri")


@pytest.mark.parametrize("fam", FAMILIES)
def test_serialisation_and_relabelling(fam):
    res = sample_closure(30, fam, 3)
    m = res.map
    again = PlanarMap.from_dict(m.to_dict())
    assert again == m
    # relabelling half-edges and vertices gives the same rooted oriented map
    rng = np.random.default_rng(0)
    perm_e = rng.permutation(m.n_edges)
    flip = rng.integers(0, 2, m.n_edges)
    new_he = np.empty(m.n_half_edges, dtype=np.int64)
    for e in range(m.n_edges):
        new_he[2 * e] = 2 * perm_e[e] + flip[e]
        new_he[2 * e + 1] = 2 * perm_e[e] + 1 - flip[e]
    perm_v = rng.permutation(m.n_vertices)
    next_cw = np.empty_like(m.next_cw)
    next_cw[new_he] = new_he[m.next_cw]
    vertex_of = np.empty_like(m.vertex_of)
    vertex_of[new_he] = perm_v[m.vertex_of]
    ori = np.empty(m.n_edges, dtype=np.int8)
    ori[perm_e] = m.orientation ^ flip
    other = PlanarMap(next_cw, vertex_of, int(new_he[m.root]), ori)
    assert other.same_as(m) and other.canonical_key() == m.canonical_key()
    assert not other.same_as(m.with_orientation(m.orientation ^ 1))
