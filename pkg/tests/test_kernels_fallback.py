"""Compiled kernels agree with the interpreted source they are built from."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapforge import _kernels as K
from mapforge._accel import NUMBA_ENABLED, python_impl
from mapforge.blossoming import sample_blossoming_tree
from mapforge.closure import sample_closure
from mapforge.plane_tree import PlantedPlaneTree


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def kernel_cases(n: int, family: str, seed: int):
    rng = np.random.default_rng(seed)
    T = sample_blossoming_tree(n, family, rng)
    c_he, c_vertex, c_blossom, e_stem, _, _ = T.corners
    labels = T.labelling.labels
    res = sample_closure(n, family, rng)
    m = res.map
    ptr, nbr, _ = m.adjacency
    A = int(m.vertex_of[m.root])
    ori = m.orientation
    succ = K.leftmost_successor(m.next_cw, m.vertex_of, ori, A)
    lengths = K.path_lengths(succ, m.directed())
    tree = PlantedPlaneTree.from_parent(K.valid_labelling_from_code(T.code, T.n, 1)[0])
    tptr, tidx = tree.lex_csr
    disp = rng.integers(-1, 2, size=tree.n)
    span = rng.random(tree.n) < 0.3
    span[tree.root] = True
    keys = rng.random(tidx.shape[0])
    nv = m.n_vertices
    us = rng.integers(0, nv, size=50)
    vs = rng.integers(0, nv, size=50)
    return [
        ("tree_contour", K.tree_contour, (T.code, T.n)),
        ("stem_matching", K.stem_matching, (c_blossom, labels)),
        ("close_kernel", K.close_kernel, (c_he, c_vertex, c_blossom, e_stem, labels, T.n)),
        ("open_kernel", K.open_kernel, (m.next_cw, m.vertex_of, ori, m.root, nv - 2)),
        ("face_orbits", K.face_orbits, (m.next_cw,)),
        ("vertex_orbit_count", K.vertex_orbit_count, (m.next_cw,)),
        ("canonical_relabel", K.canonical_relabel, (m.next_cw, m.root)),
        ("bfs", K.bfs, (ptr, nbr, 0)),
        ("leftmost_successor", K.leftmost_successor, (m.next_cw, m.vertex_of, ori, A)),
        ("path_lengths", K.path_lengths, (succ, m.directed())),
        ("path_last", K.path_last, (succ, lengths)),
        ("pair_distances", K.pair_distances, (ptr, nbr, us, vs)),
        ("contour_walk", K.contour_walk, (tptr, tidx, tree.root, tree.n)),
        ("symmetrize_blocks", K.symmetrize_blocks, (tptr, tidx, disp, span, keys)),
        ("sparse_table", K.sparse_table, (rng.integers(0, 1000, size=4 * n),)),
    ]


CASES = [(fam, seed) for fam in ("tri", "quad") for seed in (0, 1)]


@pytest.mark.parametrize("family, seed", CASES)
def test_compiled_equals_interpreted(family, seed):
    for name, fn, args in kernel_cases(300, family, seed):
        assert same(fn(*args), python_impl(fn)(*args)), name


def test_python_impl_unwraps_compiled_kernels():
    if NUMBA_ENABLED:
        assert python_impl(K.bfs) is K.bfs.py_func
    else:
        assert python_impl(K.bfs) is K.bfs


@settings(max_examples=30)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=40))
def test_cycle_lemma_shift_agrees(offspring):
    # any sequence with sum = len - 1 is a Lukasiewicz word up to rotation
    k = len(offspring) - 1 - sum(offspring)
    if k < 0:
        return
    x = np.array(offspring + [0] * k, dtype=np.int64)
    if x.shape[0] > 60:
        return
    assert same(K.cycle_lemma_shift(x), python_impl(K.cycle_lemma_shift)(x))


@settings(max_examples=30)
@given(st.integers(2, 60), st.integers(0, 2**32))
def test_pair_distances_match_bfs(n, seed):
    res = sample_closure(n, "tri" if seed % 2 else "quad", np.random.default_rng(seed))
    ptr, nbr, _ = res.map.adjacency
    nv = res.map.n_vertices
    rng = np.random.default_rng(seed + 1)
    us = rng.integers(0, nv, size=20)
    vs = rng.integers(0, nv, size=20)
    d = K.pair_distances(ptr, nbr, us, vs)
    for u, v, duv in zip(us, vs, d):
        assert duv == K.bfs(ptr, nbr, int(u))[v]


def test_fallback_env_gives_identical_samples():
    code = (
        "import numpy as np, mapforge._accel as a;"
        "from mapforge.cli import canonical_json, checksum, result_record;"
        "from mapforge.closure import sample_closure;"
        "print(a.NUMBA_ENABLED, checksum(canonical_json(result_record("
        "sample_closure(40, 'quad', np.random.default_rng(5))))))"
    )
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, MAPFORGE_NUMBA=flag)
        outs[flag] = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                    text=True, check=True).stdout.split()
    assert outs["0"][0] == "False"
    assert outs["0"][1] == outs["1"][1]
