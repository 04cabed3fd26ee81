"""Compiled kernels versus their interpreted fallbacks.

Times each hot kernel on inputs taken from one sampled map, once through the
``@njit`` version (after a warm-up call that triggers compilation) and once
through ``python_impl`` (the same source run by CPython), checks that the two
return identical results, and prints a table.

    python benchmarks/bench_kernels.py [--n 20000] [--family tri] [--repeat 3]

Under ``MAPFORGE_NUMBA=0`` both columns time the interpreted code.
"""

from __future__ import annotations

import argparse
from time import perf_counter

import numpy as np

from mapforge import _kernels as K
from mapforge._accel import NUMBA_ENABLED, python_impl
from mapforge.blossoming import sample_blossoming_tree
from mapforge.closure import sample_closure
from mapforge.plane_tree import PlantedPlaneTree


def best_time(fn, args, repeat: int) -> tuple[float, object]:
    out = fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = perf_counter()
        out = fn(*args)
        best = min(best, perf_counter() - t0)
    return best, out


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def cases(n: int, family: str, seed: int):
    rng = np.random.default_rng(seed)
    T = sample_blossoming_tree(n, family, rng)
    c_he, c_vertex, c_blossom, e_stem, _, _ = T.corners
    labels = T.labelling.labels
    res = sample_closure(n, family, rng)
    m = res.map
    ptr, nbr, _ = m.adjacency
    tree = PlantedPlaneTree.from_parent(K.valid_labelling_from_code(T.code, T.n, 1)[0])
    tptr, tidx = tree.lex_csr
    disp = rng.integers(-1, 2, size=tree.n)
    span = np.zeros(tree.n, dtype=bool)
    span[tree.root] = True
    keys = rng.random(tidx.shape[0])
    values = rng.integers(0, 1000, size=4 * n)
    A = int(m.vertex_of[m.root])
    succ = K.leftmost_successor(m.next_cw, m.vertex_of, m.orientation, A)
    lengths = K.path_lengths(succ, m.directed())
    us = rng.integers(0, m.n_vertices, size=200)
    vs = rng.integers(0, m.n_vertices, size=200)
    return [
        ("tree_contour", K.tree_contour, (T.code, T.n)),
        ("stem_matching", K.stem_matching, (c_blossom, labels)),
        ("close_kernel", K.close_kernel, (c_he, c_vertex, c_blossom, e_stem, labels, T.n)),
        ("open_kernel", K.open_kernel, (m.next_cw, m.vertex_of, m.orientation, m.root, m.n_vertices - 2)),
        ("bfs", K.bfs, (ptr, nbr, 0)),
        ("pair_distances", K.pair_distances, (ptr, nbr, us, vs)),
        ("leftmost_successor", K.leftmost_successor, (m.next_cw, m.vertex_of, m.orientation, A)),
        ("path_lengths", K.path_lengths, (succ, m.directed())),
        ("path_last", K.path_last, (succ, lengths)),
        ("contour_walk", K.contour_walk, (tptr, tidx, tree.root, tree.n)),
        ("symmetrize_blocks", K.symmetrize_blocks, (tptr, tidx, disp, span, keys)),
        ("sparse_table", K.sparse_table, (values,)),
    ]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="inner tree vertices")
    ap.add_argument("--family", default="tri", choices=["tri", "quad"])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print(f"numba enabled: {NUMBA_ENABLED}; family={args.family} n={args.n}")
    print(f"{'kernel':<20}{'compiled [ms]':>15}{'python [ms]':>15}{'speed-up':>10}  equal")
    for name, fn, fargs in cases(args.n, args.family, args.seed):
        t_fast, out_fast = best_time(fn, fargs, args.repeat)
        t_slow, out_slow = best_time(python_impl(fn), fargs, 1)
        print(f"{name:<20}{1e3 * t_fast:>15.2f}{1e3 * t_slow:>15.2f}{t_slow / t_fast:>10.1f}  "
              f"{same(out_fast, out_slow)}")


if __name__ == "__main__":
    main()
