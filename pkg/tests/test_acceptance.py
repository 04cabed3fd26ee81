"""Acceptance criteria 1-8, each at its stated size and tolerance.

Every test records one ``criterion N: PASS/FAIL | ...`` line (printed in the
terminal summary) before asserting, so a failing criterion still reports its
numbers.  Seeds are fixed; the whole module takes roughly ten minutes on one
core.
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mapforge import snake
from mapforge._rng import stream_rng
from mapforge.blossoming import (
    MapFamily,
    construction_pmf,
    enumerate_balanced,
    enumerate_trees,
    offspring_pmf,
    sample_offspring,
)
from mapforge.cli import verify_map
from mapforge.closure import close, open_map, sample_closure
from mapforge.geodesics import label_distance_profile
from mapforge.metric import Correspondence, FiniteMetricSpace, distortion, gh_bruteforce

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

FAMILIES = ("tri", "quad")
SEED = 20240611

# cross-family KS threshold at n = 2e4, N = 2000; an empirical value, frozen here
KS_THRESHOLD = 0.06


# -- 1. exhaustive bijection ---------------------------------------------------------------


def test_criterion_1_exhaustive_bijection(acceptance_record):
    t0 = time.perf_counter()
    sizes = {"tri": range(1, 6), "quad": range(2, 6)}
    failures: list[str] = []
    identity_2n_minus_1: dict[str, bool] = {}
    for fam in FAMILIES:
        identity_2n_minus_1[fam] = True
        for n in sizes[fam]:
            trees = enumerate_trees(n, fam)
            balanced = enumerate_balanced(n, fam)
            keys = set()
            for T in balanced:
                res = close(T)
                m = res.map
                if not m.is_simple():
                    failures.append(f"{fam} n={n}: closure not simple")
                opened, _ = open_map(m, fam)
                if opened != T:
                    failures.append(f"{fam} n={n}: open(close(T)) != T")
                if close(opened).map != m:
                    failures.append(f"{fam} n={n}: close(open(M)) != M")
                keys.add(m.canonical_key())
            if len(keys) != len(balanced):
                failures.append(f"{fam} n={n}: {len(balanced) - len(keys)} repeated closures")
            if len(trees) != (2 * n - 1) * len(balanced):
                identity_2n_minus_1[fam] = False
                failures.append(f"{fam} n={n}: |T_n| = {len(trees)} != (2n-1)*#balanced = "
                                f"{(2 * n - 1) * len(balanced)}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    detail = (f"round trips and distinctness hold for tri n<=5, quad 2<=n<=5; "
              f"|T_n|=(2n-1)#balanced: tri {identity_2n_minus_1['tri']}, quad {identity_2n_minus_1['quad']}; "
              f"{elapsed:.1f}s")
    if failures:
        detail += "; " + "; ".join(failures[:6])
    acceptance_record(1, ok, detail)
    assert ok, detail


# -- 2 and 3. sampled bijection and distance relations ---------------------------------------


@pytest.fixture(scope="module")
def sampled_verification():
    """Full verify suite on 1000 maps per family at n = 1e2, 1e3, 1e4."""
    t0 = time.perf_counter()
    out = {}
    for f_idx, fam in enumerate(FAMILIES):
        F = MapFamily.parse(fam)
        for n_idx, n in enumerate((100, 1000, 10000)):
            base = int(stream_rng(SEED, 10 * f_idx + n_idx).integers(2**63))
            reps = []
            for i in range(1000):
                rng = stream_rng(base, i)
                res = sample_closure(n - 2, F, rng)
                reps.append(verify_map(res.map, F, f"{fam} n={n} #{i}", int(rng.integers(2**63)),
                                       lambda_star=res.lambda_star, tree=res.tree,
                                       sources=100, pairs=1000))
            out[fam, n] = reps
    return out, time.perf_counter() - t0


def test_criterion_2_sampled_bijection(sampled_verification, acceptance_record):
    reports, elapsed = sampled_verification
    failed = {key: sum(not r.ok for r in reps) for key, reps in reports.items()}
    round_trip = all(r.checks.get("open_close_tree", False) for reps in reports.values() for r in reps)
    total_failed = sum(failed.values())
    ok = total_failed == 0 and round_trip and elapsed < 300
    detail = (f"{sum(len(r) for r in reports.values())} maps, {total_failed} failing the verify suite, "
              f"open(close(T)) = T on all: {round_trip}; {elapsed:.0f}s (limit 300s)")
    if total_failed:
        detail += "; " + ", ".join(f"{f} n={n}: {c}" for (f, n), c in failed.items() if c)
    acceptance_record(2, ok, detail)
    assert ok, detail


def test_criterion_3_distance_relations(sampled_verification, acceptance_record):
    reports, _ = sampled_verification
    parts = []
    literal_total = 0
    for fam in FAMILIES:
        drs = [r.distance for (f, _), reps in reports.items() if f == fam for r in reps]
        sandwich = sum(d.sandwich for d in drs)
        leftmost = sum(d.leftmost for d in drs)
        wrap = sum(d.leftmost_root_wrap for d in drs)
        checked = sum(d.leftmost_checked for d in drs)
        winding = sum(d.winding for d in drs)
        wchecked = sum(d.winding_checked for d in drs)
        two_point = sum(d.two_point for d in drs)
        tchecked = sum(d.two_point_checked for d in drs)
        literal = sum(d.literal_violations for d in drs)
        literal_total += literal
        parts.append(f"{fam}: sandwich {sandwich}, leftmost {leftmost + wrap}/{checked} "
                     f"({wrap} through the root vertex), winding {winding}/{wchecked}, "
                     f"two-point {two_point}/{tchecked}")
    ok = literal_total == 0
    acceptance_record(3, ok, f"{literal_total} violations; " + "; ".join(parts))
    assert ok, parts


# -- 4. offspring law --------------------------------------------------------------------------

_OFFSPRING_LINES: list[tuple[bool, str]] = []


@pytest.mark.parametrize("fam, p0, m2", [("tri", Fraction(27, 64), Fraction(7, 3)),
                                         ("quad", Fraction(4, 9), Fraction(5, 2))])
def test_criterion_4_offspring_law(fam, p0, m2, acceptance_record):
    exact = offspring_pmf(fam, 0) == p0 and all(construction_pmf(fam, c) == offspring_pmf(fam, c)
                                                for c in range(40))
    N = 10**6
    x = sample_offspring(fam, N, stream_rng(SEED, 400 + len(fam))).astype(float)
    z_mean = (x.mean() - 1) / (x.std(ddof=1) / np.sqrt(N))
    z_m2 = ((x**2).mean() - float(m2)) / ((x**2).std(ddof=1) / np.sqrt(N))
    ok = exact and abs(z_mean) <= 4 and abs(z_m2) <= 4
    line = (f"{fam}: P(B=0) = {offspring_pmf(fam, 0)} exact, construction pmf matches: {exact}; "
            f"mean {x.mean():.4f} (z={z_mean:+.2f}), E[B^2] {(x**2).mean():.4f} vs {m2} (z={z_m2:+.2f})")
    _OFFSPRING_LINES.append((ok, line))
    acceptance_record(4, all(o for o, _ in _OFFSPRING_LINES), "; ".join(s for _, s in _OFFSPRING_LINES))
    assert ok, line


# -- 5. scaling-limit trend --------------------------------------------------------------------


def test_criterion_5_label_distance_trend(acceptance_record):
    t0 = time.perf_counter()
    medians = {}
    for f_idx, fam in enumerate(FAMILIES):
        F = MapFamily.parse(fam)
        for n in (1000, 10000, 100000):
            vals = [label_distance_profile(sample_closure(n - 2, F, stream_rng(SEED + 5 + f_idx, 1000 * n + i)))
                    .max_err_scaled for i in range(50)]
            medians[fam, n] = float(np.median(vals))
    elapsed = time.perf_counter() - t0
    dec = {fam: medians[fam, 1000] > medians[fam, 10000] > medians[fam, 100000] for fam in FAMILIES}
    ok = all(dec.values()) and elapsed < 1800
    detail = "; ".join(f"{fam}: " + " > ".join(f"{medians[fam, n]:.4f}" for n in (1000, 10000, 100000))
                       + f" strictly decreasing {dec[fam]}" for fam in FAMILIES) + f"; {elapsed:.0f}s"
    acceptance_record(5, ok, detail)
    assert ok, detail


# -- 6. universality cross-check ---------------------------------------------------------------


def test_criterion_6_cross_family_ks(acceptance_record):
    ks_a, _, _ = snake.cross_family_ks(20000, 2000, SEED)
    ks_b, _, _ = snake.cross_family_ks(40000, 2000, SEED)
    ok = ks_a.statistic <= KS_THRESHOLD and ks_b.statistic < ks_a.statistic
    detail = (f"KS at n=2e4: {ks_a.statistic:.4f} (threshold {KS_THRESHOLD}, p={ks_a.pvalue:.3g}); "
              f"at n=4e4: {ks_b.statistic:.4f} (p={ks_b.pvalue:.3g}); decreasing {ks_b.statistic < ks_a.statistic}")
    acceptance_record(6, ok, detail)
    assert ok, detail


# -- 7. symmetrization ---------------------------------------------------------------------------


def test_criterion_7_symmetrization(acceptance_record):
    contour_bad = delta_bad = 0
    for i in range(10**4):
        rng = stream_rng(SEED + 7, i)
        fam = FAMILIES[i % 2]
        V = snake.sample_valid_labelled_tree(int(rng.integers(2, 200)), fam, rng)
        R = snake.random_marked_set(V.tree, int(rng.integers(0, 9)), rng)
        c = snake.check_symmetrization(V, R, rng)
        contour_bad += not c.contour_preserved
        delta_bad += abs(c.delta - c.delta_sym) > 2
    laws = {fam: snake.symmetrized_displacement_law_test(20, 10**5, SEED + 70 + j, fam)
            for j, fam in enumerate(FAMILIES)}
    worst = max(r.max_abs_z() for r in laws.values())
    raw = laws["tri"].coordinate(2, 0)
    ok = contour_bad == 0 and delta_bad == 0 and worst <= 4
    detail = (f"10^4 (tree, R): contour times broken {contour_bad}, |Delta - Delta'| > 2 {delta_bad}; "
              f"symmetrized means, N=1e5 trees per family: max |z| = {worst:.2f} over "
              f"{sum(len(r.coords) for r in laws.values())} coordinates; unsymmetrized tri k=2 first "
              f"coordinate {raw.mean_raw:+.4f} (exact {raw.exact_raw}; -1/6 is not reproduced)")
    acceptance_record(7, ok, detail)
    assert ok, detail


# -- 8. metric module ----------------------------------------------------------------------------


def _two_point(a: float) -> FiniteMetricSpace:
    return FiniteMetricSpace(np.array([[0.0, a], [a, 0.0]]))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1), st.integers(1, 6))
def _distortion_monotone(na, nb, seed, extra):
    rng = np.random.default_rng(seed)
    A = FiniteMetricSpace.from_points(rng.normal(size=(na, 2)))
    B = FiniteMetricSpace.from_points(rng.normal(size=(nb, 2)))
    pairs = [(a, int(rng.integers(nb))) for a in range(na)] + [(int(rng.integers(na)), b) for b in range(nb)]
    C = Correspondence.of(pairs)
    D = C.union(Correspondence.of(zip(rng.integers(na, size=extra).tolist(), rng.integers(nb, size=extra).tolist())))
    assert distortion(D, A, B) >= distortion(C, A, B)


def test_criterion_8_metric(acceptance_record):
    grid = [0, 0.5, 1, 2, 3.5, 7]
    two_point_ok = all(gh_bruteforce(_two_point(a), _two_point(b)) == pytest.approx(abs(a - b) / 2)
                       for a in grid for b in grid)
    rng = np.random.default_rng(SEED)
    iso = max(gh_bruteforce(A, A.relabelled(rng.permutation(5)))
              for A in (FiniteMetricSpace.from_points(rng.normal(size=(5, 3))) for _ in range(50)))
    try:
        _distortion_monotone()
        monotone = True
    except AssertionError:
        monotone = False
    ok = two_point_ok and iso < 1e-9 and monotone
    detail = (f"two-point cases ({len(grid) ** 2}) equal |a-b|/2: {two_point_ok}; "
              f"max d_GH over 50 isometric 5-point pairs {iso:.1e}; distortion monotone (200 examples): {monotone}")
    acceptance_record(8, ok, detail)
    assert ok, detail
