"""Command-line interface: ``mapforge sample | verify | stats | enumerate``.

Exit codes: 0 every check passed, 1 an invariant failed, 2 invalid input
(arguments, unreadable or malformed files), 3 a resource guard was hit.

``--n`` is the number of map vertices, except for ``enumerate`` where it is
the number of inner tree vertices (the map then has ``n + 2`` vertices).

Sample files are canonical JSON (sorted keys, no whitespace) followed by a
newline.  The checksum printed for each sample is the 64-bit FNV-1a hash
(offset basis 0xcbf29ce484222325, prime 0x100000001b3) of the canonical JSON
bytes, written as 16 hex digits.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import __version__
from ._rng import MASK64, stream_rng
from .blossoming import GuardError, MapFamily, enumerate_trees, is_balanced
from .closure import ClosureResult, DomainError, close, open_map, sample_closure
from .geodesics import DistanceReport, label_distance_profile, verify_distance_relations
from .planar_map import MapError, PlanarMap, check_orientation, is_minimal

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def checksum(text: str) -> str:
    return f"{fnv1a64(text.encode()):016x}"


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


# ---------------------------------------------------------------------------
# map files
# ---------------------------------------------------------------------------

CSV_FIELDS = ["half_edge", "vertex", "next_cw", "out", "lambda_star", "root", "family"]


def result_record(res: ClosureResult) -> dict:
    """Serializable description of a sampled map.  The ids of the unplanted
    tree the sampler started from are dropped: they do not describe the map."""
    rec = res.to_dict()
    rec.pop("tree_vertex_ids", None)
    return rec


def record_to_csv(rec: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    ori = rec["orientation"]
    for h in range(rec["n_half_edges"]):
        out = int((h & 1) == ori[h >> 1])
        w.writerow([h, rec["vertex_of"][h], rec["next_cw"][h], out, rec["lambda_star"][h],
                    int(h == rec["root_half_edge"]), rec["family"]])
    return buf.getvalue()


def _csv_to_record(text: str, where: str) -> dict:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_FIELDS:
        raise InputError(f"{where}: line 1: expected header {','.join(CSV_FIELDS)}")
    body = rows[1:]
    H = len(body)
    vertex_of, next_cw, out, lam = [0] * H, [0] * H, [0] * H, [0] * H
    root, family = None, None
    for line, row in enumerate(body, start=2):
        try:
            h, v, nx, o, lm, r = (int(x) for x in row[:6])
            fam = row[6]
        except (ValueError, IndexError):
            raise InputError(f"{where}: line {line}: malformed row {row!r}") from None
        if not 0 <= h < H:
            raise InputError(f"{where}: line {line}: half-edge {h} out of range")
        vertex_of[h], next_cw[h], out[h], lam[h] = v, nx, o, lm
        if r:
            root = h
        family = fam
    if root is None:
        raise InputError(f"{where}: no root half-edge marked")
    ori = [0] * (H // 2)
    for e in range(H // 2):
        ori[e] = 0 if out[2 * e] else 1
    return dict(n_half_edges=H, vertex_of=vertex_of, next_cw=next_cw, orientation=ori,
                lambda_star=lam, root_half_edge=root, family=family)


def load_record(path: Path) -> dict:
    where = str(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{where}: cannot read: {exc.strerror}") from None
    if path.suffix == ".csv":
        return _csv_to_record(text, where)
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(rec, dict):
        raise InputError(f"{where}: expected a JSON object")
    return rec


def record_to_map(rec: dict, where: str) -> tuple[PlanarMap, MapFamily]:
    try:
        fam = MapFamily.parse(rec.get("family", ""))
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None
    try:
        m = PlanarMap.from_dict(rec)
    except (MapError, ValueError, TypeError, IndexError) as exc:
        raise InputError(f"{where}: invalid rotation system: {exc}") from None
    return m, fam


# ---------------------------------------------------------------------------
# verification suite
# ---------------------------------------------------------------------------


@dataclass
class VerifyReport:
    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    details: list[str] = field(default_factory=list)
    distance: DistanceReport | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checks": self.checks, "details": self.details}


def verify_map(m: PlanarMap, fam: MapFamily, name: str, seed: int, *,
               lambda_star=None, tree=None, sources: int = 100, pairs: int = 1000) -> VerifyReport:
    """Deterministic invariant suite on one rooted map with its orientation.
    ``tree``, when given, is the balanced tree ``m`` was closed from; opening
    ``m`` must give it back."""
    rep = VerifyReport(name)
    c = rep.checks
    c["simple"] = m.is_simple()
    c["euler"] = m.n_vertices - m.n_edges + m.n_faces == 2
    c["face_degree"] = m.is_angulation(fam.face_degree)
    if m.orientation is None:
        c["orientation"] = False
        rep.details.append("no orientation given")
        return rep
    if not (c["simple"] and c["face_degree"]):
        rep.details.append(f"not a simple {fam.value} map")
        return rep
    ori = check_orientation(m, m.orientation, fam)
    c["orientation"] = ori.ok
    if not ori.ok:
        rep.details.append("outdegree mismatch at vertices " + ", ".join(
            f"{int(v)} (out {int(ori.outdegree[v])}, expected {int(ori.expected[v])})" for v in ori.offending[:10]))
        return rep
    c["minimal"] = is_minimal(m)
    if not c["minimal"]:
        rep.details.append("orientation has a counterclockwise cycle")
        return rep
    try:
        T, _ = open_map(m, fam, check_minimal=False)
        res = close(T)
    except DomainError as exc:
        c["round_trip"] = False
        rep.details.append(f"opening failed: {exc}")
        return rep
    same = res.map == m
    if lambda_star is not None:
        same = same and np.array_equal(np.asarray(lambda_star), res.lambda_star)
    c["round_trip"] = bool(same and T == open_map(res.map, fam, check_minimal=False)[0])
    if tree is not None:
        c["open_close_tree"] = T == tree
    if not c["round_trip"]:
        rep.details.append("close(open(M)) differs from M")
        return rep
    dr = verify_distance_relations(res, seed, n_sources=sources, n_pairs=pairs)
    rep.distance = dr
    c["label_sandwich"] = dr.sandwich == 0
    c["label_lipschitz"] = dr.lipschitz == 0
    c["leftmost_identity"] = dr.leftmost == 0
    c["winding_bound"] = dr.winding == 0
    c["two_point_bound"] = dr.two_point == 0
    rep.details.extend(dr.details)
    return rep


def _check_n(fam: MapFamily, n: int) -> None:
    if n - 2 < fam.min_inner:
        raise InputError(f"--n must be at least {fam.min_inner + 2} for {fam.value}, got {n}")


def _run_streams(fn, count: int, threads: int):
    from .snake import run_streams

    return run_streams(fn, count, threads)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
        return
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    except OSError as exc:
        raise InputError(f"{out}: cannot write: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

family_opt = click.option("--family", type=click.Choice(["tri", "quad"]), default="tri", show_default=True)
seed_opt = click.option("--seed", type=click.IntRange(0, MASK64), default=0, show_default=True,
                        help="Unsigned 64-bit run seed; sample i uses stream i.")
threads_opt = click.option("--threads", type=click.IntRange(1, 256), default=1, show_default=True)
format_opt = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="mapforge")
def main() -> None:
    """Uniform random simple triangulations and quadrangulations."""


@main.command()
@family_opt
@click.option("--n", "n", type=int, required=True, help="Number of map vertices.")
@click.option("--samples", type=click.IntRange(1), default=1, show_default=True)
@seed_opt
@threads_opt
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("."), show_default=True,
              help="Output directory.")
@format_opt
def sample(family, n, samples, seed, threads, out, fmt):
    """Sample rooted simple maps with their minimal orientation and labels."""
    fam = MapFamily.parse(family)
    _check_n(fam, n)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"{out}: cannot create directory: {exc.strerror}") from None

    def one(i: int) -> str:
        res = sample_closure(n - 2, fam, stream_rng(seed, i))
        return canonical_json(result_record(res))

    texts = _run_streams(one, samples, threads)
    width = len(str(samples - 1))
    for i, text in enumerate(texts):
        path = out / f"{fam.value}_n{n}_s{seed}_{i:0{width}d}.{fmt}"
        body = text + "\n" if fmt == "json" else record_to_csv(json.loads(text))
        _emit(body, path)
        click.echo(f"{i}\t{checksum(text)}\t{path}")


@main.command()
@click.argument("paths", nargs=-1, type=click.Path(path_type=Path))
@family_opt
@click.option("--n", "n", type=int, default=None, help="Sample maps with n vertices instead of reading files.")
@click.option("--samples", type=click.IntRange(1), default=1, show_default=True)
@seed_opt
@threads_opt
@click.option("--sources", type=click.IntRange(0), default=100, show_default=True,
              help="Random BFS sources for the winding bound.")
@click.option("--pairs", type=click.IntRange(0), default=1000, show_default=True,
              help="Random vertex pairs for the two-point bound.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
def verify(paths, family, n, samples, seed, threads, sources, pairs, out):
    """Run the invariant suite on map files, or on freshly sampled maps."""
    jobs: list[tuple[str, PlanarMap, MapFamily, object]] = []
    if paths:
        for p in paths:
            rec = load_record(p)
            m, fam = record_to_map(rec, str(p))
            jobs.append((str(p), m, fam, rec.get("lambda_star")))
    elif n is not None:
        fam = MapFamily.parse(family)
        _check_n(fam, n)
    else:
        raise InputError("give map files or --n")

    if paths:
        reports = _run_streams(lambda i: verify_map(jobs[i][1], jobs[i][2], jobs[i][0], seed,
                                                    lambda_star=jobs[i][3], sources=sources, pairs=pairs),
                               len(jobs), threads)
    else:
        def one(i: int) -> VerifyReport:
            rng = stream_rng(seed, i)
            res = sample_closure(n - 2, fam, rng)
            return verify_map(res.map, fam, f"sample {i}", int(rng.integers(MASK64, dtype=np.uint64)),
                              lambda_star=res.lambda_star, tree=res.tree, sources=sources, pairs=pairs)

        reports = _run_streams(one, samples, threads)
    for r in reports:
        failed = [k for k, v in r.checks.items() if not v]
        click.echo(f"{r.name}: {'PASS' if r.ok else 'FAIL ' + ','.join(failed)}", err=out is None)
    if out is not None:
        _emit(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", out)
    sys.exit(EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL)


@main.command()
@click.option("--kind", type=click.Choice(["twopoint", "profile", "crossks", "cs"]), default="twopoint",
              show_default=True)
@family_opt
@click.option("--n", "ns", type=int, multiple=True, required=True, help="Map vertex count; repeat for a list.")
@click.option("--samples", type=click.IntRange(1), default=100, show_default=True)
@seed_opt
@threads_opt
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@format_opt
def stats(kind, family, ns, samples, seed, threads, out, fmt):
    """Monte-Carlo statistics: two-point distances, label-error profiles,
    tri/quad KS comparison, CS-family diagnostics."""
    from . import snake

    fam = MapFamily.parse(family)
    for n in ns:
        _check_n(MapFamily.QUADRANGULATION if kind == "crossks" else fam, n)
    if kind == "twopoint":
        parts = [snake.two_point_statistics(fam, n, samples, seed, threads) for n in ns]
        if fmt == "csv":
            text = "".join(p.to_csv(header=(i == 0)) for i, p in enumerate(parts))
        else:
            text = json.dumps([{"family": p.family.value, "n": p.n, "seed": p.seed,
                                "values": p.values.tolist()} for p in parts]) + "\n"
    elif kind == "profile":
        rows = []
        for k, n in enumerate(ns):
            base = int(stream_rng(seed, k).integers(2**63))
            profs = _run_streams(lambda i, n=n, base=base: label_distance_profile(
                sample_closure(n - 2, fam, stream_rng(base, i))), samples, threads)
            rows.extend(p.csv_row(seed, fam.value) | {"sample_idx": i} for i, p in enumerate(profs))
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
            summary = {n: float(np.median([r["max_err_scaled"] for r in rows if r["n"] == n])) for n in ns}
            text = buf.getvalue()
            click.echo("median max_err_scaled: " + ", ".join(f"n={n}: {v:.4f}" for n, v in summary.items()),
                       err=True)
        else:
            text = json.dumps(rows) + "\n"
    elif kind == "crossks":
        res = []
        for n in ns:
            ks, _, _ = snake.cross_family_ks(n, samples, seed, threads)
            res.append({"n": n, "samples": samples, "ks": ks.statistic, "pvalue": ks.pvalue})
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=["n", "samples", "ks", "pvalue"], lineterminator="\n")
            w.writeheader()
            w.writerows(res)
            text = buf.getvalue()
        else:
            text = json.dumps(res) + "\n"
    else:
        rep = snake.cs_family_report(fam, ns, samples, seed, threads)
        text = rep.to_json() + "\n"
    _emit(text, out)


@main.command("enumerate")
@family_opt
@click.option("--n", "n", type=click.IntRange(1), required=True, help="Number of inner tree vertices.")
@format_opt
def enumerate_cmd(family, n, fmt):
    """Exhaustive counts: blossoming trees, balanced trees, distinct closures."""
    fam = MapFamily.parse(family)
    if n < fam.min_inner:
        raise InputError(f"--n must be at least {fam.min_inner} for {fam.value}, got {n}")
    try:
        trees = enumerate_trees(n, fam)
    except GuardError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_GUARD)
    balanced = [T for T in trees if is_balanced(T)]
    keys = {close(T).map.canonical_key() for T in balanced}
    inner_corners = 2 * (n - 1) + fam.k * n
    row = {
        "family": fam.value,
        "n": n,
        "trees": len(trees),
        "balanced": len(balanced),
        "closures": len(keys),
        "corner_factor": inner_corners / 2,
        "counting_identity": 2 * len(trees) == inner_corners * len(balanced),
        "identity_2n_minus_1": len(trees) == (2 * n - 1) * len(balanced),
        "injective": len(keys) == len(balanced),
    }
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow(row)
        click.echo(buf.getvalue(), nl=False)
    else:
        click.echo(canonical_json(row))
    sys.exit(EXIT_OK if row["counting_identity"] and row["injective"] else EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    main()
