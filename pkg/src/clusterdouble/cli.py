"""Command-line interface.

Documents (seeds, maps, triangulations, configurations) are read from JSON
files and written to stdout as JSON.  Verification commands print one JSON
verdict line per property followed by a plain-text summary; timings go to
stderr so that stdout is byte-identical across runs with the same seed.

Exit codes: 0 success, 1 a property failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from .cluster_maps import ClusterMap, a_mutation, compose_all, d_mutation, x_mutation
from .flagconfig import (
    DecoratedPolygonConfig,
    DoubleConfig,
    DoubleCoordinates,
    a_coords,
    config_from_json,
    config_to_json,
    double_coords,
    reconstruct_decorated,
    reconstruct_double,
    reconstruct_framed,
    x_coords,
)
from .ratfunc import format_rational, parse_rational
from .seed import Seed, a_n_seed, apply_mutation_sequence, enumerate_mutation_class
from .surface import IdealTriangulation, all_polygon_triangulations, flip, m_triangulation_seed, polygon_triangulation
from .verify import (
    COORD_PROPERTIES,
    SEED_PROPERTIES,
    VerificationReport,
    check_flips,
    check_laurent,
    run_coords_property,
    run_pentagon,
    run_seed_property,
)

__all__ = ["main", "build_parser"]

MAP_PROPERTIES = sorted(list(SEED_PROPERTIES) + ["pentagon", "laurent"])


class InputError(Exception):
    """Malformed or out-of-domain input; exit status 2."""


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _emit(doc) -> None:
    print(json.dumps(doc))


def _load_triangulation(path: str) -> IdealTriangulation:
    data = _load(path)
    if isinstance(data, dict) and "triangulation" in data:
        data = data["triangulation"]
    return IdealTriangulation.from_json(data)


def _report(reports: Sequence[VerificationReport]) -> int:
    for r in reports:
        print(r.verdict_line())
    for r in reports:
        print(r.summary())
        print(f"{r.property}: {r.duration:.3f}s", file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


# -- seed ------------------------------------------------------------------------


def _cmd_seed_mutate(args) -> int:
    s = Seed.from_json(_load(args.file))
    ks = list(args.k or [])
    if args.sequence:
        ks += [k for k in args.sequence.split(",") if k]
    _emit(apply_mutation_sequence(s, ks).to_json())
    return 0


def _cmd_seed_class(args) -> int:
    s = Seed.from_json(_load(args.file))
    mc = enumerate_mutation_class(s, args.max_nodes)
    _emit({"size": len(mc), "truncated": mc.truncated, "representatives": [r.to_json() for r in mc.representatives]})
    return 0


# -- map -------------------------------------------------------------------------

_MUTATIONS = {"mutate-a": a_mutation, "mutate-x": x_mutation, "mutate-d": d_mutation}


def _cmd_map_mutate(args) -> int:
    s = Seed.from_json(_load(args.file))
    _emit(_MUTATIONS[args.map_command](s, args.k).to_json())
    return 0


def _cmd_map_compose(args) -> int:
    maps = [ClusterMap.from_json(_load(p)) for p in args.file]
    _emit(compose_all(*maps).to_json())
    return 0


def _laurent_report(rank: int, length: int) -> VerificationReport:
    start = time.perf_counter()
    n = max(rank, 1)
    checked, problems = check_laurent(a_n_seed(n), length)
    rep = VerificationReport("laurent", f"A{n} seed, sequences of length<={length}", trials=checked)
    rep.failures = [{"problem": p} for p in problems]
    rep.duration = time.perf_counter() - start
    return rep


def _cmd_map_verify(args) -> int:
    reports = []
    for prop in args.property or ["involutivity"]:
        if prop == "pentagon":
            reports.append(run_pentagon(args.trials, args.seed))
        elif prop == "laurent":
            reports.append(_laurent_report(args.rank, args.length))
        else:
            reports.append(run_seed_property(prop, args.rank, args.trials, args.seed))
    return _report(reports)


# -- surface ---------------------------------------------------------------------


def _cmd_surface_seed(args) -> int:
    t = _load_triangulation(args.file)
    _emit(m_triangulation_seed(t, args.m).to_json())
    return 0


def _cmd_surface_flip(args) -> int:
    t = _load_triangulation(args.file)
    t2, corr = flip(t, args.edge)
    doc = t2.to_json()
    doc["correspondence"] = corr
    _emit(doc)
    return 0


def _cmd_surface_check_flip(args) -> int:
    if args.m != 2:
        raise InputError("flip/mutation agreement is only checked for m = 2")
    t = _load_triangulation(args.file)
    start = time.perf_counter()
    rep = VerificationReport("flip-mutation", t.fingerprint(), trials=len(t.internal_edges))
    rep.failures = [{"problem": p} for p in check_flips(t, args.m)]
    rep.duration = time.perf_counter() - start
    return _report([rep])


def _cmd_surface_polygon(args) -> int:
    if args.index is None:
        t = polygon_triangulation(args.n)
    else:
        ts = all_polygon_triangulations(args.n)
        if not 0 <= args.index < len(ts):
            raise InputError(f"index must be in 0..{len(ts) - 1}")
        t = ts[args.index]
    _emit(t.to_json())
    return 0


# -- coords ----------------------------------------------------------------------


def _fmt(d) -> dict:
    return {k: format_rational(v) for k, v in d.items()}


def _cmd_coords_compute(args) -> int:
    c = config_from_json(_load(args.file))
    t = _load_triangulation(args.triangulation) if args.triangulation else None
    if isinstance(c, DoubleConfig):
        _emit(double_coords(c, t).to_json())
        return 0
    if t is not None:
        c = c.with_triangulation(t)
    doc = {"X": _fmt(x_coords(c))}
    if isinstance(c, DecoratedPolygonConfig):
        doc["A"] = _fmt(a_coords(c))
    _emit(doc)
    return 0


def _cmd_coords_reconstruct(args) -> int:
    t = _load_triangulation(args.file)
    data = _load(args.coords)
    if not isinstance(data, dict):
        raise InputError("coordinate file must be a JSON object")
    parsed = {key: {e: parse_rational(v) for e, v in data[key].items()} for key in ("A", "B", "X") if key in data}
    if "A" in parsed:
        out = reconstruct_decorated(t, parsed["A"])
    elif "B" in parsed:
        cs = DoubleCoordinates(parsed["B"], parsed["X"])
        out = reconstruct_double(t, cs.B, cs.X)
    elif "X" in parsed:
        out = reconstruct_framed(t, parsed["X"])
    else:
        raise InputError("coordinate file needs an A, B or X block")
    _emit(config_to_json(out))
    return 0


def _cmd_coords_roundtrip(args) -> int:
    ts = all_polygon_triangulations(args.n) if args.n else [_load_triangulation(args.file)]
    reports = []
    for prop in args.property or ["roundtrip"]:
        for t in ts:
            reports.append(run_coords_property(prop, t, args.trials, args.seed))
    return _report(reports)


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clusterdouble", description="Cluster symplectic double toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    seed = sub.add_parser("seed", help="seed mutation and mutation classes").add_subparsers(dest="seed_command", required=True)
    q = seed.add_parser("mutate", help="mutate a seed file")
    q.add_argument("--file", required=True)
    q.add_argument("--k", action="append", help="index to mutate at (repeatable)")
    q.add_argument("--sequence", help="comma-separated indices")
    q.set_defaults(func=_cmd_seed_mutate)
    q = seed.add_parser("class", help="enumerate the mutation class up to relabelling")
    q.add_argument("--file", required=True)
    q.add_argument("--max-nodes", type=int, default=1000)
    q.set_defaults(func=_cmd_seed_class)

    mp = sub.add_parser("map", help="cluster transformations").add_subparsers(dest="map_command", required=True)
    for name in _MUTATIONS:
        q = mp.add_parser(name, help=f"{name[-1].upper()}-mutation map of a seed")
        q.add_argument("--file", required=True)
        q.add_argument("--k", required=True)
        q.set_defaults(func=_cmd_map_mutate)
    q = mp.add_parser("compose", help="compose maps in the order given (first file first)")
    q.add_argument("--file", action="append", required=True)
    q.set_defaults(func=_cmd_map_compose)
    q = mp.add_parser("verify", help="randomized property checks")
    q.add_argument("--property", action="append", choices=MAP_PROPERTIES)
    q.add_argument("--rank", type=int, default=4)
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--length", type=int, default=8, help="sequence length for the laurent property")
    q.set_defaults(func=_cmd_map_verify)

    sf = sub.add_parser("surface", help="triangulations and their seeds").add_subparsers(dest="surface_command", required=True)
    q = sf.add_parser("seed", help="seed of the m-triangulation")
    q.add_argument("--file", required=True)
    q.add_argument("--m", type=int, default=2)
    q.set_defaults(func=_cmd_surface_seed)
    q = sf.add_parser("flip", help="flip an internal edge")
    q.add_argument("--file", required=True)
    q.add_argument("--edge", required=True)
    q.set_defaults(func=_cmd_surface_flip)
    q = sf.add_parser("check-flip", help="flip/mutation agreement at every internal edge")
    q.add_argument("--file", required=True)
    q.add_argument("--m", type=int, default=2)
    q.set_defaults(func=_cmd_surface_check_flip)
    q = sf.add_parser("polygon", help="a triangulated n-gon")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--index", type=int, help="pick one of all triangulations instead of the fan")
    q.set_defaults(func=_cmd_surface_polygon)

    co = sub.add_parser("coords", help="flag configurations and their coordinates").add_subparsers(dest="coords_command", required=True)
    q = co.add_parser("compute", help="coordinates of a configuration file")
    q.add_argument("--file", required=True)
    q.add_argument("--triangulation", help="compute in this triangulation instead")
    q.set_defaults(func=_cmd_coords_compute)
    q = co.add_parser("reconstruct", help="configuration from coordinates")
    q.add_argument("--file", required=True, help="triangulation")
    q.add_argument("--coords", required=True)
    q.set_defaults(func=_cmd_coords_reconstruct)
    q = co.add_parser("roundtrip", help="randomized coordinate checks")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", help="triangulation or configuration")
    src.add_argument("--n", type=int, help="every triangulation of the n-gon")
    q.add_argument("--property", action="append", choices=sorted(COORD_PROPERTIES))
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=_cmd_coords_roundtrip)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "rank", 1) < 1 or getattr(args, "trials", 1) < 0:
        print("error: --rank must be positive and --trials non-negative", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (ValueError, KeyError, TypeError, ArithmeticError) as exc:
        kind = "outside the domain" if isinstance(exc, ArithmeticError) else "malformed input"
        print(f"error ({kind}): {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
