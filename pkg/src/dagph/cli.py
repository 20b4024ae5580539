"""Command-line interface: ``dagph rank|subgraph|subsample|compare``.

Exit codes: 0 success, 2 input error (unreadable or invalid input, bad
flags), 3 semantic error (e.g. a disconnected subgraph selector). Output
files are written only after every result has been computed, each through a
temporary file and an atomic rename.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .dagmodel import (DisconnectedSelector, FiltrationError, ParseError, SubgraphSelector,
                       parse, validate)
from .linalg import parse_field
from .pipelines import (PointCloud, RadiusSchedule, compare_shapes, rips_filtrations,
                        subsample_pipeline)
from .ssss import all_pairs_rank, lattice_rank_invariants
from .subgraph import local_persistence_rank, oracle_rank, persistence_rank

FORMATS = """\
input formats:
  filtration JSON  {"simplices": [[0], [1], [0, 1]],
                    "vertices": [{"id": "A", "members": [0, 1]}, ...],
                    "edges": [["A", "B"], ...]}
                   simplices are sorted vertex lists, closed under faces and
                   listed faces first; members index into simplices.
  point CSV        one point per row, decimal coordinates; an optional
                   header row and '#' comment rows are ignored.

output formats:
  ranks.csv        source,target,k,rank   (subsample: window start/end level)
  diagram*.csv     birth,death,multiplicity   (death may be 'inf')
  *.json           run metadata: field, k, schedule, flags, results

exit codes: 0 ok, 2 input error, 3 semantic error (disconnected selector).
"""


class InputError(Exception):
    pass


def _write_outputs(out_dir: str, files: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, os.path.join(out_dir, name)))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_filtration(path: str):
    text = _read(path)
    try:
        dag = parse(text)
        validate(dag)
    except (ParseError, FiltrationError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return dag


def _load_points(path: str) -> PointCloud:
    try:
        return PointCloud.from_csv(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _schedule(spec: str) -> RadiusSchedule:
    try:
        return RadiusSchedule.parse(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_rank(args) -> int:
    dag = _load_filtration(args.input)
    table = lattice_rank_invariants(dag, args.k, args.field_obj) if args.lattice \
        else all_pairs_rank(dag, args.k, args.field_obj)
    text = table.to_csv()
    if args.out:
        _write_outputs(args.out, {"ranks.csv": text})
    else:
        sys.stdout.write(text)
    return 0


def cmd_subgraph(args) -> int:
    dag = _load_filtration(args.input)
    ids = [s.strip() for s in args.subgraph.split(",") if s.strip()] if args.subgraph \
        else list(dag.vertices)
    try:
        sel = SubgraphSelector.induced(dag, ids)
    except DisconnectedSelector:
        raise
    except FiltrationError as exc:
        raise InputError(str(exc)) from None
    if args.engine == "oracle":
        rank = oracle_rank(dag, sel, args.k, args.field_obj)
    elif args.engine == "local":
        rank = local_persistence_rank(dag, sel, args.k, args.field_obj)[0]
    else:
        rank = persistence_rank(dag, sel, args.k, args.field_obj).rank
    result = {"field": args.field_obj.name, "k": args.k, "selector": ids,
              "engine": args.engine, "rank": rank}
    if args.out:
        _write_outputs(args.out, {"subgraph.json": _json(result)})
    print(rank)
    return 0


def cmd_subsample(args) -> int:
    base = _load_points(args.input)
    sched = _schedule(args.radii)
    n_sub = args.n_sub if args.n_sub is not None else len(base) // 2
    try:
        res = subsample_pipeline(base, sched, n_sub, args.seed, args.k, args.field_obj, args.max_dim)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    files = {
        "ranks.csv": res.rank_table().to_csv(),
        "diagram.csv": res.diagram.to_csv(),
        "diagram_radius.csv": res.radius_diagram.to_csv(),
        "metadata.json": _json(res.metadata),
    }
    if args.out:
        _write_outputs(args.out, files)
    sys.stdout.write(files["diagram_radius.csv"])
    return 0


def cmd_compare(args) -> int:
    x = _load_points(args.input)
    y = _load_points(args.other)
    if x.points and y.points and x.dim != y.dim:
        raise InputError("point clouds have different dimensions")
    sched = _schedule(args.radii)
    xf, yf = rips_filtrations(x, y, sched, args.max_dim)
    res = compare_shapes(xf, yf, args.k, args.field_obj)
    meta = {"field": args.field_obj.name, "k": args.k, "max_dim": args.max_dim,
            "schedule": [str(r) for r in sched.radii], "flags": list(res.diagram_g.flags),
            "bottleneck_x": res.bottleneck_x, "bottleneck_y": res.bottleneck_y,
            "diagram_units": "index"}
    files = {
        "diagram_x.csv": res.diagram_x.to_csv(),
        "diagram_y.csv": res.diagram_y.to_csv(),
        "diagram_g.csv": res.diagram_g.to_csv(),
        "result.json": _json(meta),
    }
    if args.out:
        _write_outputs(args.out, files)
    print(f"bottleneck(X,G)={res.bottleneck_x} bottleneck(Y,G)={res.bottleneck_y}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dagph", description="Persistent homology of DAG filtrations.",
                                epilog=FORMATS, formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="fp:46337", help="coefficients: q or fp:<prime>")
    common.add_argument("--k", type=int, default=1, help="homology degree")
    common.add_argument("--out", help="output directory")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rank", parents=[common], help="rank invariants of all source/target pairs",
                       epilog=FORMATS, formatter_class=argparse.RawDescriptionHelpFormatter)
    r.add_argument("input", help="filtration JSON")
    r.add_argument("--lattice", action="store_true", help="treat vertices as a grid (ids carry coordinates)")
    r.set_defaults(func=cmd_rank)

    s = sub.add_parser("subgraph", parents=[common], help="persistence rank of a subgraph",
                       epilog=FORMATS, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("input", help="filtration JSON")
    s.add_argument("--subgraph", help="comma-separated vertex ids (default: whole graph)")
    s.add_argument("--engine", choices=["exact", "local", "oracle"], default="exact")
    s.set_defaults(func=cmd_subgraph)

    for name, fn, helptext in (("subsample", cmd_subsample, "parallel-subsample persistence"),
                               ("compare", cmd_compare, "intersection/union shape comparison")):
        a = sub.add_parser(name, parents=[common], help=helptext, epilog=FORMATS,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        a.add_argument("input", help="point CSV")
        if name == "compare":
            a.add_argument("other", help="second point CSV")
        a.add_argument("--radii", required=True, help="comma-separated increasing radii")
        a.add_argument("--max-dim", type=int, default=2, help="largest simplex dimension")
        if name == "subsample":
            a.add_argument("--n-sub", type=int, help="subsample size (default: half the points)")
            a.add_argument("--seed", type=int, default=0, help="seed for the random split")
        a.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.k < 0:
            raise InputError("--k must be non-negative")
        try:
            args.field_obj = parse_field(args.field)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        return args.func(args)
    except InputError as exc:
        print(f"dagph: error: {exc}", file=sys.stderr)
        return 2
    except DisconnectedSelector as exc:
        print(f"dagph: error: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
