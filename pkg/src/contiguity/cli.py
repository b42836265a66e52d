"""Command-line entry point: ``contiguity {complex,count,table1,persist}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .complex import SimplicialComplex, circle, standard_complex
from .errors import CapExceededError, ContiguityError
from .homology import betti_numbers, persistent_homology
from .maps import DEFAULT_MAP_CAP, exact_class_count
from .montecarlo import (DEFAULT_SCHEDULE, WalkConfig, estimate_class_count,
                         exact_circle_class_count)
from .persistence import (circle_sequence, persistent_contiguity_h0, persistent_subdivision_h0,
                          rips_h0, subdivision_sequence)
from .rips import read_space_csv
from .validation import check_prime

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
TABLE1_KS = (9, 12, 15, 18, 21)


@dataclass(frozen=True)
class RunConfig:
    """Every flag of one invocation, serialised into its report."""

    command: str
    params: dict

    def to_dict(self) -> dict:
        return {"command": self.command, **self.params}


class UsageError(ContiguityError):
    pass


# argument parsing -------------------------------------------------------------

def parse_complex_spec(text: str) -> SimplicialComplex:
    """``torus_T``, ``boundary2``, ``circle:12``, ``simplex:3``, or a JSON file path."""
    text = text.strip()
    if text.endswith(".json") or os.sep in text:
        return SimplicialComplex.from_json(Path(text).read_text())
    if ":" in text:
        kind, _, n = text.partition(":")
        return standard_complex(kind, int(n))
    return standard_complex(text)


def _number_list(text: str, kind=int) -> list:
    try:
        return [kind(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock times (reports stop being byte-reproducible)")


def _walk_flags(p: argparse.ArgumentParser):
    p.add_argument("--kappa", type=float, default=0.1)
    p.add_argument("--max-iters", type=int, default=500_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--step-soundness", choices=("contiguous", "literal"), default="contiguous")
    p.add_argument("--schedule", default=",".join(str(b) for b in DEFAULT_SCHEDULE),
                   help="comma-separated cumulative trial budgets")
    p.add_argument("--no-collapse", action="store_true",
                   help="sample walks that never stay put (sensitivity runs)")
    p.add_argument("--time-limit", type=float, default=None)


def _based_flags(p: argparse.ArgumentParser, default: bool):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--based", dest="based", action="store_true")
    g.add_argument("--unbased", dest="based", action="store_false")
    p.set_defaults(based=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contiguity",
                                     description="Contiguity classes of simplicial maps.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complex", help="build a complex and report its simplex counts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--standard", help="simplex, boundary, circle, torus_T, pinched_P, point")
    src.add_argument("--facets", help="complex JSON file")
    p.add_argument("--n", type=int, help="size for simplex/boundary")
    p.add_argument("--k", type=int, help="size for circle")
    p.add_argument("--cap", type=int, default=2_000_000)
    _common(p)

    p = sub.add_parser("count", help="count contiguity classes of maps S^1_k -> target")
    p.add_argument("--target", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "estimate"), default="estimate")
    p.add_argument("--engine", choices=("generic", "compiled"), default="generic",
                   help="exact mode: enumerate with Python sets or the compiled walk counter")
    p.add_argument("--cap", type=int, default=DEFAULT_MAP_CAP)
    _based_flags(p, True)
    _walk_flags(p)
    _common(p)

    p = sub.add_parser("table1", help="estimate class counts for T and P over k and seeds")
    p.add_argument("--k-list", default=",".join(str(k) for k in TABLE1_KS))
    p.add_argument("--seeds", default="1")
    _walk_flags(p)
    _common(p)

    p = sub.add_parser("persist", help="barcodes and persistence pipelines")
    p.add_argument("--pipeline", required=True,
                   choices=("homology", "rips-h0", "contiguity-h0", "subdivision-h0"))
    p.add_argument("--standard", help="complex for the homology pipeline")
    p.add_argument("--facets", help="complex JSON for the homology pipeline")
    p.add_argument("--points", help="point-cloud CSV (or distance matrix with --distance-matrix)")
    p.add_argument("--distance-matrix", action="store_true")
    p.add_argument("--z", default="point", help="domain of the contiguity-h0 pipeline")
    p.add_argument("--x", help="circle:3,6,... or sd:<complex>:<steps>")
    p.add_argument("--y", help="target of the subdivision-h0 pipeline")
    p.add_argument("--tiebreak", choices=("lowest", "max_weight"), default="lowest")
    p.add_argument("--base-point", type=int, default=0)
    p.add_argument("--field", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=None, help="largest scale to include")
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--cap", type=int, default=DEFAULT_MAP_CAP)
    p.add_argument("--engine", choices=("generic", "compiled"), default="generic",
                   help="compiled: closed-walk enumeration for based circle domains")
    p.add_argument("--scales", help="comma-separated increasing scales instead of the "
                                    "critical values")
    _based_flags(p, False)
    _common(p)
    return parser


# rendering -------------------------------------------------------------------------

def _csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(report: dict, fmt: str, out: str | None, table=None):
    """Serialise ``report``; ``table`` is ``(header, rows)`` for csv/text output."""
    if fmt == "json" or table is None:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = _csv_text(*table)
    else:
        header, rows = table
        widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
        lines = ["  ".join(str(c).rjust(w) for c, w in zip(r, widths)) for r in [header, *rows]]
        text = "\n".join(lines) + "\n"
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt_grade(g):
    return repr(float(g)) if isinstance(g, float) else g


def _barcode_dict(bc) -> dict:
    d = bc.to_dict()
    d["bars"] = [[_fmt_grade(b), None if e is None else _fmt_grade(e)] for b, e in d["bars"]]
    d["grades"] = [_fmt_grade(g) for g in d["grades"]]
    return d


def _bar_rows(barcodes: list) -> list:
    return [[bc.degree, _fmt_grade(b), "inf" if d is None else _fmt_grade(d)]
            for bc in barcodes for b, d in bc.bars]


# commands ---------------------------------------------------------------------------

def cmd_complex(args, cfg: RunConfig) -> dict:
    if args.facets:
        cx = SimplicialComplex.from_json(Path(args.facets).read_text(), cap=args.cap)
    else:
        size = args.k if args.standard == "circle" else args.n
        cx = standard_complex(args.standard, size)
    f = list(cx.f_vector)
    report = {"config": cfg.to_dict(), "version": __version__, "f_vector": f,
              "complex": cx.to_dict()}
    table = (["dimension", "count"], [[d, c] for d, c in enumerate(f)])
    return report, table


def _schedule(text: str) -> tuple:
    return tuple(_number_list(text))


def _walk_config(args) -> WalkConfig:
    return WalkConfig(kappa=args.kappa, max_iters=args.max_iters, seed=args.seed,
                      step_soundness=args.step_soundness)


def _estimate(target: SimplicialComplex, k: int, args) -> dict:
    cfg = _walk_config(args)
    state = estimate_class_count(target, k, cfg, _schedule(args.schedule),
                                 collapse=not args.no_collapse, time_limit=args.time_limit,
                                 workers=args.workers)
    out = {"class_count": state.class_count, "class_count_over_k2": state.class_count / k ** 2,
           "class_representatives": [list(c) for c in state.catalog], "trials": state.trials,
           "stabilized": state.stabilized, "history": [list(h) for h in state.history],
           "walks": state.walks, "failed_walks": state.failed_walks,
           "pruned_comparisons": state.pruned}
    if args.timing:
        out["wall_time"] = state.wall_time
    return out


def cmd_count(args, cfg: RunConfig) -> dict:
    target = parse_complex_spec(args.target)
    k = args.k
    report = {"config": cfg.to_dict(), "version": __version__, "target": args.target, "k": k,
              "based": args.based, "mode": args.mode}
    start = time.perf_counter()
    if args.mode == "exact":
        if args.engine == "compiled":
            if not args.based:
                raise UsageError("the compiled engine counts based maps only")
            walks, classes = exact_circle_class_count(target, k, limit=args.cap)
            report.update(class_count=classes, map_count=walks)
        else:
            part = exact_class_count(circle(k), target, based=(0, 0) if args.based else None,
                                     cap=args.cap)
            report.update(part.to_dict())
        report["class_count_over_k2"] = report["class_count"] / k ** 2
    else:
        if not args.based:
            raise UsageError("estimate mode samples based closed walks; drop --unbased")
        report.update(kappa=args.kappa, M=args.max_iters, seed=args.seed,
                      schedule=list(_schedule(args.schedule)))
        report.update(_estimate(target, k, args))
    if args.timing:
        report["wall_time"] = time.perf_counter() - start
    header = ["target", "k", "class_count", "class_count_over_k2"]
    row = [args.target, k, report["class_count"], f"{report['class_count_over_k2']:.3f}"]
    return report, (header, [row])


def cmd_table1(args, cfg: RunConfig) -> dict:
    ks = _number_list(args.k_list)
    seeds = _number_list(args.seeds) or [args.seed]
    targets = (("T", standard_complex("torus_T")), ("P", standard_complex("pinched_P")))
    runs = []
    rows = []
    for k in ks:
        per = {}
        for name, y in targets:
            counts = []
            for seed in seeds:
                sub = argparse.Namespace(**{**vars(args), "seed": seed})
                res = _estimate(y, k, sub)
                runs.append({"target": name, "k": k, "seed": seed, **res})
                counts.append(res["class_count"])
            per[name] = counts
        t, p = statistics.mean(per["T"]), statistics.mean(per["P"])
        rows.append([k, f"{t:g}", f"{p:g}", f"{t / k ** 2:.3f}", f"{p / k ** 2:.3f}",
                     min(per["T"]), max(per["T"]), min(per["P"]), max(per["P"])])
    header = ["k", "T", "P", "T_over_k2", "P_over_k2", "T_min", "T_max", "P_min", "P_max"]
    report = {"config": cfg.to_dict(), "version": __version__, "seeds": seeds,
              "table": [dict(zip(header, r)) for r in rows], "runs": runs}
    return report, (header, rows)


def _persist_complex(args) -> SimplicialComplex:
    if args.facets:
        return SimplicialComplex.from_json(Path(args.facets).read_text())
    if args.standard:
        return parse_complex_spec(args.standard)
    raise UsageError("the homology pipeline needs --standard or --facets")


def _x_sequence(text: str, tiebreak: str):
    kind, _, rest = text.partition(":")
    if kind == "circle":
        return circle_sequence(_number_list(rest))
    if kind == "sd":
        name, _, steps = rest.rpartition(":")
        return subdivision_sequence(parse_complex_spec(name), int(steps), tiebreak)
    raise UsageError(f"cannot parse --x {text!r}; use circle:3,6 or sd:boundary2:2")


def cmd_persist(args, cfg: RunConfig) -> dict:
    p = check_prime(args.field)
    report = {"config": cfg.to_dict(), "version": __version__, "pipeline": args.pipeline}
    if args.pipeline == "homology":
        cx = _persist_complex(args)
        barcodes = [persistent_homology([cx], d, [0], p) for d in range(cx.dimension + 1)]
        report["betti"] = list(betti_numbers(cx, p))
    elif args.pipeline in ("rips-h0", "contiguity-h0"):
        if not args.points:
            raise UsageError(f"the {args.pipeline} pipeline needs --points")
        space = read_space_csv(args.points, args.distance_matrix)
        if args.pipeline == "rips-h0":
            barcodes = [rips_h0(space)]
        else:
            scales = _number_list(args.scales, float) if args.scales else None
            bc, counts = persistent_contiguity_h0(parse_complex_spec(args.z), space, args.based,
                                                  args.base_point, max_epsilon=args.epsilon,
                                                  cap=args.cap, engine=args.engine,
                                                  scales=scales)
            barcodes = [bc]
            report["class_counts"] = counts
    else:
        if not args.x or not args.y:
            raise UsageError("the subdivision-h0 pipeline needs --x and --y")
        xs, maps = _x_sequence(args.x, args.tiebreak)
        bc, counts = persistent_subdivision_h0(xs, maps, parse_complex_spec(args.y), args.based,
                                               args.base_point, cap=args.cap)
        barcodes = [bc]
        report["class_counts"] = counts
        report["vertex_counts"] = [x.vertex_count for x in xs]
    report["barcodes"] = [_barcode_dict(bc) for bc in barcodes]
    return report, (["degree", "birth", "death"], _bar_rows(barcodes))


COMMANDS = {"complex": cmd_complex, "count": cmd_count, "table1": cmd_table1,
            "persist": cmd_persist}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "verbose")}
    cfg = RunConfig(args.command, params)
    try:
        report, table = COMMANDS[args.command](args, cfg)
    except (ContiguityError, ValueError, OSError) as exc:
        code = EXIT_CAP if isinstance(exc, CapExceededError) else (
            EXIT_USAGE if isinstance(exc, UsageError) else EXIT_ERROR)
        err = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code},
               "config": cfg.to_dict(), "version": __version__}
        sys.stdout.write(json.dumps(err, indent=2, sort_keys=True) + "\n")
        print(f"contiguity: {exc}", file=sys.stderr)
        return code
    _emit(report, args.format, args.out, table)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
