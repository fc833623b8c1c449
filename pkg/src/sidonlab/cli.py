"""Command-line surface tying all modules into reproducible runs.

Exit codes are a stable contract: 0 success/affirmative, 1 negative
finding, 2 usage/parse errors, 3 budget or feasibility limits.

Every flag can also be set through an environment variable with the
SIDONLAB_ prefix (e.g. SIDONLAB_SEED=7).  Randomized subcommands either
take --seed or generate one and print it, so published numbers are
always reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from dataclasses import asdict
from pathlib import Path

from . import constructions, containers, enumeration, ioformats, randomlab
from .grid import GridParams, GridError, is_sidon, rank

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _env(name: str, default=None):
    return os.environ.get(f"SIDONLAB_{name.upper()}", default)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _resolved_config(args: argparse.Namespace, command: str) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["command"] = command
    return cfg


def _log_config(args: argparse.Namespace, command: str) -> None:
    print(f"config: {json.dumps(_resolved_config(args, command), default=str)}", file=sys.stderr)
    if getattr(args, "out", None):
        Path(str(args.out) + ".config.json").write_text(
            json.dumps(_resolved_config(args, command), default=str) + "\n", encoding="utf-8"
        )


def _ensure_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed} (generated; pass --seed to reproduce)", file=sys.stderr)
    return args.seed


def _load_point_file(path: str):
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return ioformats.parse_rank_json(text)
    return ioformats.parse_point_file(text)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_verify(args) -> int:
    try:
        g, points = _load_point_file(args.file)
    except (ioformats.ParseError, GridError, json.JSONDecodeError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    w = is_sidon(points, g)
    payload = {
        "verdict": w.verdict,
        "violation": [list(p) for p in w.violation] if w.violation else None,
    }
    _emit(json.dumps(payload), args.out)
    return EXIT_OK if w.verdict else EXIT_NEGATIVE


def cmd_search_max(args) -> int:
    g = GridParams(args.n, args.d)
    _log_config(args, "search-max")
    res = enumeration.max_sidon_exact(g, budget=args.budget)
    _emit(res.to_json(g), args.out)
    return EXIT_OK if res.optimal else EXIT_BUDGET


def cmd_count(args) -> int:
    g = GridParams(args.n, args.d)
    _log_config(args, "count")
    try:
        if args.t is not None:
            value = enumeration.count_of_size(g, args.t, max_nodes=args.max_nodes)
            if args.format == "json":
                _emit(json.dumps({"n": g.n, "d": g.d, "t": args.t, "count": value}), args.out)
            else:
                _emit(f"{args.t},{value}", args.out)
            return EXIT_OK
        profile = enumeration.count_profile(g, max_nodes=args.max_nodes)
    except enumeration.CountTooLargeError as exc:
        print(f"feasibility: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _emit(profile.to_json() if args.format == "json" else profile.to_csv(), args.out)
    if args.plot:
        from . import plots

        fig_path = (Path(args.out).with_suffix(".png") if args.out
                    else Path(f"count_n{g.n}_d{g.d}.png"))
        plots.plot_count_profile(profile, str(fig_path))
        print(f"figure: {fig_path}", file=sys.stderr)
    return EXIT_OK


def cmd_construct(args) -> int:
    _log_config(args, "construct")
    if args.kind == "singer":
        cert = constructions.singer_sidon(args.q)
        _emit(cert.to_json(), args.out)
        return EXIT_OK
    if args.kind == "interval":
        g = GridParams(args.n, 1)
        pts = [(x,) for x in constructions.dense_sidon_in_interval(args.n)]
    else:
        g = GridParams(args.n, args.d)
        pts = sorted(constructions.dense_sidon_in_grid(g), key=lambda p: rank(p, g))
    if args.format == "json":
        _emit(ioformats.write_rank_json(pts, g), args.out)
    else:
        _emit(ioformats.write_point_file(pts, g), args.out)
    return EXIT_OK


def cmd_graph(args) -> int:
    try:
        g, points = _load_point_file(args.file)
    except (ioformats.ParseError, GridError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        graph = containers.build_collision_graph(points, g)
    except containers.HypothesisError as exc:
        print(f"not a Sidon seed: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    _emit(graph.to_dimacs() if args.graph_format == "dimacs" else graph.to_edge_list(), args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    _log_config(args, f"bound {args.which}")
    try:
        if args.which == "large":
            report = containers.bound_large(args.n, args.d, args.t)
            _emit(report.to_json(), args.out)
        elif args.which == "small":
            report = containers.bound_small(args.n, args.d, args.gamma, args.omega)
            _emit(report.to_json(), args.out)
        elif args.which == "smallt":
            val = containers.bound_small_t_regime(args.n, args.d)
            _emit(json.dumps({"n": args.n, "d": args.d, "log2_bound": val}), args.out)
        else:  # schedule
            s0 = args.s0 if args.s0 is not None else containers.s0_large(args.n, args.d)
            sched = containers.schedule(args.t, s0)
            _emit(json.dumps(asdict(sched)), args.out)
    except containers.HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_random_run(args) -> int:
    _ensure_seed(args)
    _log_config(args, "random-run")
    n_list = [int(x) for x in args.n_list.split(",")]
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    jsonl = open(str(args.out) + ".jsonl", "w", encoding="utf-8") if args.out else None
    try:
        sink.write(ioformats.RECORD_HEADER + "\n")
        sink.flush()

        def on_record(rec):
            sink.write(ioformats.record_to_csv_row(rec, timings=args.timings) + "\n")
            sink.flush()  # crash-safe incremental append
            if jsonl:
                jsonl.write(ioformats.record_to_json(rec, timings=args.timings) + "\n")
                jsonl.flush()

        randomlab.run_sweep(
            args.a,
            n_list,
            args.d,
            args.trials,
            mode=args.mode,
            seed=args.seed,
            budget=args.budget,
            threads=args.threads,
            on_record=on_record,
        )
    finally:
        if args.out:
            sink.close()
        if jsonl:
            jsonl.close()
    return EXIT_OK


def cmd_fit_exponent(args) -> int:
    _log_config(args, "fit-exponent")
    records = ioformats.read_records_csv(Path(args.records).read_text(encoding="utf-8"))
    by_a: dict[float, list] = {}
    for rec in records:
        if rec.a is None:
            continue
        by_a.setdefault(rec.a, []).append(rec)
    if not by_a:
        print("no records with an exponent a", file=sys.stderr)
        return EXIT_USAGE
    d = records[0].d
    fits = []
    try:
        for a in sorted(by_a):
            fits.append(randomlab.fit_exponent(by_a[a], d=d))
    except randomlab.InsufficientDataError as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    payload = [
        {
            "a": f.a,
            "b_hat": f.b_hat,
            "stderr": f.stderr,
            "b_predicted": f.b_predicted,
            "gap": f.gap,
            "n_values": f.n_values,
        }
        for f in fits
    ]
    _emit(json.dumps(payload, indent=2), args.out)
    base = Path(args.out) if args.out else Path("exponent_fit.json")
    csv_path = base.with_suffix(".curve.csv")
    csv_lines = ["a,b_hat,b_predicted"] + [f"{f.a!r},{f.b_hat!r},{f.b_predicted!r}" for f in fits]
    csv_path.write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    from . import plots

    fig_path = base.with_suffix(".b_curve.png")
    plots.plot_b_curve(fits, d, str(fig_path))
    print(f"curve csv: {csv_path}\nfigure: {fig_path}", file=sys.stderr)
    return EXIT_OK


def cmd_chernoff(args) -> int:
    _ensure_seed(args)
    _log_config(args, "chernoff")
    g = GridParams(args.n, args.d)
    report = randomlab.chernoff_check(g, args.p, args.lam, args.trials, args.seed)
    _emit(json.dumps(asdict(report)), args.out)
    if args.out:
        from . import plots

        fig_path = Path(args.out).with_suffix(".png")
        plots.plot_chernoff([report], str(fig_path))
        print(f"figure: {fig_path}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_transfer(args) -> int:
    _ensure_seed(args)
    _log_config(args, "transfer")
    report = randomlab.transfer_check(args.n, args.d, args.p, args.trials, args.seed)
    payload = asdict(report)
    payload["pairs"] = payload["pairs"][:20]  # keep output bounded
    _emit(json.dumps(payload), args.out)
    return EXIT_OK if report.failures == 0 else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# Parser


def _add_common(sp, *, seed=False, budget=False, threads=False):
    sp.add_argument("--out", default=_env("out"), help="output file (default stdout)")
    sp.add_argument("--format", choices=["csv", "json"], default=_env("format", "csv"))
    if seed:
        env_seed = _env("seed")
        sp.add_argument("--seed", type=int, default=int(env_seed) if env_seed else None)
    if budget:
        sp.add_argument("--budget", type=int, default=int(_env("budget", "0")),
                        help="node budget for exact search (0 = unlimited)")
    if threads:
        sp.add_argument("--threads", type=int, default=int(_env("threads", "1")))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sidonlab", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="check a point-set file for the Sidon property")
    sp.add_argument("file")
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search-max", help="maximum Sidon set in the full grid")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, default=1)
    _add_common(sp, budget=True)
    sp.set_defaults(func=cmd_search_max)

    sp = sub.add_parser("count", help="exact counts of Sidon subsets by size")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--t", type=int, default=None, help="count only this size")
    sp.add_argument("--max-nodes", type=int, default=enumeration.DEFAULT_COUNT_GUARD)
    sp.add_argument("--plot", action="store_true", help="also render a profile figure")
    _add_common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("construct", help="dense Sidon constructions")
    sp.add_argument("--kind", choices=["grid", "interval", "singer"], default="grid")
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--q", type=int, help="prime for the difference-set construction")
    _add_common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("graph", help="collision graph of a Sidon seed file")
    sp.add_argument("--file", required=True)
    sp.add_argument("--graph-format", choices=["edgelist", "dimacs"], default="edgelist")
    _add_common(sp)
    sp.set_defaults(func=cmd_graph)

    sp = sub.add_parser("bound", help="closed-form counting bounds (log2-space)")
    sp.add_argument("which", choices=["large", "small", "smallt", "schedule"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--t", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--omega", type=float, default=4.0)
    sp.add_argument("--s0", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("random-run", help="Monte Carlo sweep over n with p = n^a")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--n-list", required=True, help="comma-separated n values")
    sp.add_argument("--trials", type=int, default=8)
    sp.add_argument("--mode", choices=["exact", "hybrid", "greedy"], default="hybrid")
    sp.add_argument("--timings", action="store_true",
                    help="include wall-clock times in output (breaks byte-reproducibility)")
    _add_common(sp, seed=True, budget=True, threads=True)
    sp.set_defaults(func=cmd_random_run)

    sp = sub.add_parser("fit-exponent", help="fit b from a records CSV; writes curve + figure")
    sp.add_argument("--records", required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_fit_exponent)

    sp = sub.add_parser("chernoff", help="empirical concentration vs the Chernoff ceiling")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--trials", type=int, default=10_000)
    _add_common(sp, seed=True)
    sp.set_defaults(func=cmd_chernoff)

    sp = sub.add_parser("transfer", help="coupled interval-vs-grid transfer inequality check")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--trials", type=int, default=100)
    _add_common(sp, seed=True)
    sp.set_defaults(func=cmd_transfer)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except GridError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except constructions.ConstructionError as exc:
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
