"""Command line entry point ``vandercond``.

Exit codes: 0 success, 1 failed self-test, 2 precondition violation,
3 solver failure in at least one trial.
"""

from __future__ import annotations

import argparse
import sys

from .bounds import bound_report
from .errors import PreconditionError, SolverError
from .experiments import KINDS, ExperimentSpec, execute
from .nodes import (
    ConfigKind,
    classify,
    format_nodes,
    gen_compare_bdgy,
    gen_compare_lili,
    gen_one_pair,
    gen_pairwise,
    read_nodes,
    separation_stats,
)
from .spectral import MODES, spectral_summary

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_PRECONDITION = 2
EXIT_SOLVER = 3

GEN_KINDS = ("one-pair", "pairwise", "compare-bdgy", "compare-lili")


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text}")
    return v


def cmd_gen(args) -> int:
    if args.kind in ("one-pair", "pairwise", "compare-lili") and args.m is None:
        raise PreconditionError(f"--m is required for kind {args.kind}")
    if args.kind == "one-pair":
        ns = gen_one_pair(args.m, args.seed)
    elif args.kind == "pairwise":
        ns = gen_pairwise(args.m, args.c, args.seed)
    elif args.kind == "compare-bdgy":
        ns = gen_compare_bdgy(args.seed)
    else:
        ns = gen_compare_lili(args.m, args.seed)
    text = format_nodes(ns)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_cond(args) -> int:
    ns = read_nodes(args.nodes)
    s = spectral_summary(ns, args.mode)
    print(f"mode       {s.mode}")
    print(f"M          {ns.M}")
    print(f"N          {ns.N}")
    for name in ("sigma_min", "sigma_max", "cond", "norm_K", "norm_K_inv"):
        v = getattr(s, name)
        # the binary64 solver has nothing beyond 17 digits to show
        print(f"{name:<10} {v.to_str(34) if args.mode == 'gram-dd' else repr(float(v))}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    ns = read_nodes(args.nodes)
    cls, st = classify(ns, ns.pairing)
    kind = {ConfigKind.ONE_PAIR: "one-pair", ConfigKind.PAIRWISE: "pairwise"}.get(cls.kind)
    pairing = cls.pairing
    if kind is not None:
        st = separation_stats(ns, pairing)
    print(f"class {cls.kind.value}  tau={st.tau!r}  rho={st.rho!r}  c={st.c!r}")
    report = bound_report(ns.N, ns.M, st.tau, rho=st.rho, c=st.c, kind=kind, gap=st.min_gap)
    for e in report:
        flag = "yes" if e.applicable else "no "
        note = f"  ({e.precondition_note})" if e.precondition_note and not e.applicable else ""
        print(f"{e.name:<26} {e.kind:<5} {e.target:<10} {e.value!r:<24} {flag}{note}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = ExperimentSpec(
        kind=args.kind, M=args.m, c=args.c, trials=args.trials, seed=args.seed, mode=args.mode,
        workers=args.workers, resolution=args.resolution,
    )
    out = execute(spec, args.out)
    print(f"wrote {out.csv_path}")
    print(f"wrote {out.plot_path}")
    if out.failures:
        print(f"{out.failures} trial(s) hit a solver failure", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .lemmas import check_lemmas

    report = check_lemmas(args.samples, args.grid, args.schur, args.seed)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vandercond", description="Condition numbers of unit-circle Vandermonde matrices")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random node set")
    g.add_argument("--kind", choices=GEN_KINDS, required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--c", type=float, default=2.0)
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cond", help="condition number of a node file")
    c.add_argument("--nodes", required=True)
    c.add_argument("--mode", choices=MODES, default="gram-dd")
    c.set_defaults(func=cmd_cond)

    b = sub.add_parser("bounds", help="all bounds for a node file")
    b.add_argument("--nodes", required=True)
    b.set_defaults(func=cmd_bounds)

    e = sub.add_parser("experiment", help="run a randomized experiment or constant plot")
    e.add_argument("--kind", choices=KINDS, required=True)
    e.add_argument("--m", type=int)
    e.add_argument("--c", type=float, default=2.0)
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--seed", type=_seed, default=0)
    e.add_argument("--mode", choices=MODES, default="gram-dd")
    e.add_argument("--workers", type=int, help="worker processes (default: available cores)")
    e.add_argument("--resolution", type=int, help="grid points for fig-crho / fig-ctilde")
    e.add_argument("--out", required=True, help="output directory")
    e.set_defaults(func=cmd_experiment)

    s = sub.add_parser("selftest", help="randomized checks of the auxiliary lemmas")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--grid", type=int, default=3000)
    s.add_argument("--schur", type=int, default=100)
    s.add_argument("--seed", type=_seed, default=0)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
