"""One-binary command line for generation, analysis and simulation.

Subcommands: generate, analyze, randomization-test, simulate, perturb, vc.
All randomness flows through explicit --seed flags, so every invocation is
reproducible; --json switches the report stream to canonical JSON (sorted
keys, 12 significant digits).  Exit codes: 0 success, 2 usage, 3
engine/capacity, 4 IO/parse.
"""

import csv
import sys
from pathlib import Path

from . import memory_learner as ml
from ._util import json_dumps, rng_from, worker_cap
from .errors import CapacityError, ConvergenceError, InputError, ParseError
from .hypothesis_graph import (density, gen_parity, gen_partitioned, gen_random,
                               gen_threshold, read_class, write_class)
from .mixing import check_theorem1_preconditions, compute_mixing_report
from .partition import coarsest_partition
from .perturbation import (flip_labels, randomization_experiment,
                           sample_flip_cells)
from .vc import greedy_shattered_set, vc_dim_exact

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ENGINE = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _mixing_lines(rep):
    wit = "-" if rep.witness is None else (
        f"T={list(rep.witness.hyp_subset)} S={list(rep.witness.ex_subset)}")
    return [
        f"d ({rep.method}): {_fmt(rep.d_value)}   bounds on d_min: "
        f"[{_fmt(rep.bounds[0])}, {_fmt(rep.bounds[1])}]",
        f"mixing complexity: {_fmt(rep.mixing_complexity)} ({rep.mc_kind})",
        f"is_mixing (c={_fmt(rep.mixing_constant)}): {rep.is_mixing}",
        f"witness: {wit}",
    ]


def _cmd_generate(args):
    fam = args.family
    needed = {"threshold": ("x",), "parity": ("n",),
              "random": ("h", "x"), "partitioned": ("h", "x", "r")}[fam]
    allowed = set(needed) | ({"seed"} if fam in ("random", "partitioned") else set())
    for flag in ("x", "n", "h", "r", "seed"):
        val = getattr(args, flag)
        if val is not None and flag not in allowed:
            raise UsageError(f"--{flag} does not apply to family {fam}")
        if flag in needed and val is None:
            raise UsageError(f"family {fam} requires --{flag}")
    seed = args.seed if args.seed is not None else 0
    if fam == "threshold":
        cls = gen_threshold(args.x)
    elif fam == "parity":
        cls = gen_parity(args.n)
    elif fam == "random":
        cls = gen_random(args.h, args.x, seed)
    else:
        cls = gen_partitioned(args.h, args.x, args.r, seed)
    write_class(cls, args.output)
    payload = {"file": str(args.output), "family": fam,
               "hypotheses": cls.num_hypotheses, "examples": cls.num_examples}
    lines = [f"wrote {args.output}: {cls.num_hypotheses}x{cls.num_examples} ({fam})"]
    return payload, lines


def _parse_theorem1(tokens):
    vals = {}
    for tok in tokens:
        key, _, raw = tok.partition("=")
        if key not in ("a", "s") or not raw:
            raise UsageError(f"--theorem1 expects a=<val> s=<val>, got {tok!r}")
        vals[key] = float(raw)
    if set(vals) != {"a", "s"}:
        raise UsageError("--theorem1 expects both a=<val> and s=<val>")
    return vals["a"], vals["s"]


def _cmd_analyze(args):
    cls = read_class(args.path)
    rep = compute_mixing_report(cls, method=args.dmin, baseline=args.baseline,
                                mixing_constant=args.mixing_constant)
    r = coarsest_partition(cls).r
    payload = {
        "file": str(args.path),
        "shape": {"hypotheses": cls.num_hypotheses, "examples": cls.num_examples},
        "density": float(density(cls)),
        "mixing": rep.to_json_dict(),
        "partition": {"r": r},
    }
    lines = [f"{args.path}: {cls.num_hypotheses}x{cls.num_examples}, "
             f"density {_fmt(float(density(cls)))}, r={r}"]
    lines += _mixing_lines(rep)
    if args.vc == "exact":
        res = vc_dim_exact(cls)
        payload["vc"] = {"method": "exact", **res.to_json_dict()}
        lines.append(f"VC dimension: {res.dimension} witness={list(res.witness)}")
    else:
        greedy = greedy_shattered_set(cls, epsilon=args.epsilon, d=rep.d_value)
        payload["vc"] = {"method": "greedy", "size": len(greedy.selected),
                         "shattered": greedy.certificate.shattered,
                         "example_set": list(greedy.certificate.example_set)}
        lines.append(f"greedy shattered set: size {len(greedy.selected)} "
                     f"(shattered={greedy.certificate.shattered})")
    if args.theorem1:
        a, s = _parse_theorem1(args.theorem1)
        t1 = check_theorem1_preconditions(cls, a, s, rep.d_value)
        payload["theorem1"] = t1.to_json_dict()
        lines.append(
            f"memory-bound preconditions: mixing_strength_ok={t1.mixing_strength_ok} "
            f"density_ok={t1.density_ok} states<=|H|^{1.25 - s - 3 * a:.4g}="
            f"{_fmt(t1.memory_state_bound)} interesting={t1.interesting}")
    return payload, lines


def _cmd_randomization_test(args):
    cls = read_class(args.path)
    method = None if args.method == "auto" else args.method
    rep = randomization_experiment(cls, levels=args.levels, trials=args.trials,
                                   seed=args.seed, method=method)
    payload = {"file": str(args.path), **rep.to_json_dict()}
    lines = [f"{args.path}: randomization sweep, method={rep.method}, "
             f"trials={rep.trials}"]
    for row in rep.rows:
        lines.append(
            f"level {row.level} (fraction {_fmt(row.fraction)}), trial {row.trial}: "
            f"flipped {row.cells_flipped}/{row.cells_randomized} cells, "
            f"d={_fmt(row.d_value)}, MC={_fmt(row.mixing_complexity)}, "
            f"claim bound {'held' if row.bound_holds else 'VIOLATED'}")
    return payload, lines


def _build_learner(args, cls):
    if args.learner == "threshold":
        if cls.num_hypotheses != cls.num_examples + 1:
            raise UsageError(
                "threshold learner expects a threshold-family class "
                f"(|H| = |X|+1), got {cls.num_hypotheses}x{cls.num_examples}")
        return ml.threshold_interval_learner(cls.num_examples)
    if args.learner == "version-space":
        return ml.version_space_learner(cls)
    if args.table is None:
        raise UsageError("--learner table requires --table PATH")
    learner = ml.table_learner(args.table)
    if learner.num_examples != cls.num_examples:
        raise UsageError(
            f"table learner is over {learner.num_examples} examples, "
            f"class has {cls.num_examples}")
    return learner


def _cmd_simulate(args):
    cls = read_class(args.path)
    learner = _build_learner(args, cls)
    config = ml.SimulationConfig(
        epsilon=args.epsilon, delta=args.delta, max_examples=args.max_examples,
        trials=args.trials, seed=args.seed, reuse_epochs=args.reuse_epochs)
    base = {
        "file": str(args.path), "learner": learner.name,
        "num_states": learner.num_states, "epsilon": args.epsilon,
        "delta": args.delta, "seed": args.seed,
        "max_examples": args.max_examples,
    }
    if args.all_targets:
        outcome = ml.sample_complexity(learner, cls, config)
        payload = {**base, "mode": "sample_complexity",
                   **outcome.to_json_dict()}
        rows = outcome.trial_rows()
        lines = [f"sample complexity over {len(outcome.per_target)} targets: "
                 f"m_hat={outcome.m_hat} "
                 f"success_frequency={_fmt(outcome.success_frequency)}"]
    else:
        target = args.target if args.target is not None else 0
        rows = []
        for k in range(args.trials):
            out = ml.run_learner(learner, cls, target, config,
                                 record_trajectory=False,
                                 rng=rng_from(args.seed, target, k))
            rows.append({"trial": k, **out.to_json_dict()})
        payload = {**base, "mode": "trials", "target": target, "trials": rows}
        lines = [f"learner {learner.name} on {args.path}, target {target}:"]
        for row in rows:
            status = (f"success after {row['steps_to_success']} examples"
                      if row["succeeded"] else "budget exhausted")
            lines.append(f"trial {row['trial']}: {status} "
                         f"(final error {_fmt(row['final_error'])})")
    if args.csv:
        fields = sorted({k for row in rows for k in row})
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)
        lines.append(f"wrote {args.csv}")
    return payload, lines


def _cmd_perturb(args):
    cls = read_class(args.path)
    cells = sample_flip_cells(cls, args.flips, args.seed)
    perturbed = flip_labels(cls, cells)
    write_class(perturbed, args.output)
    method = None if args.method == "auto" else args.method
    from .perturbation import _engine_for
    method, engine = _engine_for(cls, method)
    d_before = engine(cls).d_value
    d_after = engine(perturbed).d_value
    bound = d_before + args.flips ** 0.5
    payload = {
        "file": str(args.path), "out": str(args.output), "b": args.flips,
        "method": method, "d_before": d_before, "d_after": d_after,
        "bound": bound, "holds": bool(d_after <= bound + 1e-9),
    }
    lines = [f"wrote {args.output}: flipped {args.flips} cells "
             f"(d {method}: {_fmt(d_before)} -> {_fmt(d_after)}, "
             f"bound {_fmt(bound)}, holds={payload['holds']})"]
    return payload, lines


def _cmd_vc(args):
    cls = read_class(args.path)
    if args.method == "exact":
        res = vc_dim_exact(cls)
        payload = {"file": str(args.path), "method": "exact", **res.to_json_dict()}
        lines = [f"VC dimension: {res.dimension} witness={list(res.witness)}"]
    else:
        method = None if args.dmin == "auto" else args.dmin
        from .perturbation import _engine_for
        _, engine = _engine_for(cls, method)
        d = engine(cls).d_value
        result = greedy_shattered_set(cls, epsilon=args.epsilon, d=d)
        payload = {"file": str(args.path), "method": "greedy", "d_used": d,
                   **result.to_json_dict()}
        lines = [f"greedy shattered set: size {len(result.selected)}, "
                 f"shattered={result.certificate.shattered}, "
                 f"set={list(result.certificate.example_set)}"]
    return payload, lines


def build_parser():
    import argparse

    parser = argparse.ArgumentParser(
        prog="mixlab",
        description="Analyze finite hypothesis classes as bipartite graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a stock class to a file")
    p.add_argument("--family", required=True,
                   choices=["threshold", "parity", "random", "partitioned"])
    p.add_argument("--x", type=int, help="number of examples")
    p.add_argument("--n", type=int, help="parity bits")
    p.add_argument("--h", type=int, help="number of hypotheses")
    p.add_argument("--r", type=int, help="number of parts (partitioned)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_generate, json=False)

    p = sub.add_parser("analyze", help="mixing, partition and VC report")
    p.add_argument("path")
    p.add_argument("--dmin", default="exact",
                   choices=["exact", "spectral", "search", "oracle"])
    p.add_argument("--baseline", default="half", choices=["half", "density"])
    p.add_argument("--mixing-constant", type=float, default=1.0)
    p.add_argument("--vc", default="exact", choices=["exact", "greedy"])
    p.add_argument("--epsilon", type=float, default=0.25,
                   help="balance slack for --vc greedy")
    p.add_argument("--theorem1", nargs=2, metavar=("a=A", "s=S"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("randomization-test",
                       help="mixing complexity under label corruption levels")
    p.add_argument("path")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", default="auto", choices=["auto", "exact", "spectral"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_randomization_test)

    p = sub.add_parser("simulate", help="run a finite-state learner")
    p.add_argument("path")
    p.add_argument("--learner", required=True,
                   choices=["threshold", "version-space", "table"])
    p.add_argument("--table", help="table learner file (with --learner table)")
    p.add_argument("--target", type=int, default=None)
    p.add_argument("--all-targets", action="store_true",
                   help="aggregate worst case over all targets")
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-examples", type=int, default=1000)
    p.add_argument("--reuse-epochs", action="store_true",
                   help="cycle permutations instead of i.i.d. draws")
    p.add_argument("--csv", help="also write one row per trial to this file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("perturb", help="flip random cells and re-measure d")
    p.add_argument("path")
    p.add_argument("--flips", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", default="auto", choices=["auto", "exact", "spectral"])
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("vc", help="VC dimension or greedy shattered set")
    p.add_argument("path")
    p.add_argument("--method", default="exact", choices=["exact", "greedy"])
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--dmin", default="auto",
                   choices=["auto", "exact", "spectral", "search", "oracle"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_vc)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        worker_cap()
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        payload, lines = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, ConvergenceError) as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InputError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.json:
        print(json_dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
