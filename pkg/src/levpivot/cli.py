"""Command-line front end: ``levpivot <subcommand> [flags]``.

Exit codes: 0 on success, 1 on malformed usage, 2 when a computation fails.
When an output path is omitted the result goes to stdout.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import harness
from .continuum import LeverageDensity, build_partition, sample_continuum
from .errors import LevPivotError
from .leverage import inclusion_probabilities, leverage_scores
from .matrix import read_matrix_csv, weighted_least_squares, write_matrix_csv
from .rng import RngState
from .sampler import SampleSet, bernoulli_sample, pivotal_sample, subsample_system
from .tree import CompetitionTree, balanced_tree, build_tree, random_tree
from .verify import SCHEMA_VERSION, distribution_report, enumerate_pivotal


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _write_vector(path, values):
    lines = "".join(f"{float(v)!r}\n" for v in values)
    if path is None:
        sys.stdout.write(lines)
    else:
        with open(path, "w") as fh:
            fh.write(lines)


def _read_vector(path):
    return np.loadtxt(path, delimiter=",", ndmin=1).reshape(-1)


def _emit_text(path, text):
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def cmd_levscores(args):
    a = read_matrix_csv(args.inp)
    lev = leverage_scores(a)
    if args.k is None:
        _write_vector(args.out, lev.scores)
    else:
        _write_vector(args.out, inclusion_probabilities(lev, args.k).probs)


def cmd_tree(args):
    x = read_matrix_csv(args.x)
    probs = _read_vector(args.probs)
    _emit_text(args.out, build_tree(x, probs, args.method).to_json())


def cmd_sample(args):
    probs = _read_vector(args.probs)
    rng = RngState(args.seed, args.stream)
    if args.method == "bernoulli":
        s = bernoulli_sample(probs, rng)
    else:
        if args.tree is None:
            raise UsageError("sample: --tree is required for pivotal sampling")
        with open(args.tree) as fh:
            tree = CompetitionTree.from_json(fh.read())
        s = pivotal_sample(tree, probs, rng)
    if args.out is None:
        sys.stdout.write("index,weight\n")
        for i, w in zip(s.indices, s.weights):
            sys.stdout.write(f"{int(i)},{float(w)!r}\n")
    else:
        s.to_csv(args.out)


def cmd_fit(args):
    a = read_matrix_csv(args.a)
    b = _read_vector(args.b)
    s = SampleSet.from_csv(args.sample)
    sol = weighted_least_squares(*subsample_system(a, b, s))
    if sol.rank_deficient:
        print(f"warning: sampled system is rank deficient (rank {sol.rank}); "
              "returned the minimum-norm solution", file=sys.stderr)
    _write_vector(args.out, sol.coefficients)


def cmd_verify(args):
    if not 1 <= args.k < args.n:
        raise UsageError("verify: need 1 <= k < n")
    gen = RngState(args.seed).generator()
    if args.probs == "equal":
        p = np.full(args.n, args.k / args.n)
    else:
        raw = gen.uniform(0.05, 1.0, args.n)
        from .leverage import probability_ceiling

        p = probability_ceiling(raw * args.k / raw.sum(), args.k).probs
    rows = np.flatnonzero(p < 1.0)
    tree = random_tree(rows, gen) if args.tree == "random" else balanced_tree(rows)
    dist = enumerate_pivotal(tree, p)
    report = distribution_report(dist, p, args.max_conditioning, full=args.full)
    _emit_text(args.out, json.dumps(report, indent=2))


def cmd_experiment(args):
    with open(args.config) as fh:
        obj = json.load(fh)
    samplers = obj.pop("samplers", None) or [obj.pop("sampler", "pivotal_pca")]
    obj.pop("sampler", None)
    for key in ("seed", "trials", "n", "degree", "threads"):
        val = getattr(args, key)
        if val is not None:
            obj[key] = val
    if "seed" not in obj:
        raise UsageError("experiment: a seed is required (config field or --seed)")
    os.makedirs(args.out_dir, exist_ok=True)

    base = harness.ExperimentConfig.from_dict({**obj, "sampler": samplers[0]})
    data = harness.prepare(base)
    curves = {}
    summary_rows = []
    for name in samplers:
        cfg = harness.ExperimentConfig.from_dict({**obj, "sampler": name})
        res = harness.run_experiment(cfg, data, partial_path=os.path.join(args.out_dir, f"partial_{name}.csv"))
        res.write_csv(os.path.join(args.out_dir, f"results_{name}.csv"))
        ks, med = res.medians()
        summary_rows += [(name, int(k), float(m), res.opt_error) for k, m in zip(ks, med)]
        curves[name] = res

    with open(os.path.join(args.out_dir, "summary.csv"), "w") as fh:
        fh.write("sampler,k,median_error,opt_error\n")
        for name, k, m, opt in summary_rows:
            fh.write(f"{name},{k},{m!r},{opt!r}\n")

    tables = {}
    for multiple in args.multiples:
        try:
            tables[str(multiple)] = harness.samples_to_target(curves, multiple).as_dict()
        except LevPivotError as exc:
            tables[str(multiple)] = {"error": str(exc)}
    with open(os.path.join(args.out_dir, "targets.json"), "w") as fh:
        json.dump({"schema_version": harness.SCHEMA_VERSION, "tables": tables}, fh, indent=2)


def cmd_continuum(args):
    density = LeverageDensity(args.degree)
    part = build_partition(density, args.k)
    pts = sample_continuum(density, part, RngState(args.seed, args.stream))
    _write_vector(args.out, pts)
    if args.partition_out:
        _write_vector(args.partition_out, part.boundaries)


def build_parser():
    p = _Parser(prog="levpivot", description="Leverage-score pivotal sampling for active regression.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("levscores", help="leverage scores (or inclusion probabilities) of a matrix CSV")
    s.add_argument("--in", dest="inp", required=True, help="matrix CSV, one row per line")
    s.add_argument("--k", type=int, help="emit inclusion probabilities summing to k instead of scores")
    s.add_argument("--out", help="output CSV (default: stdout)")
    s.set_defaults(func=cmd_levscores)

    s = sub.add_parser("tree", help="build a competition tree from raw coordinates")
    s.add_argument("--x", required=True, help="raw coordinate CSV")
    s.add_argument("--probs", required=True, help="inclusion probability CSV, one per line")
    s.add_argument("--method", choices=["pca", "coordinate"], default="pca")
    s.add_argument("--out", help="tree JSON (default: stdout)")
    s.set_defaults(func=cmd_tree)

    s = sub.add_parser("sample", help="draw a sample set")
    s.add_argument("--tree", help="tree JSON (pivotal only)")
    s.add_argument("--probs", required=True)
    s.add_argument("--method", choices=["pivotal", "bernoulli"], default="pivotal")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--out", help="CSV with columns index,weight (default: stdout)")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("fit", help="weighted least squares on a sampled system")
    s.add_argument("--a", required=True, help="design matrix CSV")
    s.add_argument("--b", required=True, help="target vector CSV")
    s.add_argument("--sample", required=True, help="sample set CSV")
    s.add_argument("--out", help="coefficient CSV (default: stdout)")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("verify", help="exact diagnostics of a small pivotal distribution")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--tree", choices=["random", "balanced"], default="random")
    s.add_argument("--probs", choices=["equal", "random"], default="equal")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--max-conditioning", type=int, default=3)
    s.add_argument("--full", action="store_true", help="sweep every conditioning set (n <= 8)")
    s.add_argument("--out", help="report JSON (default: stdout)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("experiment", help="run a sample-size sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--degree", type=int)
    s.add_argument("--threads", type=int, default=None, help="parallel jobs (default 1)")
    s.add_argument("--multiples", type=float, nargs="+", default=[2.0, 1.1])
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("continuum", help="pivotal points for polynomial regression on [-1, 1]")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--out", help="points CSV (default: stdout)")
    s.add_argument("--partition-out", help="optional CSV of cell boundaries")
    s.set_defaults(func=cmd_continuum)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (LevPivotError, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"levpivot: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
