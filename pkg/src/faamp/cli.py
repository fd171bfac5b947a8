"""Command-line surface.

Subcommands: gen-matrix, recover, sweep, oracle, selftest. Exit status 0 on
success; validation or numerical failures print one diagnostic line and exit 1.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import amp_discrete, baselines
from .harness import load_config, run_sweep, write_csv
from .measurement import (load_matrix, make_rademacher,
                          make_random_demodulator, save_matrix)
from .selftest import run_equivalence_suite
from .signal_model import Alphabet, make_prior


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faamp",
        description="Sparse finite-alphabet recovery via message passing")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--config", help="experiment config file (JSON)")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress informational output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-matrix", help="generate and dump a measurement matrix")
    p.add_argument("--kind", choices=["rademacher", "random_demodulator"],
                   default="rademacher")
    p.add_argument("--W", type=int, required=True)
    p.add_argument("--R", type=int, help="rows (Rademacher)")
    p.add_argument("--Rprime", type=int, help="accumulator rows (demodulator)")

    for name in ("recover", "oracle"):
        p = sub.add_parser(name, help=f"{name} a single instance from files")
        p.add_argument("--matrix", required=True, help="matrix dump file")
        p.add_argument("--observation", required=True,
                       help="text file with one sample per line")
        p.add_argument("--sigma2", type=float, required=True)
        p.add_argument("--K", type=int, required=True)
        p.add_argument("--alphabet", type=float, nargs="+", default=[-1.0, 1.0])
        if name == "recover":
            p.add_argument("--iterations", type=int, default=50)

    sub.add_parser("sweep", help="run a Monte Carlo sweep from --config to --out")
    sub.add_parser("selftest", help="run the optimized-vs-reference equivalence suite")
    return parser


def _cmd_gen_matrix(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.kind == "rademacher":
        if args.R is None:
            raise ValueError("--R is required for a Rademacher matrix")
        matrix = make_rademacher(args.W, args.R, rng)
    else:
        if args.Rprime is None:
            raise ValueError("--Rprime is required for a random demodulator matrix")
        matrix = make_random_demodulator(args.W, args.Rprime, rng)
    if not args.out:
        raise ValueError("--out is required")
    matrix.meta["seed"] = args.seed
    save_matrix(matrix, args.out)
    if not args.quiet:
        print(f"wrote {matrix.kind.value} matrix {matrix.shape} to {args.out}")
    return 0


def _load_instance(args):
    matrix = load_matrix(args.matrix)
    v = np.loadtxt(args.observation, ndmin=1)
    alphabet = Alphabet(tuple(args.alphabet))
    prior = make_prior(alphabet, args.K, matrix.entries.shape[1])
    return matrix, v, prior


def _cmd_recover(args) -> int:
    matrix, v, prior = _load_instance(args)
    result = amp_discrete.run(matrix, v, args.sigma2, prior, T=args.iterations)
    print("estimate: " + " ".join(f"{x:g}" for x in result.estimate))
    print(f"iterations: {result.iterations_run}")
    if not args.quiet:
        a0 = prior.alphabet.augmented
        print("log-posteriors (symbols: " + " ".join(f"{a:g}" for a in a0) + ")")
        for w, row in enumerate(result.final_log_posteriors):
            print(f"  w={w}: " + " ".join(f"{x:.6f}" for x in row))
    return 0


def _cmd_oracle(args) -> int:
    matrix, v, prior = _load_instance(args)
    best = baselines.exact_map_enumerate(matrix, v, args.sigma2, prior)
    print("map estimate: " + " ".join(f"{x:g}" for x in best))
    return 0


def _cmd_sweep(args) -> int:
    if not args.config or not args.out:
        raise ValueError("sweep requires --config and --out")
    config = load_config(args.config)
    records = run_sweep(config)
    write_csv(records, args.out)
    if not args.quiet:
        print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_selftest(args) -> int:
    passed, worst, worst_norm = run_equivalence_suite(
        master_seed=args.seed or 20260823)
    print(f"equivalence suite: {'PASS' if passed else 'FAIL'} "
          f"(worst deviation {worst:.3e}, tolerance 1e-10; "
          f"worst normalization residue {worst_norm:.3e})")
    return 0 if passed else 1


_COMMANDS = {
    "gen-matrix": _cmd_gen_matrix,
    "recover": _cmd_recover,
    "oracle": _cmd_oracle,
    "sweep": _cmd_sweep,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
