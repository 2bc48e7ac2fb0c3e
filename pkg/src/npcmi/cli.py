"""Command-line entry point: ``generate``, ``estimate`` and ``benchmark``.

Exit status is 0 on success, 2 on usage or configuration errors and 1 on
runtime errors (including malformed data files).
"""
import argparse
import sys

from . import discrete
from .bandwidth import LL1, LL2, NAIVE_FIXED, BandwidthConfig
from .dataio import read_pairs, write_pairs
from .errors import ConfigurationError, NPCError
from .estimator import (
    CSV_FIELDS,
    GC_PARAMETRIC,
    GRID_QUADRATURE,
    MONTE_CARLO,
    NPC_LL,
    NPC_NAIVE,
    EstimatorConfig,
    estimate_mi,
)
from .harness import ExperimentConfig, MarginalSpec, generate_dataset, parse_copula, raw_path_for, run_experiment

# --method value -> (estimator method, bandwidth variant)
_METHODS = {
    "ll1": (NPC_LL, LL1),
    "ll2": (NPC_LL, LL2),
    "naive": (NPC_NAIVE, LL1),
    "naive-fixed": (NPC_NAIVE, NAIVE_FIXED),
    "gc": (GC_PARAMETRIC, LL1),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="npcmi", description="Nonparametric-copula mutual information.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a simulated dataset CSV")
    gen.add_argument("--copula", required=True, help="independence | gaussian:R | studentt:R:NU")
    gen.add_argument("--marginals", default="normal,normal", help="X,Y with normal | gamma:A:B | poisson:L")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--header", action="store_true", help="write an x,y header line")
    gen.add_argument("-o", "--output", required=True)

    est = sub.add_parser("estimate", help="estimate MI of a two-column CSV")
    est.add_argument("input")
    est.add_argument("--method", choices=sorted(_METHODS), default="ll1")
    est.add_argument("--grid-k", type=int, default=100)
    est.add_argument("--mc", action="store_true", help="Monte Carlo entropy with a confidence interval")
    est.add_argument("--mc-samples", type=int, default=100_000)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--discrete", action="store_true", help="treat the data as integers and jitter them")
    est.add_argument("--csv-row", action="store_true", help="also print a header and CSV row")

    bench = sub.add_parser("benchmark", help="run an experiment config")
    bench.add_argument("config")
    bench.add_argument("-o", "--output", help="metrics CSV (overrides the config)")
    bench.add_argument("--raw-output", help="per-replicate CSV (overrides the config)")
    return parser


def _generate(args):
    if args.n < 1:
        raise ConfigurationError("--n must be positive")
    spec = parse_copula(args.copula)
    parts = args.marginals.split(",")
    if len(parts) != 2:
        raise ConfigurationError("--marginals takes two comma-separated specs")
    marginals = tuple(MarginalSpec.parse(p) for p in parts)
    data = generate_dataset(spec, marginals, args.n, args.seed)
    write_pairs(args.output, data, header=("x", "y") if args.header else None)
    return 0


def _estimate(args):
    method, variant = _METHODS[args.method]
    cfg = EstimatorConfig(
        method=method,
        grid_k=args.grid_k,
        bandwidth=BandwidthConfig(variant=variant),
        entropy_mode=MONTE_CARLO if args.mc else GRID_QUADRATURE,
        mc_samples=args.mc_samples,
        seed=args.seed,
    )
    data = read_pairs(args.input, integer=args.discrete)
    if args.discrete:
        data = discrete.jitter(data, args.seed)
    result = estimate_mi(data, config=cfg)
    print(result.to_record())
    if args.csv_row:
        print(",".join(CSV_FIELDS))
        print(result.to_csv_row())
    return 0


def _benchmark(args):
    cfg = ExperimentConfig.from_file(args.config)
    if args.output:
        cfg.output = args.output
    if args.raw_output:
        cfg.raw_output = args.raw_output
    if cfg.output is None:
        raise ConfigurationError("no output path: set output= in the config or pass --output")
    rows, _ = run_experiment(cfg)
    print(f"wrote {len(rows)} rows to {cfg.output} and {cfg.raw_output or raw_path_for(cfg.output)}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"generate": _generate, "estimate": _estimate, "benchmark": _benchmark}[args.command]
    try:
        return handler(args)
    except ConfigurationError as exc:
        print(f"npcmi: configuration error: {exc}", file=sys.stderr)
        return 2
    except (NPCError, OSError, ValueError, ArithmeticError) as exc:
        print(f"npcmi: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
