"""Command line front end: ``gwising <experiment> [options]``.

Exit codes: 0 success, 2 invariant violation, 3 configuration error,
4 vertex cap exceeded.  Results go to ``PREFIX.csv`` / ``PREFIX.json`` with
``--out PREFIX``; otherwise the CSV is printed to stdout and the JSON summary
to stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .tree_synth import VertexCapExceeded

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_CONFIG = 3
EXIT_CAP = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved for invariant violations here
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _common(p):
    p.add_argument("--config", help="key = value file; command line flags override it")
    p.add_argument("--out", help="output prefix")
    p.add_argument("--workers", type=int)


def _dist(p):
    p.add_argument("--dist", help="powerlaw:lambda=L,kmax=K | 2:0.5,3:0.5 | path to a k p table")


def _tree(p):
    p.add_argument("--model", choices=["gw", "config", "gws", "size-biased"])
    p.add_argument("--s", type=int)
    p.add_argument("--root-law", dest="root_law", choices=["process", "visualization"])
    p.add_argument("--vertex-cap", dest="vertex_cap", type=int)


def _seed(p):
    p.add_argument("--seed", type=int, help="base seed (required)")
    p.add_argument("--replicas", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gwising", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)

    p = sub.add_parser("thresholds", help="closed-form thresholds for one parameter point")
    _common(p)
    _dist(p)
    p.add_argument("--s", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--J", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--K", type=float)

    p = sub.add_parser("generate", help="sample one tree and write it to PREFIX.tree")
    _common(p)
    _dist(p)
    _tree(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("growth", help="ensemble growth of generation sizes")
    _common(p)
    _dist(p)
    _tree(p)
    _seed(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--c", type=float, help="normalizing growth constant (default a - 1)")
    p.add_argument("--counts-only", dest="counts_only", action="store_const", const=True)

    p = sub.add_parser("gap", help="boundary-induced root magnetization gap")
    _common(p)
    _dist(p)
    _tree(p)
    _seed(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--depths", help="e.g. 4..9 or 4,6,8")
    p.add_argument("--K", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--J", type=float)
    p.add_argument("--scheme", choices=["constant", "iid-sign", "iid-uniform"])
    p.add_argument("--prob-minus", dest="prob_minus", type=float)
    p.add_argument("--xi", help="first boundary: plus, minus, free, random[:p]")
    p.add_argument("--eta", help="second boundary")

    p = sub.add_parser("lyons-scan", help="locate the regular-tree transition")
    _common(p)
    p.add_argument("--branching", type=float)
    p.add_argument("--K-grid", dest="K_grid", help="comma separated couplings")
    p.add_argument("--depths")
    p.add_argument("--J", type=float)

    p = sub.add_parser("percolate", help="coupled bond-percolation survival curve")
    _common(p)
    _dist(p)
    _tree(p)
    _seed(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--thetas", help="comma separated bond probabilities")
    p.add_argument("--depth", type=int)
    return parser


def config_from_args(args) -> harness.ExperimentConfig:
    values = harness.read_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in ("experiment", "config") or value is None:
            continue
        values[key] = value
    values.pop("experiment", None)
    return harness.make_config(args.experiment, **values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        artifact = harness.run(cfg)
    except (harness.ConfigError, OSError) as exc:
        print(f"gwising: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VertexCapExceeded as exc:
        print(f"gwising: {exc}", file=sys.stderr)
        return EXIT_CAP

    if cfg.out:
        for path in artifact.write(cfg.out):
            print(path, file=sys.stderr)
    else:
        if artifact.columns:
            sys.stdout.write(artifact.csv_text())
        sys.stderr.write(artifact.json_text())

    warning = artifact.summary.get("warning")
    if warning:
        print(f"gwising: warning: {warning}", file=sys.stderr)
    if artifact.violations:
        print(f"gwising: {artifact.violations} invariant violation(s)", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
