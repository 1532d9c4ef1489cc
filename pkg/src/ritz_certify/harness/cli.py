"""Command-line entry point ``ritz-certify``.

Exit codes: 0 on success, 2 on validation errors, 3 on numerical failures.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..errors import NumericalError, ValidationError
from ..gap_model import ESTIMATED, EXACT
from . import experiments as ex

log = logging.getLogger("ritz_certify")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="ritz-certify",
                                description="Rayleigh-Ritz with certified error bounds.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="bounds for a matrix and a trial basis from files")
    b.add_argument("--matrix", required=True, type=Path, help="MatrixMarket or CSV matrix")
    b.add_argument("--basis", required=True, type=Path, help="MatrixMarket or CSV n x k basis")
    b.add_argument("--mode", choices=(EXACT, ESTIMATED), default=EXACT)
    b.add_argument("--k1", type=int, default=None, help="also bound the k1 smallest Ritz vectors")
    b.add_argument("--out", type=Path, default=Path("results/bounds"))

    e = sub.add_parser("experiment", help="reproduce an experiment")
    esub = e.add_subparsers(dest="experiment", required=True)

    def common(q, out, trials=None, seed=0):
        q.add_argument("--seed", type=int, default=seed)
        q.add_argument("--out", type=Path, default=Path("results") / out)
        q.add_argument("--plot", action="store_true", help="also write SVG plots")
        if trials is not None:
            q.add_argument("--trials", type=int, default=trials)

    f = esub.add_parser("fig2", help="2 x 2 partition bound vs observed angles")
    f.add_argument("--gap", type=float, default=1e-3)
    f.add_argument("--n", type=int, default=10)
    common(f, "fig2", trials=100, seed=7)

    lap = esub.add_parser("laplacian", help="LOBPCG on the 1D Laplacian")
    lap.add_argument("--n", type=int, default=1000)
    lap.add_argument("--k", type=int, default=50, help="block size")
    lap.add_argument("--iters", type=int, default=40)
    common(lap, "laplacian", seed=7)

    s = esub.add_parser("svd", help="projection SVD bounds on planted-decay matrices")
    common(s, "svd", trials=20, seed=3)

    st = esub.add_parser("sturm", help="Sturm-Liouville polynomial Rayleigh-Ritz")
    st.add_argument("--kmax", type=int, default=12)
    common(st, "sturm")
    return p


def _config(args):
    name = args.experiment
    kw = dict(seed=args.seed, output_dir=args.out)
    if name == "fig2":
        kw.update(gap_setting=args.gap, n=args.n, trials=args.trials)
    elif name == "laplacian":
        kw.update(n=args.n, block_size=args.k, iters=args.iters)
    elif name == "svd":
        kw.update(trials=args.trials)
    elif name == "sturm":
        kw.update(kmax=args.kmax)
    return ex.ExperimentConfig(experiment=name, **kw)


def _run(args):
    if args.command == "bounds":
        table = ex.bounds_on_file(args.matrix, args.basis, mode=args.mode, k1=args.k1,
                                  output_dir=args.out)
        log.info("wrote %d rows to %s", len(table), args.out / "bounds.csv")
        return
    config = _config(args)
    ex.run_experiment(config)
    written = sorted(Path(config.output_dir).glob("*.csv"))
    for path in written:
        log.info("wrote %s", path)
    if args.plot:
        from .plotting import kind_of, plot_csv

        for path in written:
            try:
                kind_of(path)
            except KeyError:
                continue
            log.info("wrote %s", plot_csv(path))


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        _run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
