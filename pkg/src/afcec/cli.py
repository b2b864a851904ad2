"""Command-line front end.

stdout carries machine-readable JSON or CSV only; logs go to stderr.
Exit codes: 0 ok, 1 configuration error, 2 data error, 3 degenerate fit.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from . import acagmm, data, engine, selection
from .curves import BUILTIN_KINDS, builtin_family
from .errors import (
    AfcecError,
    AllClustersDegenerate,
    DegenerateCluster,
    InvalidConfig,
    InvalidSpec,
    IoError,
    ParseError,
    RankDeficient,
)

log = logging.getLogger("afcec")

EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the exit contract reserves 2 for data
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self._config_exit(message))

    def _config_exit(self, message):
        print(f"error: {message}", file=sys.stderr)
        return EXIT_CONFIG


def _threads():
    """Restart concurrency cap from AFCEC_THREADS (0 or unset = auto)."""
    raw = os.environ.get("AFCEC_THREADS", "").strip()
    if not raw:
        return None
    try:
        v = int(raw)
    except ValueError:
        raise InvalidConfig(f"AFCEC_THREADS must be an integer, got {raw!r}") from None
    if v < 0:
        raise InvalidConfig("AFCEC_THREADS must be >= 0")
    return v if v else 0


def build_parser():
    parser = _Parser(prog="afcec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="cluster a CSV dataset")
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--k", type=int, required=True)
    p_fit.add_argument("--family", choices=BUILTIN_KINDS, default="quadratic")
    p_fit.add_argument("--epsilon", type=float, default=1e-4)
    p_fit.add_argument("--deletion-fraction", type=float, default=0.01)
    p_fit.add_argument("--restarts", type=int, default=1)
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--init", choices=engine.INITS, default="random_partition")
    p_fit.add_argument("--max-iters", type=int, default=200)
    p_fit.add_argument("--output-model")
    p_fit.add_argument("--output-plot")
    p_fit.add_argument("--ll-mode", choices=selection.LL_MODES, default="mixture")

    p_gen = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p_gen.add_argument("--kind", choices=data.GENERATOR_KINDS, required=True)
    p_gen.add_argument("--n", type=int, default=500)
    p_gen.add_argument("--noise", type=float, default=0.1)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)

    p_sweep = sub.add_parser("sweep", help="fit k=1..K, emit score table CSV")
    p_sweep.add_argument("--input", required=True)
    p_sweep.add_argument("--k-max", type=int, default=10)
    p_sweep.add_argument("--family", choices=BUILTIN_KINDS, default="quadratic")
    p_sweep.add_argument("--epsilon", type=float, default=1e-4)
    p_sweep.add_argument("--deletion-fraction", type=float, default=0.01)
    p_sweep.add_argument("--restarts", type=int, default=1)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--init", choices=engine.INITS, default="random_partition")
    p_sweep.add_argument("--max-iters", type=int, default=200)
    p_sweep.add_argument("--ll-mode", choices=selection.LL_MODES, default="mixture")

    p_aca = sub.add_parser("acagmm-check", help="normalization table CSV")
    p_aca.add_argument("--a-grid", default=",".join(str(v) for v in acagmm.DEFAULT_A_GRID))
    p_aca.add_argument(
        "--sigma-grid", default=",".join(str(v) for v in acagmm.DEFAULT_SIGMA_GRID)
    )
    p_aca.add_argument("--box", type=float, default=acagmm.DEFAULT_BOX)
    p_aca.add_argument("--n", type=int, default=acagmm.DEFAULT_N)
    return parser


def _fit_model(args):
    ds = data.load_csv(args.input)
    if args.k < 1:
        raise InvalidConfig("--k must be >= 1")
    if args.restarts < 1:
        raise InvalidConfig("--restarts must be >= 1")
    family = builtin_family(args.family, ds.d - 1)
    cfg = engine.EngineConfig(
        k_init=args.k,
        family=family,
        epsilon=args.epsilon,
        deletion_fraction=args.deletion_fraction,
        max_iters=args.max_iters,
        seed=args.seed,
        init=args.init,
    )
    cfg.validate()
    best, all_costs = engine.fit_restarts(ds, cfg, args.restarts, max_workers=_threads())
    return ds, best, all_costs


def cmd_fit(args):
    ds, best, all_costs = _fit_model(args)
    sc = selection.score(ds, best, ll_mode=args.ll_mode)
    log.info(
        "fit: k=%d, %d iterations, %d restart(s), cost %.6f",
        best.k, best.iterations, len(all_costs), best.final_cost,
    )
    if args.output_model:
        data.save_model(best, args.output_model)
        log.info("model written to %s", args.output_model)
    if args.output_plot:
        data.export_plot_data(ds, best, args.output_plot)
        log.info("plot data written to %s", args.output_plot)
    print(json.dumps({
        "cost": best.final_cost,
        "loglik": sc.loglik,
        "bic": sc.bic,
        "aic": sc.aic,
        "k_final": best.k,
        "iterations": best.iterations,
    }))
    return 0


def cmd_generate(args):
    spec = data.GeneratorSpec(kind=args.kind, n=args.n, noise_sigma=args.noise, seed=args.seed)
    ds = data.generate(spec)
    data.save_csv(ds, args.out)
    log.info("wrote %d x %d dataset to %s", ds.n, ds.d, args.out)
    return 0


def cmd_sweep(args):
    ds = data.load_csv(args.input)
    if args.k_max < 1:
        raise InvalidConfig("--k-max must be >= 1")
    if args.restarts < 1:
        raise InvalidConfig("--restarts must be >= 1")
    family = builtin_family(args.family, ds.d - 1)
    writer = csv.writer(sys.stdout)
    writer.writerow(
        ["k", "k_final", "cost", "loglik_mixture", "loglik_max", "n_params", "bic", "aic"]
    )
    workers = _threads()
    for k in range(1, args.k_max + 1):
        cfg = engine.EngineConfig(
            k_init=k,
            family=family,
            epsilon=args.epsilon,
            deletion_fraction=args.deletion_fraction,
            max_iters=args.max_iters,
            seed=args.seed,
            init=args.init,
        )
        cfg.validate()
        best, _ = engine.fit_restarts(ds, cfg, args.restarts, max_workers=workers)
        ll_mix = selection.log_likelihood(ds, best, "mixture")
        ll_max = selection.log_likelihood(ds, best, "max")
        ll = ll_mix if args.ll_mode == "mixture" else ll_max
        n_params = selection.count_params(best)
        writer.writerow([
            k, best.k, repr(best.final_cost), repr(ll_mix), repr(ll_max), n_params,
            repr(-2.0 * ll + n_params * math.log(ds.n)),
            repr(-2.0 * ll + 2.0 * n_params),
        ])
        log.info("k=%d -> k_final=%d", k, best.k)
    return 0


def _parse_grid(text, name):
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise InvalidConfig(f"--{name} must be comma-separated numbers, got {text!r}") from None
    if not vals:
        raise InvalidConfig(f"--{name} is empty")
    return vals


def cmd_acagmm_check(args):
    a_grid = _parse_grid(args.a_grid, "a-grid")
    sigma_grid = _parse_grid(args.sigma_grid, "sigma-grid")
    if any(a == 0 for a in a_grid):
        raise InvalidConfig("--a-grid entries must be nonzero")
    if any(s <= 0 for s in sigma_grid):
        raise InvalidConfig("--sigma-grid entries must be positive")
    if args.box <= 0:
        raise InvalidConfig("--box must be positive")
    if args.n < 2 or args.n % 2:
        raise InvalidConfig("--n must be even and >= 2")
    rows = acagmm.normalization_table(a_grid, sigma_grid, args.box, args.n)
    writer = csv.writer(sys.stdout)
    writer.writerow(["a", "sigma1", "sigma2", "raw_integral", "corrected_integral", "excluded_mass"])
    for r in rows:
        writer.writerow([
            repr(r["a"]), repr(r["sigma1"]), repr(r["sigma2"]),
            repr(r["raw_integral"]), repr(r["corrected_integral"]), repr(r["excluded_mass"]),
        ])
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "generate": cmd_generate,
    "sweep": cmd_sweep,
    "acagmm-check": cmd_acagmm_check,
}


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InvalidConfig, InvalidSpec, ValueError) as e:
        log.error("configuration error: %s", e)
        return EXIT_CONFIG
    except (ParseError, IoError, FileNotFoundError, OSError) as e:
        log.error("data error: %s", e)
        return EXIT_DATA
    except (DegenerateCluster, AllClustersDegenerate, RankDeficient) as e:
        log.error("degenerate fit: %s", e)
        return EXIT_DEGENERATE
    except AfcecError as e:
        log.error("error: %s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
