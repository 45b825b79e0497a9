"""Command line entry point: ``relaylab fig2|fig3|fig4|analytic|simulate``.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
4 I/O error.
"""

import argparse
import sys

from . import rng as rngs
from .analytic import theorem_terms
from .config import ConfigError, load_config
from .experiments import run
from .laplace import NonConvergenceError
from .output import OutputError, emit_outputs
from .relay_sim import estimate_success_probs

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("fig2", "fig3", "fig4", "analytic", "simulate")


def build_parser():
    ap = argparse.ArgumentParser(prog="relaylab", description="Hybrid relay mode-selection experiments.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", metavar="PATH", help="INI configuration file")
    ap.add_argument("--seed", type=int, help="master seed")
    ap.add_argument("--out", metavar="DIR", help="output directory")
    ap.add_argument("--replications", type=int, help="bandit replications per point")
    ap.add_argument("--slots", type=int, help="Monte Carlo slots per point")
    ap.add_argument("--horizon", type=int, help="bandit horizon in rounds")
    ap.add_argument("--gamma", type=float, help="discount of the discounted policies")
    ap.add_argument("--canonical-discount", action="store_true",
                    help="discounted counts in the confidence bonus")
    ap.add_argument("--workers", type=int, help="worker threads")
    ap.add_argument("--no-svg", action="store_true", help="skip the SVG chart")
    return ap


def _config(args):
    exp = args.command if args.command in ("fig2", "fig3", "fig4") else "custom"
    if args.config is None:
        cfg = load_config(experiment=exp)
    else:
        try:
            cfg = load_config(path=args.config, experiment=exp)
        except FileNotFoundError:
            raise ConfigError("--config", f"no such file {args.config!r}") from None
    over = {"seed": args.seed, "out_dir": args.out, "replications": args.replications,
            "n_slots": args.slots, "horizon": args.horizon, "gamma": args.gamma,
            "workers": args.workers}
    over = {k: v for k, v in over.items() if v is not None}
    if args.canonical_discount:
        over["canonical_discount"] = True
    return cfg.replace(**over) if over else cfg


def _analytic(cfg, out):
    t = theorem_terms(cfg.params)
    for key, val in t.as_dict().items():
        out.write(f"{key} = {val}\n" if isinstance(val, str) else f"{key} = {val:.6f}\n")


def _simulate(cfg, out):
    g = rngs.generator(cfg.seed, rngs.experiment_code("simulate"))
    est = estimate_success_probs(cfg.params, cfg.n_slots, g, cfg.power_rule, cfg.far_field)
    out.write(f"n_slots = {cfg.n_slots}\n")
    for key, e in est.as_dict().items():
        out.write(f"{key} = {e.value:.6f} +/- {e.se:.6f}\n")


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = _config(args)
        if args.command == "analytic":
            _analytic(cfg, out)
        elif args.command == "simulate":
            _simulate(cfg, out)
        else:
            rows = run(cfg)
            for path in emit_outputs(rows, cfg.experiment, cfg.seed, cfg.out_dir,
                                     svg=not args.no_svg):
                out.write(path + "\n")
    except ConfigError as exc:
        print(f"relaylab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"relaylab: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OutputError, OSError) as exc:
        print(f"relaylab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
