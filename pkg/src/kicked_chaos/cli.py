"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical contract violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import ConfigError, ContractViolation

log = logging.getLogger("kicked_chaos")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

SUBCOMMAND_OBSERVABLES = {
    "stats": ("spacings", "ratios", "evec", "evec-log"),
    "entropy": ("entropy",),
    "coeffs": ("coefficients",),
}


class _LastWins(argparse.Action):
    """Store the value; warn when the flag is given more than once."""

    def __call__(self, parser, namespace, values, option_string=None):
        seen = getattr(namespace, "_seen_flags", set())
        if self.dest in seen:
            warnings.warn(f"{option_string} given more than once; using the last value {values!r}",
                          UserWarning, stacklevel=2)
        seen.add(self.dest)
        namespace._seen_flags = seen
        setattr(namespace, self.dest, values)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def _source_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key-value config file with [source]/[run]/[bins] sections")
    g = p.add_argument_group("source")
    g.add_argument("--chain", action=_LastWins, help="chain preset A or B (or 'custom' from the config file)")
    g.add_argument("--ensemble", action=_LastWins, help="circular ensemble: coe or cue")
    g.add_argument("--n", action=_LastWins, help="ensemble matrix dimension")
    r = p.add_argument_group("run")
    r.add_argument("--realizations", action=_LastWins)
    r.add_argument("--seed", action=_LastWins, help="base seed (unsigned 64-bit)")
    r.add_argument("--orders", action=_LastWins, help="comma-separated interaction orders, e.g. 2,4,7,12")
    r.add_argument("--samples-per-order", action=_LastWins)
    r.add_argument("--cluster-tol", action=_LastWins)
    r.add_argument("--output", "-o", action=_LastWins, help="output directory")
    r.add_argument("--cache-dir", type=Path,
                   help="eigendecomposition cache (default: $KICKED_CHAOS_CACHE, unset = no cache)")


def _overrides(args, observables=None) -> dict[str, str]:
    mapping = {
        "chain": "source.chain", "ensemble": "source.ensemble", "n": "source.n",
        "realizations": "run.realizations", "seed": "run.seed", "orders": "run.orders",
        "samples_per_order": "run.samples_per_order", "cluster_tol": "run.cluster_tol",
        "output": "run.output",
    }
    out = {}
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = str(value)
    if observables is not None:
        out["run.observables"] = ",".join(observables)
    elif getattr(args, "observables", None):
        out["run.observables"] = args.observables
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="kicked-chaos", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("run", help="full pipeline with selectable observables")
    _source_flags(p)
    p.add_argument("--observables", action=_LastWins,
                   help="comma-separated subset of spacings,ratios,evec,evec-log,entropy,coefficients")

    p = sub.add_parser("spectrum", help="diagonalize and write eigenphases (fills the cache)")
    _source_flags(p)
    for name, obs in SUBCOMMAND_OBSERVABLES.items():
        p = sub.add_parser(name, help=f"observables: {', '.join(obs)}")
        _source_flags(p)

    p = sub.add_parser("appendix-b-check", help="Monte Carlo check of the Gaussian coefficient law ingredients")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0, action=_LastWins)
    p.add_argument("--ensemble", choices=["coe", "cue", "both"], default="both")
    p.add_argument("--output", "-o", type=Path, default=Path("out"))

    p = sub.add_parser("refs", help="tabulate reference densities")
    p.add_argument("--n", type=int, default=4096, help="dimension for the coefficient Gaussians and Page curve")
    p.add_argument("--output", "-o", type=Path, default=Path("out"))
    return parser


def _cmd_run(args, observables=None):
    from .pipeline import run

    config = _load(args, observables)
    result = run(config, cache_dir=args.cache_dir)
    for name in sorted(result.files):
        print(result.files[name])
    if result.pooled_ratios is not None:
        r = result.pooled_ratios
        print(f"<r> = {r.mean_r:.4f} +- {r.stderr_r:.4f}   <r~> = {r.mean_r_tilde:.4f} +- {r.stderr_r_tilde:.4f}")
    return EXIT_OK


def _load(args, observables=None):
    from .config import parse_config

    return parse_config(args.config, _overrides(args, observables))


def _cmd_spectrum(args):
    from .pipeline import decompose_realization, write_csv

    config = _load(args, observables=())
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    cache_dir = args.cache_dir
    if cache_dir is None:
        from .cache import cache_dir_from_env

        cache_dir = cache_dir_from_env()
    rows = []
    for i in range(config.realizations):
        d = decompose_realization(config, i, cache_dir)
        rows.extend((i, n, phi) for n, phi in enumerate(d.phases))
    print(write_csv(out / "phases.csv", ["realization", "n", "phase"], rows))
    return EXIT_OK


def _cmd_appendix(args):
    from .heff import appendix_b_check
    from .pipeline import write_json

    args.output.mkdir(parents=True, exist_ok=True)
    kinds = ["coe", "cue"] if args.ensemble == "both" else [args.ensemble]
    report = {}
    for j, kind in enumerate(kinds):
        rng = np.random.default_rng(np.random.SeedSequence(args.seed).spawn(len(kinds))[j])
        report[kind] = appendix_b_check(args.n, args.realizations, rng, kind)
        rep = report[kind]
        print(f"{kind}: Var(Sigma_m) = {rep['sigma_m_var']:.4e} (pred {rep['sigma_m_var_predicted']:.4e}), "
              f"Var(C) = {rep['coeff_var']:.4e} (pred {rep['coeff_var_predicted']:.4e})")
    print(write_json(args.output / "appendix_b.json", report))
    return EXIT_OK


def _cmd_refs(args):
    from .pipeline import write_references

    for path in write_references(args.output / "references", args.n).values():
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command == "run":
            return _cmd_run(args)
        if args.command in SUBCOMMAND_OBSERVABLES:
            return _cmd_run(args, SUBCOMMAND_OBSERVABLES[args.command])
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        if args.command == "appendix-b-check":
            return _cmd_appendix(args)
        return _cmd_refs(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractViolation as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
