"""Command-line front end.

Subcommands: sumlif-vs-n, sumlif-vs-nf, rate-vs-snr, rate-vs-n, props,
make-codebook.  Flags override config-file values, which override the
per-experiment defaults (the defaults mirror the reference figure setups).

Exit codes: 0 success, 1 invalid config, 2 property-suite failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import streams
from .codebook import build_codebook, save_codebook
from .harness import (
    RECEIVERS,
    SCHEMES,
    ConfigError,
    RunConfig,
    run_property_suite,
    run_rate_vs_n,
    run_rate_vs_snr,
    run_sumlif_vs_n,
    run_sumlif_vs_nf,
)
from .harness import parse_config_file

_EXPERIMENT_DEFAULTS = {
    "sumlif-vs-n": dict(
        K=2, M=3, L=2, S=2, n_grid=(25, 50, 100, 200, 400), nf_series=(4, 8),
        schemes=("svd_oia", "gc_oia", "rc_oia", "max_snr"), trials=500,
        out="sumlif_vs_n.csv",
    ),
    "sumlif-vs-nf": dict(
        K=2, M=3, N=100, L=2, S=2, nf_grid=tuple(range(1, 11)),
        schemes=("svd_oia", "gc_oia", "rc_oia"), trials=500,
        out="sumlif_vs_nf.csv",
    ),
    "rate-vs-snr": dict(
        K=2, M=3, N=20, L=2, S=2, n_f=6, snr_grid=(0.0, 10.0, 20.0, 30.0, 40.0),
        schemes=("gc_oia", "rc_oia", "svd_oia", "max_snr"),
        receivers=("zf", "med_gmi", "capacity"), trials=1000,
        out="rate_vs_snr.csv",
    ),
    "rate-vs-n": dict(
        K=2, M=3, L=2, S=2, n_f=6, snr_db=20.0, n_grid=(20, 50, 125, 320, 800),
        schemes=("rc_oia",), receivers=("zf", "med_gmi", "capacity"), trials=500,
        out="rate_vs_n.csv",
    ),
}

_RUNNERS = {
    "sumlif-vs-n": run_sumlif_vs_n,
    "sumlif-vs-nf": run_sumlif_vs_nf,
    "rate-vs-snr": run_rate_vs_snr,
    "rate-vs-n": run_rate_vs_n,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _float_list(text: str):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _str_list(text: str):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--seed", type=int, help="master seed (64-bit)")
    p.add_argument("--trials", type=int, help="Monte Carlo repetitions")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--summary", action="store_true", default=None,
                   help="also write <out>.summary.csv with per-point means")
    p.add_argument("--k", dest="K", type=int, help="cells")
    p.add_argument("--m", dest="M", type=int, help="BS antennas")
    p.add_argument("--n", dest="N", type=int, help="users per cell")
    p.add_argument("--l", dest="L", type=int, help="user antennas")
    p.add_argument("--s", dest="S", type=int, help="selected users per cell")
    p.add_argument("--nf", dest="n_f", type=int, help="feedforward bits")
    p.add_argument("--snr", dest="snr_db", type=float, help="fixed SNR in dB")
    p.add_argument("--schemes", type=_str_list, help=f"comma list of {SCHEMES}")
    p.add_argument("--receivers", type=_str_list, help=f"comma list of {RECEIVERS}")
    p.add_argument("--n-grid", dest="n_grid", type=_int_list, help="N sweep grid")
    p.add_argument("--nf-grid", dest="nf_grid", type=_int_list, help="n_f sweep grid")
    p.add_argument("--snr-grid", dest="snr_grid", type=_float_list, help="SNR sweep grid (dB)")
    p.add_argument("--nf-series", dest="nf_series", type=_int_list,
                   help="n_f values plotted as separate curves (sumlif-vs-n)")
    p.add_argument("--codebook-dir", dest="codebook_dir", help="cache directory for codebooks")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oiasim", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, parents=[], help=f"run the {name} experiment")
        _add_common(p)
    p = sub.add_parser("props", help="run the invariant property suite")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--seed", type=int, help="suite seed (default 42)")
    p = sub.add_parser("make-codebook", help="build a codebook and write it to a file")
    p.add_argument("--kind", choices=("random", "grassmannian"), required=True)
    p.add_argument("--l", dest="L", type=int, required=True, help="vector dimension")
    p.add_argument("--nf", dest="n_f", type=int, required=True, help="bits, size 2**nf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--restarts", type=int, default=6)
    p.add_argument("--iters", type=int, default=400)
    return parser


def _merged_config(args) -> RunConfig:
    merged = dict(_EXPERIMENT_DEFAULTS[args.command])
    if args.config:
        merged.update(parse_config_file(args.config))
    for key in (
        "K", "M", "N", "L", "S", "n_f", "snr_db", "seed", "trials", "workers",
        "out", "summary", "schemes", "receivers", "n_grid", "nf_grid",
        "snr_grid", "nf_series", "codebook_dir",
    ):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    try:
        return RunConfig(**merged)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def _cmd_experiment(args) -> int:
    config = _merged_config(args)
    records = _RUNNERS[args.command](config)
    print(f"{args.command}: wrote {len(records)} rows to {config.out}")
    return 0


def _cmd_props(args) -> int:
    seed = args.seed if args.seed is not None else 42
    if args.config:
        seed = parse_config_file(args.config).get("seed", seed)
    results = run_property_suite(RunConfig(seed=seed))
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        failed += 0 if res.passed else 1
        print(f"[{tag}] {res.name}: {res.detail}")
    if failed:
        print(f"{failed}/{len(results)} property checks failed")
        return 2
    print(f"all {len(results)} property checks passed")
    return 0


def _cmd_make_codebook(args) -> int:
    rng = streams.substream(args.seed, streams.CODEBOOK, 0 if args.kind == "random" else 1, args.n_f)
    cb = build_codebook(
        args.kind, args.L, args.n_f, rng, seed_tag=args.seed,
        restarts=args.restarts, iters=args.iters,
    )
    save_codebook(cb, args.out)
    print(f"wrote {cb.kind} codebook (L={cb.dim}, N_f={cb.size}, "
          f"min chordal^2 {cb.min_chordal_sq:.6f}) to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "props":
            return _cmd_props(args)
        if args.command == "make-codebook":
            return _cmd_make_codebook(args)
        return _cmd_experiment(args)
    except ConfigError as e:
        print(f"error: invalid config: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
