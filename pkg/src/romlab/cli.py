"""Command line entry point: ``romlab <subcommand> ...``.

Exit codes: 0 success, 1 computation failure, 2 usage or argument error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ArgumentError
from .experiments import (
    ExperimentManifest,
    atomic_write,
    csv_text,
    emit_summary,
    json_text,
    load_reports,
    parse_float,
    parse_int,
    parse_list,
    run_experiment,
)
from .lacunary import LacunaryParams, generate
from .primes import count_primes_in, count_primes_in_ap, primes_between
from .romanoff import (
    RomanoffConvention,
    admissible_shift_set,
    build_modulus,
    enumerate_representable_odds,
    gap_statistics,
    hunt_large_multiplicity,
    positive_proportion_scan,
)
from .singular import average_over_differences, pair_count_vs_prediction, singular_series
from .windows import CSV_COLUMNS, ScanConfig, iter_scan, prime_window_deviation


def _print_json(obj) -> None:
    sys.stdout.write(json_text(obj))


def _params(args) -> LacunaryParams:
    return LacunaryParams.from_r(parse_list(args.r), args.lam)


def cmd_sieve(args):
    with open(args.out, "w") as fh:
        for ps in primes_between(args.lo, args.hi):
            fh.writelines(f"{p}\n" for p in ps.tolist())


def cmd_pi(args):
    if args.mod is None:
        print(count_primes_in(0, args.x))
    else:
        print(count_primes_in_ap(0, args.x, args.mod, args.res))


def cmd_lacunary(args):
    lset = generate(_params(args), args.X)
    header = {**lset.params.describe(), "X": lset.X, "count": len(lset)}
    body = "# " + json.dumps(header, sort_keys=True) + "\n" + "".join(f"{v}\n" for v in lset.values)
    if args.out:
        atomic_write(Path(args.out), body)
    else:
        sys.stdout.write(body)


def cmd_scan(args):
    config = ScanConfig(args.X, args.theta, args.samples, args.seed)
    lset = generate(_params(args), args.X)
    rows = [r.row() for r in iter_scan(config, lset, args.workers)]
    atomic_write(Path(args.out), csv_text("scan", CSV_COLUMNS, rows))


def cmd_prime_dev(args):
    _print_json(prime_window_deviation(args.X, args.y, args.samples, args.seed).as_dict())


def cmd_singular(args):
    v = singular_series(args.delta)
    _print_json({"delta": v.delta, "value": v.value})


def cmd_singular_avg(args):
    _print_json(average_over_differences(generate(_params(args), args.X)).as_dict())


def cmd_pairs(args):
    res = pair_count_vs_prediction(args.y, args.h, args.delta)
    _print_json({"count": res.count, "prediction": res.prediction, "ratio": res.ratio})


def _modulus(args):
    return build_modulus(args.prime_bound, [parse_int(t) for t in parse_list(args.exclude)])


def cmd_hunt(args):
    d = _modulus(args)
    res = hunt_large_multiplicity(args.X, args.window, d, RomanoffConvention(args.k_min))
    _print_json({"d": d.d, "ratio": d.ratio, **res.as_dict()})


def cmd_proportion(args):
    d = _modulus(args)
    thr = args.threshold if args.threshold == "auto" else parse_int(args.threshold)
    res = positive_proportion_scan(
        args.X, args.theta, d, thr, args.samples, args.seed, RomanoffConvention(args.k_min)
    )
    _print_json({"d": d.d, **res.as_dict()})


def cmd_gaps(args):
    seq = enumerate_representable_odds(args.limit, RomanoffConvention(args.k_min))
    gs = gap_statistics(seq)
    rows = ((m, s, g, f"{v:.12g}") for m, s, g, v in gs.rows(seq))
    atomic_write(Path(args.out), csv_text("gaps", ("m", "s_m", "gap", "normalized"), rows))
    _print_json({"representable": len(seq), "max_gap": gs.max_gap, "max_gap_at": gs.argmax,
                 "non_representable": int(seq.non_representable.size)})


def cmd_admissible(args):
    _print_json(admissible_shift_set(args.r, args.count).as_dict())


def cmd_run(args):
    report = run_experiment(ExperimentManifest.load(args.manifest), args.out)
    text, _ = emit_summary([report])
    sys.stdout.write(text)


def cmd_summarize(args):
    text, twin = emit_summary(load_reports(args.dir))
    sys.stdout.write(text)
    atomic_write(Path(args.dir) / "summary.json", json_text(twin))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="romlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        return p

    def lacunary_args(p):
        p.add_argument("--r", required=True, help="comma-separated exponents, e.g. 2,2 or 3/2,3")
        p.add_argument("--lambda", dest="lam", default="auto")

    p = add("sieve", cmd_sieve, "write the primes in (lo, hi], one per line")
    p.add_argument("--lo", type=parse_int, required=True)
    p.add_argument("--hi", type=parse_int, required=True)
    p.add_argument("--out", required=True)

    p = add("pi", cmd_pi, "count primes <= x, optionally in a residue class")
    p.add_argument("--x", type=parse_int, required=True)
    p.add_argument("--mod", type=parse_int)
    p.add_argument("--res", type=parse_int, default=1)

    p = add("lacunary", cmd_lacunary, "list the lacunary set truncated to [1, 2X]")
    lacunary_args(p)
    p.add_argument("--X", type=parse_int, required=True)
    p.add_argument("--out")

    p = add("scan", cmd_scan, "window statistics R, Q, S at sampled x")
    lacunary_args(p)
    p.add_argument("--X", type=parse_int, required=True)
    p.add_argument("--theta", type=parse_float, required=True)
    p.add_argument("--samples", type=parse_int, required=True)
    p.add_argument("--seed", type=parse_int, required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True)

    p = add("prime-dev", cmd_prime_dev, "relative deviation of short-interval prime counts")
    p.add_argument("--X", type=parse_int, required=True)
    p.add_argument("--y", type=parse_int, required=True)
    p.add_argument("--samples", type=parse_int, required=True)
    p.add_argument("--seed", type=parse_int, default=0)

    p = add("singular", cmd_singular, "prime-pair singular series at one shift")
    p.add_argument("--delta", type=parse_int, required=True)

    p = add("singular-avg", cmd_singular_avg, "singular series summed over set differences")
    lacunary_args(p)
    p.add_argument("--X", type=parse_int, required=True)

    p = add("pairs", cmd_pairs, "prime pairs (m, m+delta) in (y, y+h] against the sieve shape")
    p.add_argument("--y", type=parse_int, required=True)
    p.add_argument("--h", type=parse_int, required=True)
    p.add_argument("--delta", type=parse_int, required=True)

    def modulus_args(p):
        p.add_argument("--prime-bound", type=parse_float, required=True)
        p.add_argument("--exclude", default="", help="comma-separated primes left out of d")
        p.add_argument("--k-min", type=int, default=1, choices=(0, 1))

    p = add("hunt", cmd_hunt, "largest f_Rom among multiples of d in (X, X+window]")
    p.add_argument("--X", type=parse_int, required=True)
    p.add_argument("--window", type=parse_int, required=True)
    modulus_args(p)

    p = add("proportion", cmd_proportion, "fraction of windows holding a large multiplicity")
    p.add_argument("--X", type=parse_int, required=True)
    p.add_argument("--theta", type=parse_float, required=True)
    p.add_argument("--threshold", required=True, help="integer or 'auto' (ceil of twice the mean)")
    p.add_argument("--samples", type=parse_int, required=True)
    p.add_argument("--seed", type=parse_int, required=True)
    modulus_args(p)

    p = add("gaps", cmd_gaps, "gaps between odd numbers of the form p + 2^k")
    p.add_argument("--limit", type=parse_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k-min", type=int, default=1, choices=(0, 1))

    p = add("admissible", cmd_admissible, "admissible shift sets -2^(jL)")
    p.add_argument("--r", type=parse_int, required=True)
    p.add_argument("--count", type=parse_int, required=True)

    p = add("run", cmd_run, "run an experiment manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", help="output directory (default: manifest 'output' or runs/<name>)")

    p = add("summarize", cmd_summarize, "tabulate every report.json below a directory")
    p.add_argument("--dir", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ArgumentError as exc:
        print(f"romlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any compute failure maps to exit 1
        print(f"romlab {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
