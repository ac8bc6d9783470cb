"""Command-line harness: simulate | decode | oracle | bench.

Exit codes: 0 success, 2 invalid arguments, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .code import LABEL_ORDER, Syndrome, build_code
from .cosetnet import coset_prob_exact
from .decoders import DecoderParams, decode_blockbp, decode_bmps, decode_exact, pure_error
from .harness import ExperimentConfig, bench_scaling, run_experiment, write_results
from .noise import depolarizing

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


def _add_decoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--block-size", type=int, default=2, help="block size k")
    p.add_argument("--chi", type=int, default=16, help="MPS bond cap (0 = exact)")
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--delta0", type=float, default=1e-4, help="BP stop threshold")
    p.add_argument("--delta1", type=float, default=1e-2, help="estimate trust threshold")
    p.add_argument("--damping", type=float, default=0.1)
    p.add_argument(
        "--mode",
        choices=["auto", "mps-messages", "fused", "coarse-then-block"],
        default="auto",
        help="contraction variant; 'auto' picks by block size",
    )


def _params(args) -> DecoderParams:
    overrides = dict(
        chi=args.chi,
        max_iter=args.max_iter,
        delta0=args.delta0,
        delta1=args.delta1,
        damping=args.damping,
    )
    if args.mode != "auto":
        overrides["mode"] = args.mode
    return DecoderParams.for_block_size(args.block_size, **overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockbp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte-Carlo logical error rate")
    sim.add_argument("--decoder", choices=["blockbp", "bmps", "exact"], required=True)
    sim.add_argument("--d", type=int, required=True)
    sim.add_argument("--epsilon", type=float, required=True)
    _add_decoder_flags(sim)
    sim.add_argument("--shots", type=int, default=30_000)
    sim.add_argument("--max-failures", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--threads", type=int, default=1)
    sim.add_argument("--out", required=True, help="CSV path (appends)")

    dec = sub.add_parser("decode", help="decode one syndrome")
    dec.add_argument("--d", type=int, required=True)
    dec.add_argument("--epsilon", type=float, required=True)
    dec.add_argument("--syndrome", required=True, help="hex string, LSB-first bytes")
    dec.add_argument("--decoder", choices=["blockbp", "bmps", "exact"], default="blockbp")
    _add_decoder_flags(dec)

    orc = sub.add_parser("oracle", help="exact coset probabilities (small d)")
    orc.add_argument("--d", type=int, required=True)
    orc.add_argument("--epsilon", type=float, required=True)
    orc.add_argument("--syndrome", required=True, help="hex string, LSB-first bytes")

    ben = sub.add_parser("bench", help="decode-time scaling table")
    ben.add_argument("--d-list", type=int, nargs="+", required=True)
    ben.add_argument("--k-list", type=int, nargs="+", required=True)
    ben.add_argument("--chi-list", type=int, nargs="+", required=True)
    ben.add_argument("--reps", type=int, required=True)
    ben.add_argument("--epsilon", type=float, default=0.1)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--out", required=True, help="CSV path")
    return parser


def _cmd_simulate(args) -> int:
    cfg = ExperimentConfig(
        decoder=args.decoder,
        d=args.d,
        epsilon=args.epsilon,
        params=_params(args),
        shots=args.shots,
        max_failures=args.max_failures,
        seed=args.seed,
        threads=args.threads,
        out_path=args.out,
    )
    stats = run_experiment(cfg)
    try:
        write_results([stats], args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(
        f"decoder={args.decoder} d={args.d} epsilon={args.epsilon} "
        f"shots={stats.shots} failures={stats.failures} "
        f"p_l={stats.p_hat:.6g} stderr={stats.stderr:.3g}"
    )
    return EXIT_OK


def _parse_syndrome(args, code) -> Syndrome:
    return Syndrome.from_hex(args.syndrome, code.m)


def _cmd_decode(args) -> int:
    code = build_code(args.d)
    model = depolarizing(args.epsilon, code.n)
    s = _parse_syndrome(args, code)
    if args.decoder == "blockbp":
        result = decode_blockbp(code, model, s, _params(args))
    elif args.decoder == "bmps":
        result = decode_bmps(code, model, s, args.chi)
    else:
        result = decode_exact(code, model, s)
    print(f"chosen: {result.chosen.value}")
    print(f"fallback_used: {result.fallback_used}")
    for est in result.estimates:
        log_prob = (
            f"{est.log_prob.sign * est.log_prob.log_mag:+.12g}"
            if est.log_prob is not None and est.log_prob.sign != 0
            else ("zero" if est.log_prob is not None else "untrusted")
        )
        print(
            f"coset {est.label.value}: log_prob={log_prob} "
            f"delta={est.final_delta:.3g} rounds={est.rounds} trusted={est.trusted}"
        )
    return EXIT_OK


def _cmd_oracle(args) -> int:
    code = build_code(args.d)
    model = depolarizing(args.epsilon, code.n)
    s = _parse_syndrome(args, code)
    f = pure_error(code, s)
    for label in LABEL_ORDER:
        value = coset_prob_exact(code, model, f, label)
        print(f"coset {label.value}: prob={float(value):.17g}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    rows = bench_scaling(
        args.d_list, args.k_list, args.chi_list, args.reps,
        epsilon=args.epsilon, seed=args.seed,
    )
    fields = ["d", "k", "chi", "mode", "reps", "serial_s", "parallel_s", "mean_rounds", "per_round_s"]
    try:
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "decode":
            return _cmd_decode(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        return _cmd_bench(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
