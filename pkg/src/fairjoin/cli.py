from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .benchmarks import BENCHMARKS
from .harness import HarnessConfig, RunEvent, render_plot, run_sweep, write_csv
from .matchers import AlgorithmId

DEFAULT_ALGORITHMS = "stateful, while-lazy"

# command-line flag -> benchmark config field
BENCH_OPTIONS = {
    "matches": "matches",
    "noise": "noise",
    "variant": "variant",
    "heavy_guard": "heavy_guard",
    "heavy_guard_us": "heavy_guard_us",
    "bufferBound": "buffer_bound",
    "count": "count",
    "workers": "workers",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairjoin", description="Fair join-pattern matching benchmarks and examples.")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a benchmark sweep")
    bench.add_argument("benchmark", help=f"one of: {', '.join(BENCHMARKS)}")
    bench.add_argument("--min-param", type=int)
    bench.add_argument("--max-param", type=int)
    bench.add_argument("--param-step", type=int, default=1)
    bench.add_argument("--repetitions", type=int, default=1)
    bench.add_argument("--warmup", type=int, default=0)
    bench.add_argument("--algorithms", default=DEFAULT_ALGORITHMS, help='comma-separated, e.g. "stateful, while-lazy"')
    bench.add_argument("--smoothen", action="store_true", help="run every parameter once per repetition round")
    bench.add_argument("--seed", type=int, default=42)
    bench.add_argument("--out", type=Path, default=Path("results"))
    bench.add_argument("--no-plot", action="store_true")
    bench.add_argument("--quiet", action="store_true")
    bench.add_argument("--matches", type=int)
    bench.add_argument("--noise", action="store_const", const=True)
    bench.add_argument("--variant", choices=("normal", "noisy", "non-satisfying"))
    bench.add_argument("--heavy-guard", dest="heavy_guard", action="store_const", const=True)
    bench.add_argument("--heavy-guard-us", dest="heavy_guard_us", type=float)
    bench.add_argument("--bufferBound", type=int)
    bench.add_argument("--count", type=int)
    bench.add_argument("--workers", type=int)

    example = sub.add_parser("example", help="run a demonstration")
    example.add_argument("name", choices=("payment",))
    example.add_argument("--requests", type=int, default=3)
    example.add_argument("--flow", choices=("token", "payment", "both"), default="both")
    example.add_argument("--algorithm", default=AlgorithmId.WHILE_LAZY.value)
    example.add_argument("--seed", type=int, default=42)
    return parser


def _bench(args, parser: argparse.ArgumentParser) -> int:
    factory = BENCHMARKS.get(args.benchmark)
    if factory is None:
        parser.error(f"unknown benchmark {args.benchmark!r}; valid names: {', '.join(BENCHMARKS)}")
    try:
        algorithms = [AlgorithmId.parse(a) for a in args.algorithms.split(",") if a.strip()]
    except ValueError as exc:
        parser.error(str(exc))
    options = {field: getattr(args, flag) for flag, field in BENCH_OPTIONS.items() if getattr(args, flag) is not None}
    try:
        config = HarnessConfig(
            benchmark=args.benchmark,
            min_param=factory.default_min if args.min_param is None else args.min_param,
            max_param=factory.default_max if args.max_param is None else args.max_param,
            param_step=args.param_step,
            repetitions=args.repetitions,
            warmup=args.warmup,
            algorithms=algorithms,
            smoothen=args.smoothen,
            seed=args.seed,
            options=options,
            out_dir=args.out,
        )
        config.benchmark_config()
    except ValueError as exc:
        parser.error(str(exc))

    def report(ev: RunEvent) -> None:
        if args.quiet:
            return
        what = "warmup" if ev.repetition is None else f"rep {ev.repetition + 1}"
        print(f"{ev.algorithm.value:>18}  param {ev.param:>4}  {what:>7}  {ev.elapsed_ms:10.3f} ms", flush=True)

    table = run_sweep(config, on_run=report)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(table, args.out / f"{args.benchmark}.csv")
    print(f"wrote {csv_path}")
    if not args.no_plot:
        svg_path = render_plot(table, args.out / f"{args.benchmark}.svg", title=args.benchmark, xlabel=factory.param_name)
        print(f"wrote {svg_path}")
    return 0


def _example(args, parser: argparse.ArgumentParser) -> int:
    from .payment import PaymentSystem

    if args.requests < 0:
        parser.error("--requests must be >= 0")
    try:
        algorithm = AlgorithmId.parse(args.algorithm)
    except ValueError as exc:
        parser.error(str(exc))
    with PaymentSystem(algorithm=algorithm, seed=args.seed) as system:
        tokens = system.request_tokens(args.requests) if args.flow in ("token", "both") else []
        payments = system.request_payments(args.requests) if args.flow in ("payment", "both") else []
    for line in system.transcript:
        print(line)
    print(f"{len(tokens)} tokens generated, {len(payments)} payments succeeded")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench":
        return _bench(args, parser)
    return _example(args, parser)


if __name__ == "__main__":
    sys.exit(main())
