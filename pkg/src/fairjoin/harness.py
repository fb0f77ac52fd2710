"""Parameter sweeps over benchmarks, with CSV and SVG output."""

from __future__ import annotations

import csv
import dataclasses
import statistics
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .benchmarks import BenchmarkFactory, get_benchmark
from .matchers import AlgorithmId

__all__ = [
    "HarnessConfig",
    "ResultsTable",
    "RunEvent",
    "read_csv",
    "render_plot",
    "run_sweep",
    "time_run",
    "write_csv",
]


@dataclass
class HarnessConfig:
    benchmark: str
    min_param: int
    max_param: int
    param_step: int = 1
    repetitions: int = 1
    warmup: int = 0
    algorithms: Sequence[AlgorithmId | str] = (AlgorithmId.WHILE_LAZY,)
    smoothen: bool = False
    seed: int = 42
    options: dict[str, Any] = field(default_factory=dict)
    out_dir: Path | None = None

    def __post_init__(self) -> None:
        self.factory: BenchmarkFactory = get_benchmark(self.benchmark)
        self.algorithms = tuple(AlgorithmId.parse(a) for a in self.algorithms)
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if self.min_param > self.max_param:
            raise ValueError(f"min_param {self.min_param} exceeds max_param {self.max_param}")
        if self.param_step < 1:
            raise ValueError("param_step must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        known = {f.name for f in dataclasses.fields(self.factory.config_type)}
        unknown = sorted(set(self.options) - known)
        if unknown:
            raise ValueError(f"{self.benchmark} has no option(s) {', '.join(unknown)}; known: {', '.join(sorted(known))}")

    @property
    def params(self) -> list[int]:
        return list(range(self.min_param, self.max_param + 1, self.param_step))

    def benchmark_config(self):
        return self.factory.config_type(seed=self.seed, **self.options)


@dataclass
class ResultsTable:
    """Repetition wall times in milliseconds per (algorithm, parameter)."""

    params: list[int]
    algorithms: list[AlgorithmId]
    repetitions: int
    times: dict[tuple[AlgorithmId, int], list[float]] = field(default_factory=dict)

    def add(self, algorithm: AlgorithmId, param: int, ms: float) -> None:
        self.times.setdefault((algorithm, param), []).append(ms)

    def cell(self, algorithm: AlgorithmId, param: int) -> list[float]:
        return self.times.get((algorithm, param), [])

    def average(self, algorithm: AlgorithmId, param: int) -> float:
        return statistics.fmean(self.cell(algorithm, param))

    def stddev(self, algorithm: AlgorithmId, param: int) -> float:
        """Sample standard deviation; 0 with a single repetition."""
        values = self.cell(algorithm, param)
        return statistics.stdev(values) if len(values) > 1 else 0.0

    def series(self, algorithm: AlgorithmId) -> tuple[list[int], list[float], list[float]]:
        xs = [p for p in self.params if self.cell(algorithm, p)]
        return xs, [self.average(algorithm, p) for p in xs], [self.stddev(algorithm, p) for p in xs]


@dataclass(frozen=True)
class RunEvent:
    algorithm: AlgorithmId
    param: int
    repetition: int | None  # None for warmup runs
    elapsed_ms: float
    result: Any


def time_run(bench, param: int) -> tuple[float, Any]:
    """Prepare untimed, then time only ``run``; returns (milliseconds, run result)."""
    prereqs = bench.prepare(param)
    start = time.perf_counter_ns()
    result = bench.run(prereqs)
    elapsed = time.perf_counter_ns() - start
    return elapsed / 1e6, result


def run_sweep(config: HarnessConfig, on_run: Callable[[RunEvent], None] | None = None) -> ResultsTable:
    """Warmup at ``max_param``, then timed repetitions for every algorithm.

    Default order is algorithm, parameter, repetition; with ``smoothen`` it
    is algorithm, repetition, parameter, which spreads transient slowdowns
    over all parameter values instead of one.
    """
    params = config.params
    table = ResultsTable(params, list(config.algorithms), config.repetitions)
    for alg in config.algorithms:
        bench = config.factory(alg, config.benchmark_config())
        for _ in range(config.warmup):
            ms, result = time_run(bench, config.max_param)
            if on_run:
                on_run(RunEvent(alg, config.max_param, None, ms, result))
        if config.smoothen:
            order = [(p, r) for r in range(config.repetitions) for p in params]
        else:
            order = [(p, r) for p in params for r in range(config.repetitions)]
        for p, r in order:
            ms, result = time_run(bench, p)
            table.add(alg, p, ms)
            if on_run:
                on_run(RunEvent(alg, p, r, ms, result))
    return table


def _header(algorithms: Sequence[AlgorithmId], repetitions: int) -> list[str]:
    header = ["param"]
    for alg in algorithms:
        header += [f"{alg.value} rep{r + 1}" for r in range(repetitions)]
        header += [f"{alg.value} avg", f"{alg.value} std"]
    return header


def write_csv(table: ResultsTable, path: str | Path) -> Path:
    """One row per parameter: the parameter, then per algorithm its repetitions, average and stddev."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(table.algorithms, table.repetitions))
        for p in table.params:
            if not any(table.cell(a, p) for a in table.algorithms):
                continue
            row = [str(p)]
            for alg in table.algorithms:
                row += [f"{ms:.3f}" for ms in table.cell(alg, p)]
                row += [f"{table.average(alg, p):.3f}", f"{table.stddev(alg, p):.3f}"]
            writer.writerow(row)
    return path


@dataclass
class ParsedResults:
    table: ResultsTable
    averages: dict[tuple[AlgorithmId, int], float]
    stddevs: dict[tuple[AlgorithmId, int], float]


def read_csv(path: str | Path) -> ParsedResults:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    algorithms: list[AlgorithmId] = []
    for name in header[1:]:
        alg = AlgorithmId.parse(name.rsplit(" ", 1)[0])
        if alg not in algorithms:
            algorithms.append(alg)
    repetitions = (len(header) - 1) // len(algorithms) - 2 if algorithms else 0
    params = [int(row[0]) for row in body]
    table = ResultsTable(params, algorithms, repetitions)
    averages, stddevs = {}, {}
    width = repetitions + 2
    for row, p in zip(body, params):
        for k, alg in enumerate(algorithms):
            group = [float(v) for v in row[1 + k * width : 1 + (k + 1) * width]]
            for ms in group[:repetitions]:
                table.add(alg, p, ms)
            averages[alg, p] = group[repetitions]
            stddevs[alg, p] = group[repetitions + 1]
    return ParsedResults(table, averages, stddevs)


def render_plot(table: ResultsTable, path: str | Path, *, title: str = "", xlabel: str = "main parameter") -> Path:
    """Line chart of average time per parameter, one series per algorithm, as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with matplotlib.rc_context({"svg.fonttype": "none", "svg.hashsalt": "fairjoin"}):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for alg in table.algorithms:
            xs, ys, errs = table.series(alg)
            bars = ax.errorbar(xs, ys, yerr=errs, marker="o", markersize=3, capsize=3, label=alg.value)
            bars.lines[0].set_gid(alg.value)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("average time (ms)")
        if title:
            ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg")
        plt.close(fig)
    return path
