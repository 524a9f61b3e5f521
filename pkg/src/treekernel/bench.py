"""All-pairs benchmark over synthetic datasets.

For every config the ST automata (or series, for the oracle) of the trees
are prepared once; then every unordered pair of distinct trees is
evaluated. Timing uses ``time.perf_counter``: one untimed warm-up pass,
then three timed passes; each pair contributes the median of its three
timings and the reported figure is the mean over pairs.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import statistics
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .datagen import DatasetConfig, generate_language, read_dataset
from .kernel import Algorithm, hadamard_accessible, moschitti_kernel
from .st_automaton import StAutomaton
from .trees import TreeLanguage, subtree_series

log = logging.getLogger(__name__)

CSV_FIELDS = (
    "config_id",
    "algorithm",
    "pair_count",
    "avg_time_s",
    "avg_product_states",
    "avg_automaton_states",
    "avg_tree_size",
    "reduction_ratio",
    "checksum",
)
SCALING_FIELDS = ("config_id", "algorithm", "pair_size_bucket", "pair_count", "avg_time_s")
TIMED_PASSES = 3


@dataclass
class BenchRecord:
    config_id: str
    algorithm: str
    pair_count: int
    avg_time_s: float
    avg_product_states: float
    avg_automaton_states: float
    avg_tree_size: float
    reduction_ratio: float
    checksum: str

    def row(self) -> dict:
        return asdict(self)


@dataclass
class BenchResult:
    records: list[BenchRecord]
    # (config_id, algorithm, bucket, pair_count, avg_time_s)
    scaling: list[tuple]


def checksum(values: Iterable[int]) -> str:
    h = hashlib.sha256()
    for v in values:
        h.update(str(v).encode())
        h.update(b"\n")
    return h.hexdigest()[:16]


def _kernel_fn(language: TreeLanguage, algorithm: Algorithm, automata) -> Callable[[int, int], int]:
    if algorithm is Algorithm.AUTOMATA:
        return lambda i, j: hadamard_accessible(automata[i], automata[j]).kernel_value
    if algorithm is Algorithm.ORACLE:
        series = [subtree_series(t) for t in language]
        return lambda i, j: series[i].dot(series[j])
    trees = language.trees
    return lambda i, j: moschitti_kernel(trees[i], trees[j])


def _timed_pass(kernel, pairs, threads: int) -> tuple[list[int], list[float]]:
    clock = time.perf_counter

    def one(pair):
        t0 = clock()
        v = kernel(*pair)
        return v, clock() - t0

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(one, pairs, chunksize=64))
    else:
        out = [one(p) for p in pairs]
    return [v for v, _ in out], [dt for _, dt in out]


def bench_language(
    config_id: str,
    language: TreeLanguage,
    algorithms: Sequence[Algorithm | str],
    threads: int = 1,
    passes: int = TIMED_PASSES,
) -> BenchResult:
    algorithms = [Algorithm.coerce(a) for a in algorithms]
    n = len(language)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    automata = [StAutomaton.from_tree(t, language.mode) for t in language]
    sizes = [t.size for t in language]
    avg_size = sum(sizes) / n
    avg_states = sum(len(a) for a in automata) / n
    product_states = [len(hadamard_accessible(automata[i], automata[j]).matched_states) for i, j in pairs]
    avg_product = sum(product_states) / len(pairs) if pairs else 0.0

    records = []
    scaling = []
    for algorithm in algorithms:
        kernel = _kernel_fn(language, algorithm, automata)
        values, _ = _timed_pass(kernel, pairs, threads)  # warm-up
        runs = [_timed_pass(kernel, pairs, threads)[1] for _ in range(passes)]
        per_pair = [statistics.median(ts) for ts in zip(*runs)] if pairs else []
        avg_time = sum(per_pair) / len(per_pair) if per_pair else 0.0
        records.append(
            BenchRecord(
                config_id=config_id,
                algorithm=algorithm.value,
                pair_count=len(pairs),
                avg_time_s=avg_time,
                avg_product_states=avg_product,
                avg_automaton_states=avg_states,
                avg_tree_size=avg_size,
                reduction_ratio=avg_states / avg_size,
                checksum=checksum(values),
            )
        )
        buckets: dict[int, list[float]] = {}
        for (i, j), dt in zip(pairs, per_pair):
            buckets.setdefault((sizes[i] + sizes[j]).bit_length(), []).append(dt)
        for b in sorted(buckets):
            ts = buckets[b]
            scaling.append((config_id, algorithm.value, 2 ** (b - 1), len(ts), sum(ts) / len(ts)))
        log.info("%s %s: %d pairs, %.3g s/pair", config_id, algorithm.value, len(pairs), avg_time)
    return BenchResult(records, scaling)


def _fmt(value) -> str:
    return f"{value:.6g}" if isinstance(value, float) else str(value)


class CsvSink:
    """Writes rows as they arrive so partial results survive a failure."""

    def __init__(self, path, header: Sequence[str]):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(header)
        self._fh.flush()

    def write(self, row: Sequence) -> None:
        self._writer.writerow([_fmt(v) for v in row])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def scaling_path(out_csv) -> Path:
    p = Path(out_csv)
    return p.with_name(p.stem + ".scaling.csv")


def run_bench(
    datasets: Iterable[tuple[str, TreeLanguage]],
    algorithms: Sequence[Algorithm | str],
    out_csv=None,
    threads: int = 1,
    passes: int = TIMED_PASSES,
) -> list[BenchRecord]:
    sink = CsvSink(out_csv, CSV_FIELDS) if out_csv else None
    ssink = CsvSink(scaling_path(out_csv), SCALING_FIELDS) if out_csv else None
    records: list[BenchRecord] = []
    try:
        for config_id, language in datasets:
            result = bench_language(config_id, language, algorithms, threads, passes)
            records.extend(result.records)
            if sink:
                for r in result.records:
                    sink.write([getattr(r, f.name) for f in fields(r)])
                for row in result.scaling:
                    ssink.write(row)
    finally:
        if sink:
            sink.close()
            ssink.close()
    return records


def configs_as_datasets(configs: Iterable[DatasetConfig]):
    for cfg in configs:
        yield cfg.config_id, generate_language(cfg)


def directory_as_datasets(paths: Iterable[Path]):
    for path in paths:
        cfg, language = read_dataset(path)
        yield (cfg.config_id if cfg is not None else path.stem), language
