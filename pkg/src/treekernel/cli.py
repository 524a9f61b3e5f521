"""treekernel command line: generate | kernel | bench | gram.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench, datagen
from .errors import TreeKernelError
from .kernel import Algorithm, gram_matrix, language_kernel
from .trees import Mode, TreeLanguage, read_trees

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _algorithms(text: str) -> list[Algorithm]:
    try:
        return [Algorithm.coerce(a.strip()) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown algorithm in {text!r}; choose from automata, oracle, moschitti"
        ) from None


def _load(path, mode) -> TreeLanguage:
    return TreeLanguage(read_trees(path), mode)


def cmd_generate(args) -> int:
    mode = Mode.coerce(args.mode or Mode.UNORDERED)
    configs = datagen.expand_grid(args.grid, seed=args.seed, mode=mode, max_nodes=args.max_nodes)
    for cfg in configs:
        path = datagen.write_dataset(cfg, args.out)
        print(path)
    return EXIT_OK


def cmd_kernel(args) -> int:
    mode = Mode.coerce(args.mode or Mode.ORDERED)
    x = _load(args.file_x, mode)
    y = _load(args.file_y, mode)
    value = language_kernel(x, y, args.algorithm)
    print(value)
    if args.verify:
        others = [Algorithm.AUTOMATA, Algorithm.ORACLE]
        if len(x) == 1 and len(y) == 1:
            others.append(Algorithm.MOSCHITTI)
        results = {a.value: language_kernel(x, y, a) for a in others}
        if len(set(results.values()) | {value}) != 1:
            detail = ", ".join(f"{k}={v}" for k, v in results.items())
            print(f"verification failed: {detail}", file=sys.stderr)
            return EXIT_VERIFY
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.data:
        files = list(datagen.iter_dataset_files(args.data))
        if not files:
            raise UsageError(f"no *.trees files in {args.data}")
        datasets = bench.directory_as_datasets(files)
        if args.mode:
            mode = Mode.coerce(args.mode)
            datasets = ((cid, TreeLanguage(lang, mode)) for cid, lang in datasets)
    else:
        mode = Mode.coerce(args.mode or Mode.UNORDERED)
        configs = datagen.expand_grid(args.grid, seed=args.seed, mode=mode, max_nodes=args.max_nodes)
        datasets = bench.configs_as_datasets(configs)

    records = bench.run_bench(datasets, args.algorithm, args.out, args.threads, args.passes)
    by_config: dict[str, set[str]] = {}
    for r in records:
        by_config.setdefault(r.config_id, set()).add(r.checksum)
        print(
            f"{r.config_id:<22} {r.algorithm:<10} pairs={r.pair_count} "
            f"avg={r.avg_time_s:.3g}s states={r.avg_automaton_states:.1f} "
            f"ratio={r.reduction_ratio:.3f} checksum={r.checksum}"
        )
    bad = [cid for cid, sums in by_config.items() if len(sums) > 1]
    if bad:
        print(f"checksum mismatch across algorithms: {', '.join(bad)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_gram(args) -> int:
    mode = Mode.coerce(args.mode or Mode.ORDERED)
    if len(args.files) == 1:
        trees = read_trees(args.files[0])
        items = [TreeLanguage([t], mode) for t in trees]
        labels = [f"t{i}" for i in range(len(trees))]
    else:
        items = [_load(f, mode) for f in args.files]
        labels = [Path(f).stem for f in args.files]
    if not items:
        raise UsageError("no trees to compare")
    gram = gram_matrix(items, args.algorithm, labels, threads=args.threads)
    text = gram.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treekernel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, mode_help="ordered or unordered"):
        p.add_argument("--mode", choices=[m.value for m in Mode], help=mode_help)
        p.add_argument("--threads", type=int, default=1)

    g = sub.add_parser("generate", help="write synthetic datasets for a grid")
    g.add_argument("--grid", required=True, choices=datagen.GRIDS, type=str.upper)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--max-nodes", type=int, default=datagen.DEFAULT_MAX_NODES)
    common(g, mode_help="default: unordered")
    g.set_defaults(func=cmd_generate)

    k = sub.add_parser("kernel", help="kernel of two tree files")
    k.add_argument("file_x")
    k.add_argument("file_y")
    k.add_argument("--algorithm", type=Algorithm.coerce, default=Algorithm.AUTOMATA,
                   choices=list(Algorithm), metavar="{automata,oracle,moschitti}")
    k.add_argument("--verify", action="store_true", help="cross-check every applicable algorithm")
    common(k, mode_help="default: ordered")
    k.set_defaults(func=cmd_kernel)

    b = sub.add_parser("bench", help="all-pairs benchmark")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--grid", choices=datagen.GRIDS, type=str.upper)
    src.add_argument("--data", help="directory of *.trees dataset files")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algorithm", type=_algorithms, default=[Algorithm.AUTOMATA, Algorithm.ORACLE],
                   help="comma-separated list (default: automata,oracle)")
    b.add_argument("--out", help="CSV path; a .scaling.csv is written next to it")
    b.add_argument("--passes", type=int, default=bench.TIMED_PASSES)
    b.add_argument("--max-nodes", type=int, default=datagen.DEFAULT_MAX_NODES)
    common(b, mode_help="default: unordered for --grid, file header for --data")
    b.set_defaults(func=cmd_bench)

    m = sub.add_parser("gram", help="Gram matrix as CSV")
    m.add_argument("files", nargs="+",
                   help="one file: each tree is an item; several: each file is an item")
    m.add_argument("--algorithm", type=Algorithm.coerce, default=Algorithm.AUTOMATA,
                   choices=list(Algorithm), metavar="{automata,oracle,moschitti}")
    m.add_argument("--out")
    common(m, mode_help="default: ordered")
    m.set_defaults(func=cmd_gram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (TreeKernelError, UsageError, OSError) as exc:
        print(f"treekernel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
