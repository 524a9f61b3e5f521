"""Seeded synthetic tree languages over the DS1/DS2/DS3 parameter grids.

A tree is drawn top-down: at depth ``d < max_depth`` the arity is uniform
in ``0..max_arity`` (forced to 0 at ``d == max_depth``), then a name is
picked uniformly, then each child is drawn the same way. The root sits at
depth 1, so ``max_depth=1`` yields leaves only.

With ``max_arity >= 2`` the expected number of children exceeds one, so
unconstrained draws at large depth are astronomically large. Trees are
therefore grown breadth-first under a node cap (``max_nodes``): a node
whose children would not fit becomes a leaf. Duplicate draws are redrawn.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterator
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import ExhaustedRetriesError
from .trees import Mode, RankedAlphabet, Tree, TreeLanguage, canonicalize, read_trees, write_trees

DEFAULT_MAX_NODES = 1500
DEFAULT_RETRY_BUDGET = 10_000


@dataclass(frozen=True)
class DatasetConfig:
    alphabet_size: int
    max_arity: int
    max_depth: int
    set_cardinal: int = 100
    seed: int = 0
    mode: Mode = Mode.UNORDERED
    max_nodes: int = DEFAULT_MAX_NODES
    grid: str = ""

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be >= 1")
        if self.max_arity < 0:
            raise ValueError("max_arity must be >= 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.set_cardinal < 1:
            raise ValueError("set_cardinal must be >= 1")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")
        object.__setattr__(self, "mode", Mode.coerce(self.mode))

    @property
    def config_id(self) -> str:
        prefix = f"{self.grid}-" if self.grid else ""
        return f"{prefix}F{self.alphabet_size}-A{self.max_arity}-D{self.max_depth}"

    def names(self) -> list[str]:
        return [f"s{i}" for i in range(self.alphabet_size)]

    def alphabet(self) -> RankedAlphabet:
        return RankedAlphabet(
            (name, k) for name in self.names() for k in range(self.max_arity + 1)
        )

    def to_json(self) -> str:
        d = asdict(self)
        d["mode"] = self.mode.value
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetConfig":
        return cls(**json.loads(text))


def random_tree(
    rng: random.Random,
    names: list[str],
    max_arity: int,
    max_depth: int,
    max_nodes: int | None = None,
) -> Tree:
    """One draw, grown breadth-first.

    A node whose drawn children would push the tree past ``max_nodes``
    becomes a leaf instead, so the result never exceeds the cap.
    """
    # per node: name, depth, child indices; index 0 is the root
    names_of: list[str] = [""]
    kids_of: list[list[int]] = [[]]
    depth_of: list[int] = [1]
    head = 0
    while head < len(names_of):
        depth = depth_of[head]
        k = rng.randint(0, max_arity) if depth < max_depth else 0
        if max_nodes is not None and len(names_of) + k > max_nodes:
            k = 0
        names_of[head] = rng.choice(names)
        for _ in range(k):
            kids_of[head].append(len(names_of))
            names_of.append("")
            kids_of.append([])
            depth_of.append(depth + 1)
        head += 1
    built: list[Tree] = [None] * len(names_of)  # type: ignore[list-item]
    for i in range(len(names_of) - 1, -1, -1):
        built[i] = Tree(names_of[i], [built[c] for c in kids_of[i]])
    return built[0]


def random_tree_of_size(
    rng: random.Random, size: int, names: list[str], max_arity: int = 3
) -> Tree:
    """A random tree with exactly ``size`` nodes and arities <= ``max_arity``."""
    if size < 1:
        raise ValueError("size must be positive")
    if max_arity < 1 and size > 1:
        raise ValueError("trees larger than one node need max_arity >= 1")
    # frames: [name, child sizes still to build, built children]
    def open_frame(n: int):
        if n == 1:
            return [rng.choice(names), [], []]
        k = rng.randint(1, min(max_arity, n - 1))
        cuts = sorted(rng.sample(range(1, n - 1), k - 1)) if k > 1 else []
        bounds = [0, *cuts, n - 1]
        sizes = [b - a for a, b in zip(bounds, bounds[1:])]
        return [rng.choice(names), sizes[::-1], []]

    stack = [open_frame(size)]
    while True:
        name, todo, kids = stack[-1]
        if todo:
            stack.append(open_frame(todo.pop()))
            continue
        stack.pop()
        node = Tree(name, kids)
        if not stack:
            return node
        stack[-1][2].append(node)


def generate_language(cfg: DatasetConfig, retry_budget: int = DEFAULT_RETRY_BUDGET) -> TreeLanguage:
    """``cfg.set_cardinal`` distinct canonical trees, deterministic in ``cfg``."""
    rng = random.Random(cfg.seed)
    names = cfg.names()
    seen: set[Tree] = set()
    trees: list[Tree] = []
    failures = 0
    while len(trees) < cfg.set_cardinal:
        t = random_tree(rng, names, cfg.max_arity, cfg.max_depth, cfg.max_nodes)
        t = canonicalize(t, cfg.mode)
        if t in seen:
            failures += 1
            if failures > retry_budget:
                raise ExhaustedRetriesError(
                    f"{cfg.config_id}: only {len(trees)} of {cfg.set_cardinal} distinct "
                    f"trees after {retry_budget} rejected draws"
                )
            continue
        seen.add(t)
        trees.append(t)
    return TreeLanguage(trees, cfg.mode)


def _spaced(lo: int, hi: int, n: int) -> list[int]:
    if n == 1:
        return [lo]
    return [int(round(lo + (hi - lo) * i / (n - 1))) for i in range(n)]


GRIDS = ("DS1", "DS2", "DS3")


def expand_grid(
    name: str,
    seed: int = 0,
    mode: Mode | str = Mode.UNORDERED,
    set_cardinal: int = 100,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> list[DatasetConfig]:
    """Configs of a named grid; config ``i`` gets seed ``seed + i``.

    DS1 varies the depth over [5, 100] (5 points), DS2 the arity over
    [5, 20] (4 points) and DS3 both jointly over [2, 15] x [5, 100]
    (7 points), always with two symbol names.
    """
    name = name.upper()
    if name == "DS1":
        params = [(5, d) for d in _spaced(5, 100, 5)]
    elif name == "DS2":
        params = [(a, 5) for a in _spaced(5, 20, 4)]
    elif name == "DS3":
        params = list(zip(_spaced(2, 15, 7), _spaced(5, 100, 7)))
    else:
        raise ValueError(f"unknown grid {name!r}; expected one of {', '.join(GRIDS)}")
    return [
        DatasetConfig(
            alphabet_size=2,
            max_arity=a,
            max_depth=d,
            set_cardinal=set_cardinal,
            seed=seed + i,
            mode=Mode.coerce(mode),
            max_nodes=max_nodes,
            grid=name,
        )
        for i, (a, d) in enumerate(params)
    ]


def dataset_header(cfg: DatasetConfig, language: TreeLanguage) -> list[str]:
    sizes = [t.size for t in language]
    return [
        f"config: {cfg.to_json()}",
        "generator: breadth-first, uniform arity in 0..max_arity then uniform name, "
        "leaf forced past max_nodes, duplicates redrawn",
        f"trees: {len(sizes)} avg_size: {sum(sizes) / len(sizes):.2f} "
        f"max_size: {max(sizes)}",
    ]


def write_dataset(cfg: DatasetConfig, out_dir, language: TreeLanguage | None = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if language is None:
        language = generate_language(cfg)
    path = out_dir / f"{cfg.config_id}.trees"
    write_trees(path, language, dataset_header(cfg, language))
    return path


def read_dataset(path) -> tuple[DatasetConfig | None, TreeLanguage]:
    """Load a dataset file; the config comes from its header when present."""
    cfg = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# config: "):
                cfg = DatasetConfig.from_json(line[len("# config: "):])
                break
            if not line.startswith("#"):
                break
    mode = cfg.mode if cfg is not None else Mode.ORDERED
    return cfg, TreeLanguage(read_trees(path), mode)


def iter_dataset_files(directory) -> Iterator[Path]:
    yield from sorted(Path(directory).glob("*.trees"))
