"""SubTree kernel computation.

The main route intersects two ST automata: walking the smaller one in
creation order, each state is matched with the state of the other automaton
that represents the same subtree. Matched pairs form the accessible part
of the product automaton and the kernel is the sum of their weight
products. Unmatched states are simply recorded as such; the inputs are
never modified, so one automaton can be reused against many partners.

Two independent baselines are provided for cross-checking: the explicit
series computation of :func:`treekernel.trees.brute_force_kernel` and the
node-pair dynamic program of :func:`moschitti_kernel`.
"""

from __future__ import annotations

import csv
import enum
import io
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import AlgorithmUnsupportedError, ModeMismatchError, WeightOverflowError
from .st_automaton import StAutomaton, _check_compatible
from .trees import Tree, TreeLanguage, TreeSeries, brute_force_kernel, subtree_series

INT64_MAX = 2**63 - 1


class Algorithm(enum.Enum):
    AUTOMATA = "automata"
    ORACLE = "oracle"
    MOSCHITTI = "moschitti"

    @classmethod
    def coerce(cls, value: "Algorithm | str") -> "Algorithm":
        return value if isinstance(value, cls) else cls(str(value).lower())


@dataclass
class ProductResult:
    # (state in X, state in Y, weight product) per common subtree
    matched_states: list[tuple[int, int, int]]
    kernel_value: int
    states_explored: int
    # set when some weight or the sum no longer fits a signed 64-bit integer
    exceeds_int64: bool = False

    def to_series(self, ax: StAutomaton) -> TreeSeries:
        """The product series, with trees recovered from ``ax``."""
        return TreeSeries({ax.state_to_tree(p): w for p, _, w in self.matched_states})


def hadamard_accessible(
    ax: StAutomaton, ay: StAutomaton, on_overflow: str = "promote"
) -> ProductResult:
    """Accessible part of the product of two ST automata.

    ``on_overflow`` is ``"promote"`` (keep exact integers, flag the result)
    or ``"raise"`` (WeightOverflowError past the signed 64-bit range).
    """
    _check_compatible(ax, ay)
    swapped = len(ay) < len(ax)
    small, large = (ay, ax) if swapped else (ax, ay)
    index = large._index
    nu_small, nu_large = small._nu, large._nu

    phi: list[int | None] = []
    matched = []
    total = 0
    for q, (name, kids) in enumerate(small._inverse):
        if kids:
            mapped = []
            for c in kids:
                p = phi[c]
                if p is None:
                    break
                mapped.append(p)
            else:
                p = index.get((name, tuple(mapped)))
                phi.append(p)
                if p is not None:
                    w = nu_small[q] * nu_large[p]
                    total += w
                    matched.append((p, q, w) if swapped else (q, p, w))
                continue
            phi.append(None)
        else:
            p = index.get((name, ()))
            phi.append(p)
            if p is not None:
                w = nu_small[q] * nu_large[p]
                total += w
                matched.append((p, q, w) if swapped else (q, p, w))

    big = total > INT64_MAX
    if big and on_overflow == "raise":
        raise WeightOverflowError(f"kernel value {total} exceeds the signed 64-bit range")
    return ProductResult(matched, total, len(small._inverse), big)


def _as_automaton(item) -> StAutomaton:
    if isinstance(item, StAutomaton):
        return item
    if isinstance(item, TreeLanguage):
        return StAutomaton.from_language(item)
    if isinstance(item, Tree):
        return StAutomaton.from_tree(item)
    raise TypeError(f"expected TreeLanguage, StAutomaton or Tree, got {type(item).__name__}")


def subtree_kernel(x, y) -> int:
    """SubTree kernel of two languages (or pre-built ST automata)."""
    return hadamard_accessible(_as_automaton(x), _as_automaton(y)).kernel_value


def _postorder_nodes(t: Tree) -> tuple[list[tuple], list[tuple[int, ...]]]:
    """Production and child indices per node, numbered in post-order."""
    productions: list[tuple] = []
    children: list[tuple[int, ...]] = []
    number: dict[int, int] = {}
    for node in t.iter_postorder():
        number[id(node)] = len(productions)
        productions.append((node.name, tuple(c.name for c in node.children)))
        children.append(tuple(number[id(c)] for c in node.children))
    return productions, children


def moschitti_kernel(t1: Tree, t2: Tree) -> int:
    """Node-pair dynamic program counting pairs of identical rooted subtrees.

    Only pairs with equal productions are visited. For such a pair the count
    is 1 at leaves and the product of the children's counts otherwise, which
    is 1 exactly when the two rooted subtrees coincide. Pairs are processed
    in post-order of the first tree so that child pairs are always ready.
    """
    prod1, kids1 = _postorder_nodes(t1)
    prod2, kids2 = _postorder_nodes(t2)
    by_production: dict[tuple, list[int]] = {}
    for j, p in enumerate(prod2):
        by_production.setdefault(p, []).append(j)

    delta: dict[tuple[int, int], int] = {}
    total = 0
    for i, p in enumerate(prod1):
        partners = by_production.get(p)
        if not partners:
            continue
        ci = kids1[i]
        for j in partners:
            value = 1
            for a, b in zip(ci, kids2[j]):
                value *= delta.get((a, b), 0)
                if not value:
                    break
            if value:
                delta[(i, j)] = value
                total += value
    return total


@dataclass
class GramMatrix:
    labels: list[str]
    values: list[list[int]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["", *self.labels])
        for label, row in zip(self.labels, self.values):
            w.writerow([label, *row])
        return buf.getvalue()

    def __len__(self) -> int:
        return len(self.labels)


def gram_matrix(
    items: Sequence[TreeLanguage],
    algorithm: Algorithm | str = Algorithm.AUTOMATA,
    labels: Sequence[str] | None = None,
    threads: int = 1,
) -> GramMatrix:
    """Pairwise kernel matrix; only the upper triangle is computed."""
    algorithm = Algorithm.coerce(algorithm)
    if not items:
        raise ValueError("gram_matrix needs at least one item")
    modes = {item.mode for item in items}
    if len(modes) > 1:
        raise ModeMismatchError("all items of a Gram matrix must share one mode")
    labels = list(labels) if labels is not None else [f"L{i}" for i in range(len(items))]
    if len(labels) != len(items):
        raise ValueError("one label per item is required")

    if algorithm is Algorithm.AUTOMATA:
        prepared = [StAutomaton.from_language(item) for item in items]

        def kernel(i, j):
            return hadamard_accessible(prepared[i], prepared[j]).kernel_value

    elif algorithm is Algorithm.ORACLE:
        prepared = [subtree_series(item) for item in items]

        def kernel(i, j):
            return prepared[i].dot(prepared[j])

    else:
        if any(len(item) != 1 for item in items):
            raise AlgorithmUnsupportedError("the Moschitti baseline needs singleton languages")
        prepared = [item.trees[0] for item in items]

        def kernel(i, j):
            return moschitti_kernel(prepared[i], prepared[j])

    n = len(items)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda ij: kernel(*ij), pairs))
    else:
        results = [kernel(i, j) for i, j in pairs]

    values = [[0] * n for _ in range(n)]
    for (i, j), v in zip(pairs, results):
        values[i][j] = values[j][i] = v
    return GramMatrix(labels, values)


def language_kernel(x: TreeLanguage, y: TreeLanguage, algorithm: Algorithm | str) -> int:
    """Kernel of two languages with the requested algorithm."""
    algorithm = Algorithm.coerce(algorithm)
    if algorithm is Algorithm.AUTOMATA:
        return subtree_kernel(x, y)
    if algorithm is Algorithm.ORACLE:
        return brute_force_kernel(x, y)
    if len(x) != 1 or len(y) != 1:
        raise AlgorithmUnsupportedError("the Moschitti baseline needs singleton languages")
    return moschitti_kernel(x.trees[0], y.trees[0])
