"""Root-weighted tree automata over nonnegative integer weights.

An automaton has states ``0..n-1``, a root weight per state and a set of
transitions ``(target, name, child_1, ..., child_k)``. A tree evaluates to
the set of states reachable bottom-up; its weight is the sum of the root
weights of those states (zero for the empty set).
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from itertools import product

from .errors import BudgetExceededError, UnknownStateError, UnknownSymbolError
from .trees import RankedAlphabet, Symbol, Tree, TreeSeries

DEFAULT_ENUMERATION_BUDGET = 2_000_000


class Rwta:
    """Possibly non-deterministic, possibly cyclic root-weighted automaton.

    Build one with :meth:`from_labels`, which accepts arbitrary hashable
    state labels and maps them to dense integer ids in order of first
    appearance. The instance is read-only afterwards.
    """

    def __init__(
        self,
        n_states: int,
        weights: Sequence[int],
        transitions: Iterable[tuple],
        alphabet: RankedAlphabet | None = None,
        labels: Sequence[Hashable] | None = None,
    ):
        if len(weights) != n_states:
            raise ValueError("one root weight per state is required")
        if any(w < 0 for w in weights):
            raise ValueError("root weights must be nonnegative")
        self.n_states = n_states
        self.weights = tuple(weights)
        self.labels = tuple(labels) if labels is not None else tuple(range(n_states))

        trans = set()
        index: dict[tuple[str, tuple[int, ...]], set[int]] = {}
        symbols = set()
        for target, name, *children in transitions:
            children = tuple(children)
            for q in (target, *children):
                if not 0 <= q < n_states:
                    raise UnknownStateError(f"state {q} out of range in transition")
            trans.add((target, name, children))
            index.setdefault((name, children), set()).add(target)
            symbols.add((name, len(children)))
        inferred = RankedAlphabet(symbols)
        if alphabet is None:
            alphabet = inferred
        elif not inferred <= alphabet:
            raise UnknownSymbolError(f"transitions use symbols outside {alphabet!r}")
        self.alphabet = alphabet
        self.transitions = frozenset(trans)
        self._index = {k: frozenset(v) for k, v in index.items()}

    @classmethod
    def from_labels(
        cls,
        weights: Mapping[Hashable, int],
        transitions: Iterable[tuple],
        alphabet: RankedAlphabet | None = None,
        states: Iterable[Hashable] = (),
    ) -> "Rwta":
        """Build from labelled states, e.g. ``(2, "f", 1, 3)`` for 2 <- f(1, 3).

        Labels missing from ``weights`` get root weight 0.
        """
        ids: dict[Hashable, int] = {}

        def intern(label):
            if label not in ids:
                ids[label] = len(ids)
            return ids[label]

        for label in states:
            intern(label)
        for label in weights:
            intern(label)
        dense = []
        for target, name, *children in transitions:
            dense.append((intern(target), name, *(intern(c) for c in children)))
        labels = list(ids)
        w = [weights.get(label, 0) for label in labels]
        return cls(len(labels), w, dense, alphabet=alphabet, labels=labels)

    def state(self, label: Hashable) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownStateError(f"no state labelled {label!r}") from None

    def label_set(self, states: Iterable[int]) -> set:
        return {self.labels[q] for q in states}

    def _check_symbol(self, symbol: Symbol) -> None:
        if symbol not in self.alphabet:
            raise UnknownSymbolError(f"symbol {symbol[0]}/{symbol[1]} not in {self.alphabet!r}")

    def delta_step(self, symbol: Symbol, child_sets: Sequence[Iterable[int]]) -> frozenset:
        """Targets of ``symbol`` over every tuple of the Cartesian product."""
        self._check_symbol(symbol)
        name, k = symbol
        if len(child_sets) != k:
            raise ValueError(f"{name}/{k} expects {k} child state sets, got {len(child_sets)}")
        out: set[int] = set()
        get = self._index.get
        for combo in product(*child_sets):
            targets = get((name, combo))
            if targets:
                out.update(targets)
        return frozenset(out)

    def evaluate(self, t: Tree) -> frozenset:
        """Set of states reached by ``t``."""
        reached: dict[int, frozenset] = {}
        for node in t.iter_postorder():
            reached[id(node)] = self.delta_step(
                node.symbol, [reached[id(c)] for c in node.children]
            )
        return reached[id(t)]

    def weight(self, t: Tree) -> int:
        return sum(self.weights[q] for q in self.evaluate(t))

    def accepts_in(self, q: int, t: Tree) -> bool:
        """Down-language membership: does ``t`` reach state ``q``?"""
        if not 0 <= q < self.n_states:
            raise UnknownStateError(f"state {q} not in automaton")
        return q in self.evaluate(t)

    def series_up_to(
        self, max_size: int, budget: int = DEFAULT_ENUMERATION_BUDGET
    ) -> TreeSeries:
        """The realized series restricted to trees of size <= ``max_size``.

        Trees are enumerated by size over the alphabet. A tree reaching no
        state has weight zero and so has every tree containing it, so only
        trees with a nonempty state set are kept as building blocks; the
        result is the same as enumerating every tree. ``budget`` bounds the
        number of candidate trees examined.
        """
        if max_size < 1:
            raise ValueError("max_size must be positive")
        by_arity = self.alphabet.by_arity()
        # live[s] = [(tree, reached states)] for trees of size s reaching something
        live: list[list[tuple[Tree, frozenset]]] = [[] for _ in range(max_size + 1)]
        examined = 0
        coeffs: dict[Tree, int] = {}

        def compositions(total: int, parts: int):
            if parts == 1:
                if live[total]:
                    yield (total,)
                return
            for first in range(1, total - parts + 2):
                if not live[first]:
                    continue
                for rest in compositions(total - first, parts - 1):
                    yield (first, *rest)

        for size in range(1, max_size + 1):
            for k, names in by_arity.items():
                if k == 0:
                    if size != 1:
                        continue
                    shapes = [()]
                elif size - 1 < k:
                    continue
                else:
                    shapes = list(compositions(size - 1, k))
                for shape in shapes:
                    for kids in product(*(live[s] for s in shape)):
                        for name in names:
                            examined += 1
                            if examined > budget:
                                raise BudgetExceededError(
                                    f"enumeration exceeded {budget} candidate trees"
                                )
                            reached = self.delta_step(
                                (name, k), [states for _, states in kids]
                            )
                            if not reached:
                                continue
                            t = Tree(name, [tree for tree, _ in kids])
                            live[size].append((t, reached))
                            w = sum(self.weights[q] for q in reached)
                            if w:
                                coeffs[t] = w
        return TreeSeries(coeffs)

    def dump(self) -> str:
        """Deterministic text form: ``state``/``trans`` lines sorted by id."""
        lines = [f"state {q} nu={self.weights[q]}" for q in range(self.n_states)]
        for target, name, children in sorted(
            self.transitions, key=lambda tr: (tr[0], tr[1], len(tr[2]), tr[2])
        ):
            lines.append(" ".join(["trans", str(target), f"{name}/{len(children)}", *map(str, children)]))
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"Rwta(states={self.n_states}, transitions={len(self.transitions)})"
