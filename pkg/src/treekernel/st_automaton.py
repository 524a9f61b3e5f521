"""Deterministic, homogeneous SubTree automata.

Each state stands for exactly one distinct subtree of the language and its
root weight counts the occurrences of that subtree. States are numbered in
creation order, and a state is only created once all of its children
exist, so the id order is itself a valid children-before-parents order
for the transition list.

The transition index maps ``(name, child ids)`` to the unique target state
(a hash lookup costing O(arity)); the inverse index is a list holding the
defining ``(name, child ids)`` of every state.
"""

from __future__ import annotations

from collections.abc import Iterable

from .errors import (
    AlphabetMismatchError,
    InvariantViolation,
    ModeMismatchError,
    UnknownStateError,
)
from .rwta import Rwta
from .trees import Mode, RankedAlphabet, Symbol, Tree, TreeLanguage, canonicalize

# Set by the test-suite to validate every automaton built or extended.
CHECK_INVARIANTS = False
invariant_checks = 0


class StAutomaton:
    def __init__(self, mode: Mode | str = Mode.ORDERED, alphabet: RankedAlphabet | None = None):
        self.mode = Mode.coerce(mode)
        # declared alphabet; None means "whatever symbols the trees use"
        self.declared_alphabet = alphabet
        self._index: dict[tuple[str, tuple[int, ...]], int] = {}
        self._inverse: list[tuple[str, tuple[int, ...]]] = []
        self._nu: list[int] = []
        self.marked: set[int] = set()

    @classmethod
    def from_tree(cls, t: Tree, mode: Mode | str = Mode.ORDERED) -> "StAutomaton":
        aut = cls(mode)
        aut._insert_tree(canonicalize(t, aut.mode))
        aut._maybe_check()
        return aut

    @classmethod
    def from_language(cls, language: TreeLanguage) -> "StAutomaton":
        """Fold the members in one at a time with :func:`union_into`."""
        aut = cls(language.mode)
        for t in language:
            union_into(aut, cls.from_tree(t, language.mode))
        return aut

    def _insert_tree(self, t: Tree) -> int:
        index, inverse, nu = self._index, self._inverse, self._nu
        state_of: dict[int, int] = {}
        for node in t.iter_postorder():
            key = (node.name, tuple([state_of[id(c)] for c in node.children]))
            q = index.get(key)
            if q is None:
                q = len(inverse)
                index[key] = q
                inverse.append(key)
                nu.append(1)
            else:
                nu[q] += 1
            state_of[id(node)] = q
        root = state_of[id(t)]
        self.marked.add(root)
        return root

    def _add_state(self, key: tuple[str, tuple[int, ...]], weight: int) -> int:
        q = len(self._inverse)
        self._index[key] = q
        self._inverse.append(key)
        self._nu.append(weight)
        return q

    def _maybe_check(self) -> None:
        if CHECK_INVARIANTS:
            self.check_invariants()

    def _check_state(self, q: int) -> None:
        if not isinstance(q, int) or not 0 <= q < len(self._inverse):
            raise UnknownStateError(f"state {q!r} not in automaton")

    @property
    def n_states(self) -> int:
        return len(self._inverse)

    def __len__(self) -> int:
        return len(self._inverse)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(self._nu)

    def weight_of(self, q: int) -> int:
        self._check_state(q)
        return self._nu[q]

    @property
    def total_weight(self) -> int:
        """Sum of root weights, i.e. the total size of the language."""
        return sum(self._nu)

    def alphabet(self) -> RankedAlphabet:
        if self.declared_alphabet is not None:
            return self.declared_alphabet
        return RankedAlphabet({(name, len(kids)) for name, kids in self._inverse})

    def symbol_of(self, q: int) -> Symbol:
        self._check_state(q)
        name, kids = self._inverse[q]
        return (name, len(kids))

    def lookup(self, symbol: Symbol, children: tuple[int, ...] = ()) -> int | None:
        """The unique target of ``symbol(children)``, or None."""
        name, k = symbol
        children = tuple(children)
        for c in children:
            self._check_state(c)
        if len(children) != k:
            return None
        return self._index.get((name, children))

    def delta_inverse(self, q: int) -> tuple[Symbol, tuple[int, ...]]:
        self._check_state(q)
        name, kids = self._inverse[q]
        return (name, len(kids)), kids

    @property
    def ordered_transitions(self) -> list[tuple[int, str, tuple[int, ...]]]:
        """``(target, name, children)`` with children always listed first."""
        return [(q, name, kids) for q, (name, kids) in enumerate(self._inverse)]

    def state_to_tree(self, q: int) -> Tree:
        """The subtree represented by ``q``; shared parts are shared objects."""
        self._check_state(q)
        built: dict[int, Tree] = {}
        stack = [q]
        while stack:
            p = stack[-1]
            if p in built:
                stack.pop()
                continue
            name, kids = self._inverse[p]
            missing = [c for c in kids if c not in built]
            if missing:
                stack.extend(missing)
                continue
            stack.pop()
            built[p] = Tree(name, [built[c] for c in kids])
        return built[q]

    def run(self, t: Tree) -> int | None:
        """The state reached by ``t`` (canonicalized per mode), or None."""
        t = canonicalize(t, self.mode)
        get = self._index.get
        state_of: dict[int, int | None] = {}
        for node in t.iter_postorder():
            kids = []
            for c in node.children:
                s = state_of[id(c)]
                if s is None:
                    break
                kids.append(s)
            else:
                state_of[id(node)] = get((node.name, tuple(kids)))
                continue
            state_of[id(node)] = None
        return state_of[id(t)]

    def weight(self, t: Tree) -> int:
        q = self.run(t)
        return 0 if q is None else self._nu[q]

    def as_rwta(self) -> Rwta:
        return Rwta(
            len(self._inverse),
            self._nu,
            [(q, name, *kids) for q, (name, kids) in enumerate(self._inverse)],
            alphabet=self.declared_alphabet,
        )

    def copy(self) -> "StAutomaton":
        other = StAutomaton(self.mode, self.declared_alphabet)
        other._index = dict(self._index)
        other._inverse = list(self._inverse)
        other._nu = list(self._nu)
        other.marked = set(self.marked)
        return other

    def check_invariants(self) -> None:
        """Raise InvariantViolation unless the automaton is a well-formed ST automaton."""
        global invariant_checks
        invariant_checks += 1
        n = len(self._inverse)
        if len(self._index) != n or len(self._nu) != n:
            raise InvariantViolation("index, inverse and weights disagree in size")
        for q, key in enumerate(self._inverse):
            name, kids = key
            # determinism + bijectivity: the key maps back to exactly this state,
            # and homogeneity follows since each state has a single defining symbol
            if self._index.get(key) != q:
                raise InvariantViolation(f"transition index does not map {key} to {q}")
            for c in kids:
                if not 0 <= c < q:
                    raise InvariantViolation(f"child {c} of state {q} is not earlier in order")
            if self._nu[q] <= 0:
                raise InvariantViolation(f"state {q} has non-positive weight {self._nu[q]}")
        for m in self.marked:
            if not 0 <= m < n:
                raise InvariantViolation(f"marked state {m} out of range")
        if n > sum(self._nu):
            raise InvariantViolation("more states than tree nodes")

    def dump(self) -> str:
        lines = [f"state {q} nu={w}" for q, w in enumerate(self._nu)]
        for q, (name, kids) in enumerate(self._inverse):
            lines.append(" ".join(["trans", str(q), f"{name}/{len(kids)}", *map(str, kids)]))
        lines.extend(f"marked {m}" for m in sorted(self.marked))
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"StAutomaton(states={self.n_states}, mode={self.mode.value})"


def _check_compatible(a: StAutomaton, b: StAutomaton) -> None:
    if a.mode is not b.mode:
        raise ModeMismatchError(f"{a.mode.value} automaton vs {b.mode.value} automaton")
    da, db = a.declared_alphabet, b.declared_alphabet
    if da is not None and db is not None and da != db:
        raise AlphabetMismatchError(f"{da!r} != {db!r}")
    if da is not None and db is None and not b.alphabet() <= da:
        raise AlphabetMismatchError(f"source uses symbols outside {da!r}")
    if db is not None and da is None and not a.alphabet() <= db:
        raise AlphabetMismatchError(f"target uses symbols outside {db!r}")


def union_into(target: StAutomaton, source: StAutomaton) -> StAutomaton:
    """Extend ``target`` in place into the ST automaton of both languages.

    Walks the source's states in creation order, mapping each one to the
    target state with the same subtree (creating it when absent) and adding
    the source weight onto it. Costs O(arity) per source transition; the
    source is left untouched.
    """
    _check_compatible(target, source)
    if source is target:
        source = source.copy()
    index = target._index
    phi: list[int] = []
    for q, (name, kids) in enumerate(source._inverse):
        key = (name, tuple([phi[c] for c in kids]))
        p = index.get(key)
        if p is None:
            p = target._add_state(key, source._nu[q])
        else:
            target._nu[p] += source._nu[q]
        phi.append(p)
    target.marked.update(phi[m] for m in source.marked)
    if target.declared_alphabet is None and source.declared_alphabet is not None:
        target.declared_alphabet = source.declared_alphabet
    target._maybe_check()
    return target


def union(a: StAutomaton, b: StAutomaton) -> StAutomaton:
    """Non-destructive union; iterates the smaller automaton."""
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    return union_into(large.copy(), small)


def build_from_tree(t: Tree, mode: Mode | str = Mode.ORDERED) -> StAutomaton:
    return StAutomaton.from_tree(t, mode)


def build_from_language(language: TreeLanguage | Iterable[Tree], mode: Mode | str | None = None) -> StAutomaton:
    if not isinstance(language, TreeLanguage):
        language = TreeLanguage(language, mode or Mode.ORDERED)
    return StAutomaton.from_language(language)
