"""Ranked trees, their text format, tree languages and tree series.

Trees are written in functional notation, e.g. ``f(h(a),f(h(a),b))``.
Every routine here walks trees with an explicit stack so that deep trees
(depth in the hundreds or thousands) never hit the interpreter's recursion
limit.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping

from .errors import (
    ArityError,
    DuplicateTreeError,
    ModeMismatchError,
    TreeSyntaxError,
)

NAME_RE = re.compile(r"[A-Za-z0-9_]+")

Symbol = tuple[str, int]


class Mode(enum.Enum):
    ORDERED = "ordered"
    UNORDERED = "unordered"

    @classmethod
    def coerce(cls, value: "Mode | str") -> "Mode":
        return value if isinstance(value, cls) else cls(str(value).lower())


class RankedAlphabet:
    """A finite set of ``(name, arity)`` symbols.

    The same name may occur at several arities; each pair is a distinct
    symbol.
    """

    __slots__ = ("_symbols",)

    def __init__(self, symbols: Iterable[Symbol] = ()):
        checked = set()
        for name, arity in symbols:
            if not isinstance(name, str) or not NAME_RE.fullmatch(name):
                raise ValueError(f"invalid symbol name {name!r}")
            if not isinstance(arity, int) or arity < 0:
                raise ValueError(f"invalid arity {arity!r} for symbol {name!r}")
            checked.add((name, arity))
        self._symbols = frozenset(checked)

    @classmethod
    def infer(cls, trees: Iterable["Tree"]) -> "RankedAlphabet":
        symbols = set()
        for t in trees:
            for node in t.iter_nodes():
                symbols.add(node.symbol)
        return cls(symbols)

    @property
    def symbols(self) -> frozenset:
        return self._symbols

    def nullary(self) -> list[str]:
        return sorted(name for name, k in self._symbols if k == 0)

    def by_arity(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for name, k in sorted(self._symbols):
            out.setdefault(k, []).append(name)
        return out

    def union(self, other: "RankedAlphabet") -> "RankedAlphabet":
        return RankedAlphabet(self._symbols | other._symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._symbols

    def __iter__(self) -> Iterator[Symbol]:
        return iter(sorted(self._symbols))

    def __len__(self) -> int:
        return len(self._symbols)

    def __eq__(self, other) -> bool:
        return isinstance(other, RankedAlphabet) and self._symbols == other._symbols

    def __hash__(self) -> int:
        return hash(self._symbols)

    def __le__(self, other: "RankedAlphabet") -> bool:
        return self._symbols <= other._symbols

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}/{k}" for n, k in self)
        return f"RankedAlphabet({{{inner}}})"


class Tree:
    """Immutable ranked ordered tree.

    The arity of a node is the number of its children. Size, height and
    hash are computed once at construction, which keeps hashing O(arity)
    per node and makes trees cheap dictionary keys.
    """

    __slots__ = ("name", "children", "size", "height", "_hash")

    def __init__(self, name: str, children: Iterable["Tree"] = ()):
        if not isinstance(name, str) or not NAME_RE.fullmatch(name):
            raise ValueError(f"invalid symbol name {name!r}")
        children = tuple(children)
        size = 1
        height = 0
        for c in children:
            if not isinstance(c, Tree):
                raise TypeError(f"child must be a Tree, got {type(c).__name__}")
            size += c.size
            if c.height > height:
                height = c.height
        self.name = name
        self.children = children
        self.size = size
        self.height = height + 1
        self._hash = hash((name, children))

    @property
    def arity(self) -> int:
        return len(self.children)

    @property
    def symbol(self) -> Symbol:
        return (self.name, len(self.children))

    def is_leaf(self) -> bool:
        return not self.children

    def iter_nodes(self) -> Iterator["Tree"]:
        """Pre-order iteration over every node (occurrences, not distinct)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def iter_postorder(self) -> Iterator["Tree"]:
        """Children before parents, left to right."""
        stack: list[tuple[Tree, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded or not node.children:
                yield node
                continue
            stack.append((node, True))
            for c in reversed(node.children):
                stack.append((c, False))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        # iterative so that deep trees compare without recursion
        pending = [(self, other)]
        while pending:
            x, y = pending.pop()
            if x is y:
                continue
            if x._hash != y._hash or x.size != y.size or x.name != y.name:
                return False
            if len(x.children) != len(y.children):
                return False
            pending.extend(zip(x.children, y.children))
        return True

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __str__(self) -> str:
        return serialize_tree(self)

    def __repr__(self) -> str:
        return f"Tree({serialize_tree(self)!r})"


def leaf(name: str) -> Tree:
    return Tree(name)


def _skip_ws(text: str, pos: int) -> int:
    n = len(text)
    while pos < n and text[pos].isspace():
        pos += 1
    return pos


def parse_tree(text: str, alphabet: RankedAlphabet | None = None) -> Tree:
    """Parse ``NAME | NAME '(' tree (',' tree)* ')'``; whitespace is ignored.

    Raises TreeSyntaxError with the offending offset, and ArityError when
    ``alphabet`` is given and a (name, arity) pair is not part of it.
    """
    n = len(text)
    pos = 0
    # frames of (name, children, offset of the name)
    stack: list[tuple[str, list[Tree], int]] = []

    def build(name: str, children: list[Tree], at: int) -> Tree:
        if alphabet is not None and (name, len(children)) not in alphabet:
            raise ArityError(
                f"symbol {name!r} used with arity {len(children)} at offset {at}, "
                f"not in {alphabet!r}"
            )
        return Tree(name, children)

    while True:
        pos = _skip_ws(text, pos)
        m = NAME_RE.match(text, pos)
        if m is None:
            what = "end of input" if pos >= n else repr(text[pos])
            raise TreeSyntaxError(f"expected a symbol name, found {what}", pos, text)
        name, start = m.group(), pos
        pos = _skip_ws(text, m.end())
        if pos < n and text[pos] == "(":
            stack.append((name, [], start))
            pos += 1
            continue

        node = build(name, [], start)
        while True:
            if not stack:
                pos = _skip_ws(text, pos)
                if pos != n:
                    raise TreeSyntaxError(f"unexpected trailing {text[pos]!r}", pos, text)
                return node
            stack[-1][1].append(node)
            pos = _skip_ws(text, pos)
            if pos < n and text[pos] == ",":
                pos += 1
                break
            if pos < n and text[pos] == ")":
                pos += 1
                pname, pchildren, pstart = stack.pop()
                node = build(pname, pchildren, pstart)
                continue
            what = "end of input" if pos >= n else repr(text[pos])
            raise TreeSyntaxError(f"expected ',' or ')', found {what}", pos, text)


def serialize_tree(t: Tree) -> str:
    parts: list[str] = []
    # items are either a Tree to emit or a literal string
    stack: list = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        parts.append(item.name)
        if item.children:
            stack.append(")")
            kids = item.children
            for i in range(len(kids) - 1, -1, -1):
                stack.append(kids[i])
                if i:
                    stack.append(",")
            stack.append("(")
    return "".join(parts)


def _child_key(pair: tuple[Tree, str]) -> str:
    return pair[1] + ","


def canonicalize(t: Tree, mode: Mode | str = Mode.ORDERED) -> Tree:
    """Canonical representative of ``t``.

    Ordered mode is the identity. Unordered mode sorts the children of
    every node by their canonical serialization followed by ``,``,
    bottom-up. The trailing separator makes the result the
    lexicographically least serialization over all child permutations
    (``s(s)`` sorts before ``s`` because ``(`` < ``,``).
    """
    if Mode.coerce(mode) is Mode.ORDERED:
        return t
    done: dict[int, tuple[Tree, str]] = {}
    for node in t.iter_postorder():
        if not node.children:
            done[id(node)] = (node, node.name)
            continue
        kids = sorted((done[id(c)] for c in node.children), key=_child_key)
        text = node.name + "(" + ",".join(s for _, s in kids) + ")"
        # keep the original object when it is already sorted
        if all(k[0] is c for k, c in zip(kids, node.children)):
            done[id(node)] = (node, text)
        else:
            done[id(node)] = (Tree(node.name, [k[0] for k in kids]), text)
    return done[id(t)][0]


class TreeLanguage:
    """A finite set of canonical trees under an ordering mode.

    Member order is kept (first occurrence) so that everything derived from
    a language is deterministic. Two inputs that canonicalize to the same
    tree are rejected.
    """

    __slots__ = ("trees", "mode", "_members")

    def __init__(self, trees: Iterable[Tree] = (), mode: Mode | str = Mode.ORDERED):
        self.mode = Mode.coerce(mode)
        members: set[Tree] = set()
        ordered = []
        for t in trees:
            c = canonicalize(t, self.mode)
            if c in members:
                raise DuplicateTreeError(f"tree {c} occurs twice in the language")
            members.add(c)
            ordered.append(c)
        self.trees: tuple[Tree, ...] = tuple(ordered)
        self._members = frozenset(members)

    @classmethod
    def parse(cls, texts: Iterable[str], mode: Mode | str = Mode.ORDERED) -> "TreeLanguage":
        return cls((parse_tree(s) for s in texts), mode)

    @property
    def total_size(self) -> int:
        return sum(t.size for t in self.trees)

    def alphabet(self) -> RankedAlphabet:
        return RankedAlphabet.infer(self.trees)

    def with_tree(self, t: Tree) -> "TreeLanguage":
        return TreeLanguage(self.trees + (t,), self.mode)

    def __contains__(self, t) -> bool:
        return isinstance(t, Tree) and canonicalize(t, self.mode) in self._members

    def __iter__(self) -> Iterator[Tree]:
        return iter(self.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TreeLanguage)
            and self.mode is other.mode
            and self._members == other._members
        )

    def __hash__(self) -> int:
        return hash((self.mode, self._members))

    def __repr__(self) -> str:
        inner = ", ".join(serialize_tree(t) for t in self.trees[:4])
        more = ", ..." if len(self.trees) > 4 else ""
        return f"TreeLanguage([{inner}{more}], mode={self.mode.value})"


class TreeSeries(Mapping):
    """Finite map from trees to positive integer coefficients.

    Zero coefficients are never stored, so the key set is the support.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Mapping[Tree, int] | Iterable[tuple[Tree, int]] = ()):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        coeffs: dict[Tree, int] = {}
        for t, c in items:
            if c < 0:
                raise ValueError(f"negative coefficient {c} for {t}")
            if c:
                coeffs[t] = coeffs.get(t, 0) + c
        self._coeffs = coeffs

    @classmethod
    def from_text(cls, coefficients: Mapping[str, int]) -> "TreeSeries":
        return cls({parse_tree(s): c for s, c in coefficients.items()})

    def __getitem__(self, t: Tree) -> int:
        return self._coeffs.get(t, 0)

    def __contains__(self, t) -> bool:
        return t in self._coeffs

    def __iter__(self) -> Iterator[Tree]:
        return iter(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, TreeSeries):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self):
        raise TypeError("TreeSeries is not hashable")

    def support(self) -> frozenset:
        return frozenset(self._coeffs)

    def total(self) -> int:
        return sum(self._coeffs.values())

    def __add__(self, other: "TreeSeries") -> "TreeSeries":
        out = dict(self._coeffs)
        for t, c in other._coeffs.items():
            out[t] = out.get(t, 0) + c
        return TreeSeries(out)

    def hadamard(self, other: "TreeSeries") -> "TreeSeries":
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        return TreeSeries(
            {t: c * large._coeffs[t] for t, c in small._coeffs.items() if t in large._coeffs}
        )

    def dot(self, other: "TreeSeries") -> int:
        """Sum of the Hadamard product's coefficients."""
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        get = large._coeffs.get
        return sum(c * get(t, 0) for t, c in small._coeffs.items())

    def restrict(self, max_size: int) -> "TreeSeries":
        return TreeSeries({t: c for t, c in self._coeffs.items() if t.size <= max_size})

    def as_text(self) -> dict[str, int]:
        return {serialize_tree(t): c for t, c in self._coeffs.items()}

    def __repr__(self) -> str:
        terms = sorted(self.as_text().items(), key=lambda kv: (len(kv[0]), kv[0]))
        inner = " + ".join(s if c == 1 else f"{c}*{s}" for s, c in terms)
        return f"TreeSeries({inner or '0'})"


def subtree_set(t: Tree) -> set[Tree]:
    """Distinct subtrees rooted at some node of ``t``."""
    return set(t.iter_nodes())


def subtree_series(language: TreeLanguage | Tree | Iterable[Tree]) -> TreeSeries:
    """Occurrence counts of every rooted subtree across the members."""
    trees = [language] if isinstance(language, Tree) else language
    counts: Counter = Counter()
    for t in trees:
        counts.update(t.iter_nodes())
    return TreeSeries(counts)


def brute_force_kernel(x: TreeLanguage, y: TreeLanguage) -> int:
    """SubTree kernel computed directly from explicit subtree series."""
    mx = getattr(x, "mode", None)
    my = getattr(y, "mode", None)
    if mx is not None and my is not None and mx is not my:
        raise ModeMismatchError(f"cannot compare {mx.value} and {my.value} languages")
    return subtree_series(x).dot(subtree_series(y))


def iter_tree_lines(lines: Iterable[str]) -> Iterator[tuple[int, str]]:
    """Yield ``(line number, text)`` for the tree lines of a dataset file."""
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def read_trees(path, alphabet: RankedAlphabet | None = None) -> list[Tree]:
    """Read a tree-per-line file; syntax errors carry ``path:line:col``."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in iter_tree_lines(fh):
            try:
                trees.append(parse_tree(line, alphabet))
            except TreeSyntaxError as exc:
                raise TreeSyntaxError(
                    f"{path}:{lineno}:{exc.offset + 1}: {exc.message}", exc.offset, line
                ) from None
    return trees


def read_language(path, mode: Mode | str = Mode.ORDERED) -> TreeLanguage:
    return TreeLanguage(read_trees(path), mode)


def write_trees(path, trees: Iterable[Tree], header: Iterable[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for t in trees:
            fh.write(serialize_tree(t) + "\n")
