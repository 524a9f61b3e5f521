import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rooted_subtrees
from treekernel import (
    AlphabetMismatchError,
    InvariantViolation,
    Mode,
    ModeMismatchError,
    RankedAlphabet,
    StAutomaton,
    TreeLanguage,
    UnknownStateError,
    build_from_language,
    build_from_tree,
    canonicalize,
    parse_tree,
    serialize_tree,
    subtree_series,
    subtree_set,
    union,
    union_into,
)
from treekernel.datagen import random_tree_of_size


def series_of(aut):
    return {serialize_tree(aut.state_to_tree(q)): aut.weight_of(q) for q in range(len(aut))}


def random_language(rng, n_trees=10, max_size=10, mode=Mode.ORDERED):
    names = rng.choice([["a", "b"], ["a"], ["a", "b", "c"]])
    trees = {}
    for _ in range(rng.randint(1, n_trees)):
        t = canonicalize(random_tree_of_size(rng, rng.randint(1, max_size), names, max_arity=3), mode)
        trees.setdefault(t, t)
    return TreeLanguage(trees, mode)


@pytest.fixture
def small():
    # states in creation order: a=0, g(a)=1, f(a,g(a))=2
    return build_from_tree(parse_tree("f(a,g(a))"))


class TestBuildFromTree:
    def test_weights_count_occurrences(self):
        t1 = parse_tree("f(h(a),f(h(a),b))")
        aut = build_from_tree(t1)
        assert series_of(aut) == {"a": 2, "h(a)": 2, "b": 1, "f(h(a),b)": 1, "f(h(a),f(h(a),b))": 1}
        assert aut.marked == {aut.run(t1)}

    def test_leaf(self):
        aut = build_from_tree(parse_tree("a"))
        assert len(aut) == 1 and aut.weights == (1,) and aut.marked == {0}

    def test_shared_leaf(self):
        aut = build_from_tree(parse_tree("f(a,a)"))
        assert series_of(aut) == {"a": 2, "f(a,a)": 1}

    def test_unordered_mode_canonicalizes(self):
        x = build_from_tree(parse_tree("f(g(b),g(a))"), Mode.UNORDERED)
        y = build_from_tree(parse_tree("f(g(a),g(b))"), Mode.UNORDERED)
        assert x.dump() == y.dump()
        assert x.run(parse_tree("f(g(b),g(a))")) == x.run(parse_tree("f(g(a),g(b))")) is not None

    def test_deep_chain(self):
        t = parse_tree("h(" * 3000 + "a" + ")" * 3000)
        aut = build_from_tree(t)
        assert len(aut) == 3001
        assert aut.state_to_tree(3000) == t


class TestUnion:
    def test_trio_pair(self, trio):
        aut = build_from_tree(trio["t2"])
        union_into(aut, build_from_tree(trio["t1"]))
        assert series_of(aut) == {
            "f(h(a),f(h(a),b))": 1,
            "f(h(a),h(b))": 1,
            "f(h(a),b)": 1,
            "h(a)": 3,
            "h(b)": 1,
            "a": 3,
            "b": 2,
        }
        assert {serialize_tree(aut.state_to_tree(m)) for m in aut.marked} == {
            "f(h(a),f(h(a),b))",
            "f(h(a),h(b))",
        }

    def test_into_empty_is_copy(self, trio):
        source = build_from_tree(trio["t3"])
        target = union_into(StAutomaton(), source)
        assert target.dump() == source.dump()

    def test_self_union_doubles(self, trio):
        aut = build_from_tree(trio["t1"])
        before = aut.weights
        union_into(aut, aut)
        assert aut.weights == tuple(2 * w for w in before)

    def test_source_untouched(self, trio):
        source = build_from_tree(trio["t1"])
        snapshot = source.dump()
        union_into(build_from_tree(trio["t3"]), source)
        assert source.dump() == snapshot

    def test_mode_mismatch(self):
        with pytest.raises(ModeMismatchError):
            union_into(StAutomaton(Mode.ORDERED), StAutomaton(Mode.UNORDERED))

    def test_alphabet_mismatch(self):
        sigma = RankedAlphabet([("a", 0), ("f", 2)])
        with pytest.raises(AlphabetMismatchError):
            union_into(StAutomaton(alphabet=sigma), build_from_tree(parse_tree("g(a)")))
        with pytest.raises(AlphabetMismatchError):
            union_into(StAutomaton(alphabet=sigma), StAutomaton(alphabet=RankedAlphabet([("a", 0)])))
        union_into(StAutomaton(alphabet=sigma), build_from_tree(parse_tree("f(a,a)")))

    def test_order_independent(self):
        rng = random.Random(5)
        for _ in range(30):
            lang = random_language(rng)
            trees = list(lang)
            expected = series_of(build_from_language(lang))
            rng.shuffle(trees)
            shuffled = build_from_language(TreeLanguage(trees))
            assert series_of(shuffled) == expected
            # regroup: union of two halves, in both directions
            half = len(trees) // 2
            a = build_from_language(TreeLanguage(trees[:half]))
            b = build_from_language(TreeLanguage(trees[half:]))
            assert series_of(union(a, b)) == series_of(union(b, a)) == expected


class TestBuildFromLanguage:
    def test_trio_state_count(self, trio):
        aut = build_from_language(TreeLanguage(trio.values()))
        oracle = {serialize_tree(s) for t in trio.values() for s in rooted_subtrees(t)}
        assert len(aut) == len(oracle) == 9

    def test_empty(self):
        aut = build_from_language(TreeLanguage([]))
        assert len(aut) == 0 and aut.marked == set()

    def test_two_leaves(self):
        aut = build_from_language(TreeLanguage.parse(["a", "b"]))
        assert series_of(aut) == {"a": 1, "b": 1}
        assert all(not kids for _, kids in (aut.delta_inverse(q) for q in range(2)))

    def test_accepts_plain_iterables(self, trio):
        assert len(build_from_language([trio["t1"]])) == 5

    def test_matches_series_oracle(self):
        rng = random.Random(17)
        for _ in range(40):
            for mode in Mode:
                lang = random_language(rng, mode=mode)
                aut = build_from_language(lang)
                series = subtree_series(lang)
                assert len(aut) == len(series) <= lang.total_size
                assert aut.total_weight == lang.total_size
                assert {aut.state_to_tree(q): aut.weight_of(q) for q in range(len(aut))} == dict(series)
                assert {aut.state_to_tree(m) for m in aut.marked} == set(lang)


class TestIndex:
    def test_lookup(self, small):
        assert small.lookup(("f", 2), (0, 1)) == 2
        assert small.lookup(("g", 1), (1,)) is None
        assert small.lookup(("a", 0), ()) == 0

    def test_lookup_unknown_state(self, small):
        with pytest.raises(UnknownStateError):
            small.lookup(("g", 1), (7,))

    def test_delta_inverse(self, small):
        assert small.delta_inverse(1) == (("g", 1), (0,))
        assert small.delta_inverse(0) == (("a", 0), ())
        with pytest.raises(UnknownStateError):
            small.delta_inverse(99)

    def test_ordered_list(self, small):
        assert small.ordered_transitions == [(0, "a", ()), (1, "g", (0,)), (2, "f", (0, 1))]

    def test_state_to_tree(self, trio):
        aut = build_from_tree(trio["t1"])
        trees = {serialize_tree(aut.state_to_tree(q)) for q in range(len(aut))}
        assert "f(h(a),b)" in trees
        assert aut.state_to_tree(0) == parse_tree("a")
        with pytest.raises(UnknownStateError):
            aut.state_to_tree(-1)

    def test_dump(self, small):
        assert small.dump() == (
            "state 0 nu=2\nstate 1 nu=1\nstate 2 nu=1\n"
            "trans 0 a/0\ntrans 1 g/1 0\ntrans 2 f/2 0 1\nmarked 2\n"
        )

    @given(st.integers(0, 2**32), st.integers(1, 60))
    @settings(max_examples=60)
    def test_round_trip_every_state(self, seed, size):
        rng = random.Random(seed)
        t = random_tree_of_size(rng, size, ["a", "b"], max_arity=3)
        aut = build_from_tree(t)
        assert len(aut) == len(subtree_set(t))
        for q in range(len(aut)):
            s = aut.state_to_tree(q)
            assert aut.run(s) == q
            (name, k), kids = aut.delta_inverse(q)
            assert aut.lookup((name, k), kids) == q
            assert aut.symbol_of(q) == s.symbol


class TestInvariants:
    def test_detects_broken_order(self, small):
        broken = small.copy()
        broken._inverse[1] = ("g", (2,))
        with pytest.raises(InvariantViolation):
            broken.check_invariants()

    def test_detects_broken_index(self, small):
        broken = small.copy()
        broken._index[("f", (0, 1))] = 1
        with pytest.raises(InvariantViolation):
            broken.check_invariants()

    def test_valid_after_builds(self, trio):
        aut = build_from_language(TreeLanguage(trio.values(), Mode.UNORDERED))
        aut.check_invariants()
        for q, _, kids in aut.ordered_transitions:
            assert all(c < q for c in kids)
