import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import series_kernel
from treekernel import (
    AlgorithmUnsupportedError,
    Mode,
    ModeMismatchError,
    StAutomaton,
    Tree,
    TreeLanguage,
    TreeSeries,
    WeightOverflowError,
    brute_force_kernel,
    canonicalize,
    gram_matrix,
    hadamard_accessible,
    moschitti_kernel,
    parse_tree,
    subtree_kernel,
    subtree_series,
)
from treekernel.datagen import random_tree_of_size
from treekernel.kernel import Algorithm, language_kernel


def random_language(rng, mode, n_max=4, size_max=12, names=("a", "b", "c")):
    trees = {}
    for _ in range(rng.randint(1, n_max)):
        t = canonicalize(random_tree_of_size(rng, rng.randint(1, size_max), list(names), 3), mode)
        trees.setdefault(t, t)
    return TreeLanguage(trees, mode)


class TestHadamard:
    def test_trio(self, trio):
        ax = StAutomaton.from_language(TreeLanguage([trio["t1"], trio["t2"]]))
        ay = StAutomaton.from_tree(trio["t3"])
        result = hadamard_accessible(ax, ay)
        assert result.kernel_value == 15
        assert result.to_series(ax).as_text() == {"a": 3, "b": 6, "h(a)": 3, "h(b)": 2, "f(h(a),h(b))": 1}
        assert not result.exceeds_int64

    def test_trio_swapped_sides(self, trio):
        ax = StAutomaton.from_tree(trio["t3"])
        ay = StAutomaton.from_language(TreeLanguage([trio["t1"], trio["t2"]]))
        result = hadamard_accessible(ax, ay)
        assert result.kernel_value == 15
        for p, q, w in result.matched_states:
            assert ax.state_to_tree(p) == ay.state_to_tree(q)
            assert w == ax.weight_of(p) * ay.weight_of(q)

    def test_disjoint(self):
        ax = StAutomaton.from_tree(parse_tree("f(a,a)"))
        ay = StAutomaton.from_tree(parse_tree("g(b)"))
        result = hadamard_accessible(ax, ay)
        assert result.kernel_value == 0 and result.matched_states == []

    def test_self_product_small(self):
        aut = StAutomaton.from_tree(parse_tree("f(a,g(a))"))
        result = hadamard_accessible(aut, aut)
        assert len(result.matched_states) == 3
        assert sorted(w for _, _, w in result.matched_states) == [1, 1, 4]
        assert result.kernel_value == 6

    def test_inputs_not_modified(self, trio):
        ax = StAutomaton.from_tree(trio["t1"])
        ay = StAutomaton.from_tree(trio["t3"])
        before = ax.dump(), ay.dump()
        hadamard_accessible(ax, ay)
        hadamard_accessible(ax, ay)
        assert (ax.dump(), ay.dump()) == before

    def test_explores_smaller_side(self, trio):
        ax = StAutomaton.from_tree(trio["t3"])
        ay = StAutomaton.from_tree(parse_tree("a"))
        assert hadamard_accessible(ax, ay).states_explored == 1

    def test_mode_mismatch(self):
        with pytest.raises(ModeMismatchError):
            hadamard_accessible(StAutomaton(Mode.ORDERED), StAutomaton(Mode.UNORDERED))

    def test_overflow(self):
        aut = StAutomaton.from_tree(parse_tree("a"))
        aut._nu[0] = 2**40
        result = hadamard_accessible(aut, aut)
        assert result.kernel_value == 2**80 and result.exceeds_int64
        with pytest.raises(WeightOverflowError):
            hadamard_accessible(aut, aut, on_overflow="raise")


class TestSubtreeKernel:
    def test_trio(self, trio):
        assert subtree_kernel(TreeLanguage([trio["t1"], trio["t2"]]), TreeLanguage([trio["t3"]])) == 15
        assert subtree_kernel(trio["t1"], trio["t1"]) == 11
        assert subtree_kernel(trio["t1"], trio["t3"]) == 7

    def test_empty_language(self, trio):
        assert subtree_kernel(TreeLanguage([]), TreeLanguage([trio["t1"]])) == 0

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            subtree_kernel("f(a)", "a")

    def test_unordered_sees_permutations(self):
        x = TreeLanguage.parse(["f(a,b)"], Mode.UNORDERED)
        y = TreeLanguage.parse(["f(b,a)"], Mode.UNORDERED)
        assert subtree_kernel(x, y) == 3
        assert subtree_kernel(TreeLanguage.parse(["f(a,b)"]), TreeLanguage.parse(["f(b,a)"])) == 2


class TestMoschitti:
    def test_trio(self, trio):
        assert moschitti_kernel(trio["t1"], trio["t3"]) == 7
        assert moschitti_kernel(trio["t2"], trio["t3"]) == 8

    def test_leaf(self):
        assert moschitti_kernel(Tree("a"), Tree("a")) == 1
        assert moschitti_kernel(Tree("a"), Tree("b")) == 0

    def test_same_production_different_subtree(self):
        # roots share a production but not a subtree; only b matches (1 x 2)
        assert moschitti_kernel(parse_tree("f(g(a),b)"), parse_tree("f(g(b),b)")) == 2

    def test_deep(self):
        t = parse_tree("h(" * 2000 + "a" + ")" * 2000)
        assert moschitti_kernel(t, t) == 2001


class TestAgreement:
    def test_three_way_on_trees(self):
        rng = random.Random(3)
        for _ in range(150):
            mode = rng.choice(list(Mode))
            x = random_language(rng, mode, n_max=1, size_max=30)
            y = random_language(rng, mode, n_max=1, size_max=30)
            values = {a: language_kernel(x, y, a) for a in Algorithm}
            assert len(set(values.values())) == 1, values
            assert values[Algorithm.ORACLE] == series_kernel(x.trees, y.trees)

    def test_languages(self):
        rng = random.Random(4)
        for _ in range(100):
            mode = rng.choice(list(Mode))
            x, y = random_language(rng, mode), random_language(rng, mode)
            assert subtree_kernel(x, y) == brute_force_kernel(x, y)

    def test_moschitti_needs_singletons(self, trio):
        x = TreeLanguage([trio["t1"], trio["t2"]])
        with pytest.raises(AlgorithmUnsupportedError):
            language_kernel(x, x, "moschitti")


class TestProperties:
    @given(st.integers(0, 2**32))
    @settings(max_examples=80)
    def test_symmetric_and_additive(self, seed):
        rng = random.Random(seed)
        mode = rng.choice(list(Mode))
        x, y, z = (random_language(rng, mode) for _ in range(3))
        assert subtree_kernel(x, y) == subtree_kernel(y, x)
        if not set(y) & set(z):
            yz = TreeLanguage(list(y) + list(z), mode)
            assert subtree_kernel(x, yz) == subtree_kernel(x, y) + subtree_kernel(x, z)

    @given(st.integers(0, 2**32))
    @settings(max_examples=80)
    def test_self_kernel_is_sum_of_squares(self, seed):
        rng = random.Random(seed)
        x = random_language(rng, Mode.ORDERED)
        aut = StAutomaton.from_language(x)
        assert subtree_kernel(x, x) == sum(w * w for w in aut.weights)
        assert subtree_kernel(x, x) >= x.total_size

    @given(st.integers(0, 2**32))
    @settings(max_examples=80)
    def test_accessible_part_bound(self, seed):
        rng = random.Random(seed)
        x, y = random_language(rng, Mode.ORDERED), random_language(rng, Mode.ORDERED)
        ax, ay = StAutomaton.from_language(x), StAutomaton.from_language(y)
        result = hadamard_accessible(ax, ay)
        assert len(result.matched_states) <= min(len(ax), len(ay))
        assert result.states_explored == min(len(ax), len(ay))


class TestGram:
    def test_trio_all_algorithms(self, trio):
        items = [TreeLanguage([t]) for t in trio.values()]
        expected = [[11, 5, 7], [5, 5, 8], [7, 8, 18]]
        for algorithm in Algorithm:
            assert gram_matrix(items, algorithm).values == expected

    def test_single_leaf(self):
        assert gram_matrix([TreeLanguage.parse(["a"])]).values == [[1]]

    def test_moschitti_rejects_sets(self, trio):
        with pytest.raises(AlgorithmUnsupportedError):
            gram_matrix([TreeLanguage([trio["t1"], trio["t2"]])], "moschitti")

    def test_mixed_modes(self):
        with pytest.raises(ModeMismatchError):
            gram_matrix([TreeLanguage.parse(["a"]), TreeLanguage.parse(["a"], Mode.UNORDERED)])

    def test_csv(self, trio):
        gram = gram_matrix([TreeLanguage([trio["t1"]]), TreeLanguage([trio["t2"]])], labels=["x", "y"])
        assert gram.to_csv() == ",x,y\nx,11,5\ny,5,5\n"

    def test_threads_same_result(self):
        rng = random.Random(8)
        items = [random_language(rng, Mode.ORDERED) for _ in range(8)]
        assert gram_matrix(items, threads=4).values == gram_matrix(items).values

    def test_positive_semidefinite(self):
        rng = random.Random(9)
        items = [random_language(rng, Mode.UNORDERED) for _ in range(10)]
        m = np.array(gram_matrix(items).values, dtype=float)
        assert np.allclose(m, m.T)
        assert np.linalg.eigvalsh(m).min() >= -1e-9 * max(1.0, np.abs(m).max())


def test_product_series_is_pointwise_product(trio):
    x = TreeLanguage([trio["t1"], trio["t2"]])
    ax, ay = StAutomaton.from_language(x), StAutomaton.from_tree(trio["t3"])
    expected = subtree_series(x).hadamard(subtree_series(trio["t3"]))
    assert hadamard_accessible(ax, ay).to_series(ax) == expected
    assert isinstance(expected, TreeSeries)
