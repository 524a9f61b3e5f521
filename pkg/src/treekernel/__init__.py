"""Linear-time SubTree kernels between finite tree languages via root-weighted tree automata."""

from .errors import (
    AlgorithmUnsupportedError,
    AlphabetMismatchError,
    ArityError,
    BudgetExceededError,
    DuplicateTreeError,
    ExhaustedRetriesError,
    InvariantViolation,
    ModeMismatchError,
    TreeKernelError,
    TreeSyntaxError,
    UnknownStateError,
    UnknownSymbolError,
    WeightOverflowError,
)
from .kernel import (
    Algorithm,
    GramMatrix,
    ProductResult,
    gram_matrix,
    hadamard_accessible,
    language_kernel,
    moschitti_kernel,
    subtree_kernel,
)
from .rwta import Rwta
from .st_automaton import (
    StAutomaton,
    build_from_language,
    build_from_tree,
    union,
    union_into,
)
from .trees import (
    Mode,
    RankedAlphabet,
    Tree,
    TreeLanguage,
    TreeSeries,
    brute_force_kernel,
    canonicalize,
    parse_tree,
    serialize_tree,
    subtree_series,
    subtree_set,
)

__version__ = "0.1.0"
