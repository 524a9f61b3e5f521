"""Exception hierarchy shared by every module of the package."""


class TreeKernelError(Exception):
    pass


class TreeSyntaxError(TreeKernelError):
    """Malformed tree text. ``offset`` is the 0-based character position."""

    def __init__(self, message, offset, text=None):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
        self.text = text


class ArityError(TreeKernelError):
    pass


class DuplicateTreeError(TreeKernelError):
    pass


class UnknownSymbolError(TreeKernelError):
    pass


class UnknownStateError(TreeKernelError):
    pass


class BudgetExceededError(TreeKernelError):
    pass


class ModeMismatchError(TreeKernelError):
    pass


class AlphabetMismatchError(TreeKernelError):
    pass


class WeightOverflowError(TreeKernelError):
    pass


class AlgorithmUnsupportedError(TreeKernelError):
    pass


class ExhaustedRetriesError(TreeKernelError):
    pass


class InvariantViolation(TreeKernelError):
    pass
