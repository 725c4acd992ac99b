"""Exception hierarchy.

Exit codes used by the CLI hang off the three top-level families:
configuration (2), data (3) and numerics (4).
"""


class PanelShrinkError(Exception):
    exit_code = 1


class ConfigError(PanelShrinkError):
    exit_code = 2


class DataError(PanelShrinkError):
    exit_code = 3


class NumericError(PanelShrinkError):
    exit_code = 4


class EmptyPanelError(DataError):
    def __init__(self):
        super().__init__("panel has no series (N=0)")


class TooShortError(DataError):
    def __init__(self, T, minimum=3):
        self.T = T
        super().__init__(f"series length T={T} is below the minimum of {minimum}")


class NonFiniteError(DataError):
    def __init__(self, row, col):
        self.row, self.col = row, col
        super().__init__(f"non-finite entry at (row={row}, col={col})")


class DegenerateSeriesError(DataError):
    def __init__(self, index=None, reason="sum of squared lagged values is zero"):
        self.index = index
        where = "" if index is None else f" (series {index})"
        super().__init__(f"degenerate series{where}: {reason}")


class ParseError(DataError):
    def __init__(self, line, col, text):
        self.line, self.col = line, col
        super().__init__(f"cannot parse {text!r} at line {line}, column {col}")


class RaggedRowsError(DataError):
    def __init__(self, line, expected, got):
        self.line = line
        super().__init__(f"line {line} has {got} fields, expected {expected}")


class InvalidDfError(ConfigError):
    def __init__(self, T):
        super().__init__(f"need T >= 3 for T-2 degrees of freedom, got T={T}")


class InvalidTauError(ConfigError):
    pass


class MissingHyperParamsError(ConfigError):
    pass


class MissingShrunkVarianceError(ConfigError):
    pass


class InvalidPriorError(ConfigError):
    pass


class NonFiniteLikelihoodError(NumericError):
    pass


class NoConvergenceError(NumericError):
    """Fixed-point iteration hit its cap; ``hyperparams`` holds the last iterate."""

    def __init__(self, hyperparams, iterations):
        self.hyperparams = hyperparams
        self.iterations = iterations
        super().__init__(f"no convergence after {iterations} iterations")
