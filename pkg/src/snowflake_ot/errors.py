"""Exception types raised across the package.

Input problems derive from ``ValueError`` so callers can catch them
generically; solver failures derive from ``RuntimeError``.
"""


class SnowflakeOTError(Exception):
    """Base class for all package errors."""


class InputError(SnowflakeOTError, ValueError):
    """Malformed or out-of-range input."""


# metric spaces

class InvalidMetric(InputError):
    pass


class NonzeroDiagonal(InvalidMetric):
    def __init__(self, i):
        self.i = i
        super().__init__(f"nonzero diagonal entry d[{i}][{i}]")


class Asymmetric(InvalidMetric):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"asymmetric entries d[{i}][{j}] != d[{j}][{i}]")


class NegativeOrZeroOffDiagonal(InvalidMetric):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"non-positive off-diagonal distance d[{i}][{j}]")


class TriangleViolation(InvalidMetric):
    def __init__(self, i, j, k):
        self.i, self.j, self.k = i, j, k
        super().__init__(f"triangle inequality fails: d[{i}][{j}] > d[{i}][{k}] + d[{k}][{j}]")


class AlphaOutOfRange(InputError):
    pass


class SinglePoint(InputError):
    pass


class SizeLimitExceeded(InputError):
    pass


TooLarge = SizeLimitExceeded


# transport

class DimensionMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class EndpointInShared(InputError):
    pass


class SolverNonconvergence(SnowflakeOTError, RuntimeError):
    """The transport solver failed to certify optimality (internal bug)."""


# embedding

class PEqualsOne(InputError):
    pass


class PartitionGap(SnowflakeOTError):
    pass


class EmptyInput(InputError):
    pass


# markov

class InvalidChain(InputError):
    pass


class NotStochastic(InvalidChain):
    pass


class NotStationary(InvalidChain):
    pass


class NotReversible(InvalidChain):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"detailed balance fails at ({i}, {j})")


class DegenerateChain(InputError):
    pass


class AsymmetricPsi(InputError):
    pass


class YOutOfRange(InputError):
    pass


class EmptyCandidates(InputError):
    pass


# inequalities

class ConstraintViolated(InputError):
    def __init__(self, i, j, gap):
        self.i, self.j, self.gap = i, j, gap
        super().__init__(f"row/column constraint violated at ({i}, {j}) by {gap:.3e}")


class NegativeEntry(InputError):
    pass


class NotAPermutation(InputError):
    pass


class DegenerateWeights(InputError):
    pass


class ZeroDistance(InputError):
    pass


class MissingVertex(InputError):
    pass


# graphs

class SizeMismatch(ShapeMismatch):
    pass


class KZero(InputError):
    pass


class Disconnected(InputError):
    pass


class NotRegular(InputError):
    pass


class DegreeLTTwo(InputError):
    pass


# file formats

class MalformedInput(InputError):
    """A JSON input file does not follow its schema."""

    def __init__(self, source, field, problem):
        self.source, self.field, self.problem = source, field, problem
        super().__init__(f"{source}: field '{field}': {problem}")


class UnknownSubcommand(InputError):
    pass
