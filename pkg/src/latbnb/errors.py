"""Typed errors shared across the package."""


class LatbnbError(Exception):
    pass


class DependentColumns(LatbnbError):
    """Input columns are linearly dependent where independence is required."""


class RankDeficient(LatbnbError):
    """Matrix rows are linearly dependent where full row rank is required."""


class NoIntegralSolution(LatbnbError):
    """A x = b has no integer solution; doubles as an infeasibility certificate."""


class NegativeInput(LatbnbError):
    pass


class DimensionCapExceeded(LatbnbError):
    """Lattice rank exceeds the enumeration dimension cap."""


class WrongKind(LatbnbError):
    """Operation applied to the wrong reformulation kind."""


class InvalidPermutation(LatbnbError):
    pass
