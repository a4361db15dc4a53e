"""Exception types shared across the package."""


class OtmlabError(Exception):
    """Base class for all package errors."""


class DomainError(OtmlabError, ValueError):
    """Inputs fall outside an operation's mathematical domain."""


class NumericalError(OtmlabError, RuntimeError):
    """A numerical routine failed to reach its target accuracy."""


class InfeasibleBudgetError(DomainError):
    """No strike level can match the requested budget."""


class DegenerateDistributionError(DomainError):
    """A payoff distribution has zero variance, so ratio statistics are undefined."""
