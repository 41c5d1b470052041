"""Exception hierarchy shared by all qedkit modules.

Two families matter to callers: input problems (``DomainError`` and friends,
which subclass ``ValueError``) and numerical trouble (``NumericalError`` and
friends).  The command-line front end maps the first family to exit code 2
and the second to exit code 3.
"""


class QedkitError(Exception):
    """Base class for every error raised by qedkit."""


class DomainError(QedkitError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class InstabilityError(DomainError):
    """The requested steady state does not exist (load too high)."""


class MethodInapplicableError(DomainError):
    """A specific solution route does not apply to the given inputs.

    Callers usually respond by switching to an alternative route, for
    instance from a zeta series to quadrature.
    """


class NumericalError(QedkitError, ArithmeticError):
    """A numerical routine failed to deliver a trustworthy value."""


class ConvergenceError(NumericalError):
    """An iterative scheme did not converge within its budget."""


class ConsistencyError(NumericalError):
    """Two independent evaluation routes disagree beyond tolerance."""


class RunawayError(NumericalError):
    """A simulated queue grew past its guard and looks unstable."""
