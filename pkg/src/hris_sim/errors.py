"""Exception types shared across the simulator.

Two broad failure families exist: problems with user-supplied configuration
(rejected before any computation starts) and problems that make an estimation
task mathematically unsolvable for an otherwise valid setup.  The command line
front end maps the former to exit code 2 and the latter to exit code 3.
"""


class HrisSimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HrisSimError):
    """Invalid or malformed run configuration."""


class InfeasibleError(HrisSimError):
    """An estimation task cannot be carried out for the given setup."""


class IdentifiabilityError(InfeasibleError):
    """A linear system does not constrain all unknowns (rank deficiency)."""


class EstimationInfeasibleError(InfeasibleError):
    """A scenario is degenerate beyond rank issues (e.g. zero sensed gain)."""
