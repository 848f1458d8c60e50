"""Exception hierarchy shared by the package and mapped to CLI exit codes."""


class EfasError(Exception):
    """Base class for all package errors."""


class ConfigError(EfasError, ValueError):
    """Invalid scenario or run configuration (CLI exit code 1)."""


class DimensionError(ConfigError):
    """Matrix shapes are not conformable."""


class InfeasibleError(ConfigError):
    """Requested operating point cannot exist, e.g. more ZF users than antennas."""


class DegenerateChannelError(ConfigError):
    """Every channel variance is zero, so all metrics are undefined."""


class NumericalError(EfasError, ArithmeticError):
    """A numerical routine failed or left its valid range (CLI exit code 2)."""


class NumericalDomainError(NumericalError, ValueError):
    """Argument outside the domain of a special function or physical formula."""


class SingularChannelError(NumericalError):
    """Channel matrix is rank deficient or above the condition-number cap."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested accuracy."""
