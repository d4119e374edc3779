"""Exception types raised across the package."""


class ClusteringError(Exception):
    """Base class for all package errors."""


class InputError(ClusteringError, ValueError):
    """Malformed or inconsistent input."""


class CleanError(ClusteringError):
    """Tree cleaning found no non-singleton leaf to attach points to."""


class InfeasibleError(ClusteringError):
    """No pruning with the requested number of clusters exists."""


class GenError(ClusteringError):
    """A generator could not satisfy its requested guarantees."""


class ScaleError(ClusteringError):
    """An exhaustive oracle was asked to enumerate too many candidates."""
