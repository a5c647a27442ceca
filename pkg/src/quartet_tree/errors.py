"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class QuartetTreeError(Exception):
    exit_code = 1


class InputError(QuartetTreeError, ValueError):
    """Malformed or out-of-range input (bad matrix, n < 4, size mismatch)."""

    exit_code = 2


class DegenerateTableError(QuartetTreeError):
    """All trees have equal cost (M == m), so S(T) is undefined."""

    exit_code = 3


class AgreementTimeout(QuartetTreeError):
    """Agreement search hit its tree cap before the runs agreed.

    ``snapshots`` holds the best ScoredTree of every run at the moment of
    giving up.
    """

    exit_code = 4

    def __init__(self, message, snapshots=()):
        super().__init__(message)
        self.snapshots = list(snapshots)


class EnumerationCapError(QuartetTreeError):
    exit_code = 5
