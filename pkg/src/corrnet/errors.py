"""Exception types shared across the package."""


class CorrnetError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(CorrnetError):
    """Malformed or inconsistent input file content.

    Messages carry 1-based line numbers so CLI users can locate the
    offending row.
    """


class AlignmentError(CorrnetError):
    """Panel alignment could not produce a usable shared calendar."""
