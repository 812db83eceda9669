"""Error taxonomy shared by the library, the HTTP service, and the CLI.

Every error carries a stable machine code (used in service error envelopes)
and the process exit code the CLI maps it to.
"""
from __future__ import annotations

EX_OK = 0
EX_VALIDATION = 2
EX_BELOW_THRESHOLD = 3
EX_USAGE = 64
EX_DATA = 65
EX_NOINPUT = 66


class ReweaveError(Exception):
    code = "error"
    exit_code = 1


class UsageError(ReweaveError):
    """Bad flag or malformed request parameter."""

    code = "usage"
    exit_code = EX_USAGE


class NoInputError(ReweaveError):
    """Missing or empty input file."""

    code = "no_input"
    exit_code = EX_NOINPUT


class DataError(ReweaveError):
    """Input exists but its content is unusable (parse error, unknown id)."""

    code = "data"
    exit_code = EX_DATA


class ValidationFailure(ReweaveError):
    """Corpus or model content violates an invariant."""

    code = "validation"
    exit_code = EX_VALIDATION


class UnknownFragmentError(DataError):
    """A probability was requested for a fragment string absent from the corpus."""


class NoSchemaError(DataError):
    """Generation was asked to run against a model with no usable schema."""


class NoFragmentCandidateError(DataError):
    """A schema placeholder has an empty fragment dataset (hand-edit damage)."""


class BelowThresholdError(ReweaveError):
    """Best candidate fell below the requested minimum weight.

    Carries the best candidate so callers can inspect what was rejected.
    """

    code = "below_threshold"
    exit_code = EX_BELOW_THRESHOLD

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
