"""Exception types shared across the toolkit.

Everything user-addressable (bad files, bad arguments, stale sessions)
derives from HatescanError so the CLI can map it to exit code 2 and the
HTTP layer to a 4xx body. Anything else escaping a command is a bug and
maps to exit code 1 / HTTP 500.
"""


class HatescanError(Exception):
    """Base class for all anticipated, user-addressable failures."""


class FormatError(HatescanError):
    """A file does not conform to its documented format."""


class InvalidInputError(HatescanError):
    """An operation was called with values outside its domain."""


class ConsistencyError(HatescanError):
    """Inputs produced under different lexicon versions were mixed."""


class OovError(HatescanError):
    """A query or seed term is not in the vector store vocabulary."""


class TrainingError(HatescanError):
    """Embedding training cannot proceed (e.g. degenerate vocabulary)."""


class SessionStateError(HatescanError):
    """An operation was attempted on a session in the wrong state."""


class StaleSessionError(SessionStateError):
    """The lexicon changed since the session was opened."""


class DuplicateDecisionError(SessionStateError):
    """A term in this session has already been decided."""


class NotInQueueError(SessionStateError):
    """A decision was submitted for a term that was never suggested."""
