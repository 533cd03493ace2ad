"""Exception taxonomy.

Two families matter to callers (and to the CLI exit-code contract):

* :class:`ValidationError` - the data parsed fine but its values are
  semantically unacceptable (exit code 1 in the CLI).
* :class:`FileFormatError` - a file or directory is structurally broken
  (exit code 2 in the CLI, alongside the built-in ``OSError``).
"""


class EcodivError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(EcodivError):
    """Semantically invalid values in otherwise well-formed input."""


class DuplicateLabelError(ValidationError):
    """The same species label appears more than once."""


class NegativeWeightError(ValidationError):
    """An abundance, share or count is negative (or not a finite number)."""


class SumOutOfToleranceError(ValidationError):
    """Raw shares do not sum to their nominal total; the data is corrupt,
    not merely rounded."""


class AllZeroError(ValidationError):
    """No species carries any weight (or there are no species at all)."""


class UnmappedLabelError(ValidationError):
    """A species label is missing from the taxonomy being applied."""


class NegativeOrderError(ValidationError):
    """Diversity order q must be >= 0."""


class ValueOutOfRangeError(ValidationError):
    """A value lies outside the mathematical range of its index."""


class SharedExceedsTotalError(ValidationError):
    """Shared line count exceeds the smaller of the two code bases."""


class UnknownLabelError(ValidationError):
    """A shared-code pair references a species with no declared size."""


class MissingSpeciesError(ValidationError):
    """The similarity matrix does not cover every species present."""


class ConflictingPairError(ValidationError):
    """The same species pair is given two different similarity values."""


class DuplicateFineLabelError(ValidationError):
    """A taxonomy maps the same fine label twice."""


class InvalidModelError(ValidationError):
    """A survival-model parameter is outside its allowed range."""


class TooFewSnapshotsError(ValidationError):
    """The operation needs more snapshots than the series contains."""


class InvalidGridError(ValidationError):
    """A start:stop:steps grid string is malformed."""


class FileFormatError(EcodivError):
    """Structural problem with an input file or directory."""


class ParseError(FileFormatError):
    """Malformed content; carries the file path and 1-based line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = int(line)
        super().__init__(f"{self.path}:{self.line}: {message}")


class BadFilenameError(FileFormatError):
    """A series file name does not encode a valid UTC timestamp."""


class DuplicateTimestampError(FileFormatError):
    """Two series files carry the same timestamp."""
