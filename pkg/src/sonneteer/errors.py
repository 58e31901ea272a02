"""Exception types shared across the package."""


class SonneteerError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(SonneteerError):
    """A resource file (dictionary, vectors, lexicon, model) is malformed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class GenerationError(SonneteerError):
    """A generation stage failed; the message names the stage."""


class SearchError(GenerationError):
    """Beam search exhausted every hypothesis for a rhyme word."""
