"""Sonnet generation by hard-constrained backward beam search, with an
independent meter/rhyme/grammar linter."""

__version__ = "0.1.0"

from .errors import FormatError, GenerationError, SearchError, SonneteerError  # noqa: F401
from .forms import FORMS, SHORT, SONNET, Form  # noqa: F401
from .phonodict import (  # noqa: F401
    PENTAMETER,
    PronouncingDict,
    Pronunciation,
    Relaxations,
    load_cmu_dict,
    parse_cmu_dict,
)
