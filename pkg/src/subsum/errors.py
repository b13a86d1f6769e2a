"""Exception hierarchy. Each family carries the CLI exit status it maps to."""

from __future__ import annotations


class SubsumError(Exception):
    exit_code = 5


class InputError(SubsumError):
    exit_code = 2


class MalformedSrt(InputError):
    pass


class MalformedTimecode(MalformedSrt):
    pass


class NonMonotonicIds(MalformedSrt):
    pass


class OverlapError(MalformedSrt):
    """A cue whose start is not before its end."""


class EmptyTrack(InputError):
    pass


class MismatchedTracks(InputError):
    pass


class TooFewAlgorithms(InputError):
    pass


class MissingWeight(InputError):
    pass


class MissingLexicons(InputError):
    pass


class EmptySelection(InputError):
    pass


class EmptyCorpus(InputError):
    pass


class MalformedWav(InputError):
    pass


class UndefinedEfficiency(SubsumError):
    pass


class EmptyReference(SubsumError):
    """The intersection reference is empty, so no algorithm can be ranked."""


class DegenerateTrack(SubsumError):
    exit_code = 4


class AsrError(SubsumError):
    exit_code = 3


class AuthError(AsrError):
    pass


class BackendUnreachable(AsrError):
    """Transient backend failure; retried before the chunk is flagged."""


class NoSpeechRecognized(AsrError):
    pass


class UnknownTerm(SubsumError, KeyError):
    pass
