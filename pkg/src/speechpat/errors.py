"""Exception hierarchy.

Data errors (bad input files, inconsistent tables) derive from ``DataError``
so the command line can map them to exit code 2.
"""


class SpeechPatError(Exception):
    pass


class DataError(SpeechPatError):
    pass


class MalformedWav(DataError):
    pass


class UnsupportedFormat(DataError):
    pass


class SignalTooShort(DataError):
    pass


class BinMismatch(SpeechPatError, ValueError):
    pass


class EmptyInput(SpeechPatError, ValueError):
    pass


class DimensionMismatch(SpeechPatError, ValueError):
    pass


class SingleClass(DataError):
    pass


class NoSplits(SpeechPatError):
    pass


class TooFewSamples(DataError):
    pass


class EmptyConfusion(SpeechPatError, ValueError):
    pass


class LengthMismatch(SpeechPatError, ValueError):
    pass


class InvalidSpec(SpeechPatError, ValueError):
    pass


class DuplicateId(DataError):
    pass


class IdMismatch(DataError):
    pass


class ManifestError(DataError):
    pass
