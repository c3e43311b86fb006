"""Exception types shared across the package."""


class TubalError(Exception):
    """Base class for all tubalkit errors."""


class DimensionMismatch(TubalError):
    pass


class ImaginaryResidualTooLarge(TubalError):
    pass


class SingularFrequencySlice(TubalError):
    def __init__(self, slice_index, message=None):
        self.slice_index = slice_index
        super().__init__(message or f"frequency slice {slice_index} is singular")


class NotOrthonormal(TubalError):
    pass


class IndexOutOfRange(TubalError):
    pass


class RankOutOfRange(TubalError):
    pass


class RankDeficientSystem(TubalError):
    pass


class EmptySampleSet(TubalError):
    pass


class InsufficientSamples(TubalError):
    pass


class NonPositiveRse(TubalError):
    pass


class TooShort(TubalError):
    pass


class ZeroTruth(TubalError):
    pass


class BadMagic(TubalError):
    pass


class TruncatedFile(TubalError):
    pass


class DimOverflow(TubalError):
    pass


class TimeoutExceeded(TubalError):
    pass
