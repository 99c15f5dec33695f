"""Exception types raised across the package."""


class MorphtagError(Exception):
    """Base class for all data and model errors."""


# tagset
class EmptyTag(MorphtagError, ValueError):
    pass


class TagTooLong(MorphtagError, ValueError):
    pass


class EmptyTagsetError(MorphtagError, ValueError):
    pass


# corpus
class MalformedLine(MorphtagError, ValueError):
    pass


class EmptyCorpus(MorphtagError, ValueError):
    pass


class UnknownTag(MorphtagError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BadFoldId(MorphtagError, ValueError):
    pass


class InventoryMismatch(MorphtagError, ValueError):
    pass


# lexicon
class UnknownLabel(MorphtagError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MalformedLexiconLine(MorphtagError, ValueError):
    pass


# neural
class DimensionMismatch(MorphtagError, ValueError):
    pass


class NonFiniteValue(MorphtagError, FloatingPointError):
    pass


class NonFiniteGradient(NonFiniteValue):
    pass


class NonFiniteLoss(NonFiniteValue):
    pass


class EmptySequence(MorphtagError, ValueError):
    pass


class BadClassIndex(MorphtagError, IndexError):
    pass


class ModelFormatError(MorphtagError, ValueError):
    pass


# tagger
class MissingCoarseHint(MorphtagError, ValueError):
    pass


class UnexpectedCoarseHint(MorphtagError, ValueError):
    pass


class EmptySentence(MorphtagError, ValueError):
    pass


# eval
class AlignmentError(MorphtagError, ValueError):
    pass


class DegenerateBaseline(MorphtagError, ValueError):
    pass
