"""Exception types shared across the package."""


class ArgStructError(Exception):
    """Base class for every error raised by argstruct."""


# spans and analyses
class NonAdjacent(ArgStructError):
    pass


class Overlap(ArgStructError):
    pass


class InvalidAnalysis(ArgStructError):
    pass


class BoundExceeded(ArgStructError):
    pass


# catalog
class MissingField(ArgStructError):
    pass


class DuplicateName(ArgStructError):
    pass


class UnknownRelation(ArgStructError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# argument layer
class SchemaMismatch(ArgStructError):
    pass


class CycleDetected(ArgStructError):
    pass


class DisconnectedFragment(ArgStructError):
    pass


class MultipleRoots(ArgStructError):
    pass


class InvalidStructure(ArgStructError):
    pass


class MissingArgumentativeSection(ArgStructError):
    pass


class SectionOrderViolation(ArgStructError):
    pass


class DuplicateSection(ArgStructError):
    pass


# planning and refinement
class RequirementsUnmet(ArgStructError):
    pass


class Contradiction(ArgStructError):
    pass


class NoPlan(ArgStructError):
    pass


class DepthExceeded(ArgStructError):
    pass


class UnmappedForm(ArgStructError):
    pass


class NonArgumentativeTarget(ArgStructError):
    pass


class SharedPremise(ArgStructError):
    """A proposition feeds more than one link, so it cannot be one text unit."""


# contract graphs
class DanglingReference(ArgStructError):
    pass


class SpanOutOfRange(ArgStructError):
    pass


class SelfLoop(ArgStructError):
    pass


class MalformedTree(ArgStructError):
    pass


class UnknownNode(ArgStructError):
    pass


# export
class UnsupportedFormat(ArgStructError):
    pass
