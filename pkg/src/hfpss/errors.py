"""Exception hierarchy shared by the engine modules."""


class HfpssError(Exception):
    """Base class for all engine errors."""


class CompositionNonzero(HfpssError):
    pass


class InvalidModule(HfpssError):
    pass


class OracleLimitExceeded(HfpssError):
    pass


class NonTerminating(HfpssError):
    pass


class WindowExceeded(HfpssError):
    pass


class NoConsistentAssignment(HfpssError):
    pass


class AmbiguousAssignment(HfpssError):
    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates or {}


class LeibnizInconsistent(HfpssError):
    pass


class UnknownScenario(HfpssError):
    pass


class ParseError(HfpssError):
    pass
