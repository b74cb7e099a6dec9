"""Exception hierarchy shared by every module."""


class RCPrefactorError(Exception):
    """Base class for library errors."""


class ValidationError(RCPrefactorError, ValueError):
    """Input data violates a structural requirement."""


class ZeroPatternMismatch(ValidationError):
    pass


class NotStochastic(ValidationError):
    pass


class NegativeEntry(ValidationError):
    pass


class SymbolOutOfRange(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ImpossibleType(ValidationError):
    """Joint type puts positive count on a zero-probability cell."""


class DegenerateColumn(ValidationError):
    pass


class NormalizationFailure(RCPrefactorError):
    pass


class InfiniteAtom(RCPrefactorError):
    """Moments requested for a law carrying mass at minus infinity."""


class ZeroVariance(RCPrefactorError):
    pass


class IrregularScenario(RCPrefactorError):
    pass


class NotInF(RCPrefactorError):
    """Output sequence does not put more than delta mass on the distinguishing set."""


class InfeasibleDelta(RCPrefactorError, ValueError):
    pass


class BudgetExceeded(RCPrefactorError):
    """Exact computation would exceed the configured work budget."""


class AtomExplosion(BudgetExceeded):
    pass


class MemoryBudget(BudgetExceeded):
    pass


class DegenerateFit(RCPrefactorError):
    pass
