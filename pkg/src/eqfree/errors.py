"""Exception types shared across the package."""


class EqfreeError(Exception):
    """Base class for all package-specific errors."""


class InputError(EqfreeError):
    """Malformed user input: bad letters, bad ranks, bad flags."""


class NotABasisError(InputError):
    """The given subgroup generators are not a free basis."""


class AlphabetMismatchError(EqfreeError):
    """Two objects built over different signed alphabets were combined."""


class EmptyLanguageError(EqfreeError):
    """A witness was requested from a grammar with empty language."""


class MalformedPlanError(EqfreeError):
    """A derivation plan violates its well-formedness invariants."""


class GrammarCycleError(EqfreeError):
    """An epsilon- or unit-cycle makes derivation counts diverge."""


class AmbiguityError(EqfreeError):
    """A grammar required to be unambiguous provably is not."""


class BudgetExceededError(EqfreeError):
    """A brute-force enumeration would exceed the configured budget."""
