"""Exception hierarchy shared by all modules."""


class SpheresError(Exception):
    """Base class; every error the CLI reports derives from this."""

    code = "error"


# finite fields
class CompositeCharacteristic(SpheresError, ValueError):
    code = "composite-characteristic"


class ReducibleModulus(SpheresError, ValueError):
    code = "reducible-modulus"


class FieldMismatch(SpheresError, TypeError):
    code = "field-mismatch"


class DivisionByZero(SpheresError, ZeroDivisionError):
    code = "division-by-zero"


# complexes
class FaceNotPresent(SpheresError, KeyError):
    code = "face-not-present"


class NotPure(SpheresError, ValueError):
    code = "not-pure"


class BudgetExceeded(SpheresError, RuntimeError):
    code = "budget-exceeded"


class MalformedComplex(SpheresError, ValueError):
    code = "malformed-complex"


# heffter
class NotPrimitive(SpheresError, ValueError):
    code = "not-primitive"


class BadResidue(SpheresError, ValueError):
    code = "bad-residue"


# surfaces
class NotASurface(SpheresError, ValueError):
    code = "not-a-surface"


class NotOrientable(SpheresError, ValueError):
    code = "not-orientable"


class DegeneratePairing(SpheresError, ValueError):
    code = "degenerate-pairing"


class ReroutingFailed(SpheresError, RuntimeError):
    code = "rerouting-failed"


# assembly
class NotARefinement(SpheresError, ValueError):
    code = "not-a-refinement"


class UnclassifiableRidge(SpheresError, ValueError):
    code = "unclassifiable-ridge"


class BadChoice(SpheresError, ValueError):
    code = "bad-choice"


class NonDiskCurve(SpheresError, ValueError):
    code = "non-disk-curve"


class BoundaryMismatch(SpheresError, ValueError):
    code = "boundary-mismatch"


class ChoiceLengthMismatch(SpheresError, ValueError):
    code = "choice-length-mismatch"


class ConfigError(SpheresError, ValueError):
    code = "config-error"
