"""Exception hierarchy shared by all modules."""


class CycloLRSError(Exception):
    """Base class for every error raised by the package."""


class ZeroElement(CycloLRSError, ValueError):
    pass


class NonIntegral(CycloLRSError, ValueError):
    pass


class NotRootOfUnity(CycloLRSError, ValueError):
    pass


class ValidationError(CycloLRSError, ValueError):
    pass


class ParseError(CycloLRSError, ValueError):
    pass


class BadInput(CycloLRSError, ValueError):
    pass


class EmptyS(CycloLRSError, ValueError):
    pass


class MissingConstant(CycloLRSError, ValueError):
    pass


class StructureError(CycloLRSError):
    """Parent of the errors that mean the sequence lacks the required structure."""


class ExceptionalParameter(StructureError):
    def __init__(self, reasons):
        self.reasons = list(reasons)
        super().__init__("parameter lies in the exceptional set: " + "; ".join(self.reasons))


class DegenerateTerm(StructureError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"U_{n} equals its dominant term (remainder vanishes)")


class StructureViolation(StructureError):
    def __init__(self, n, reason):
        self.n = n
        self.reason = reason
        super().__init__(f"structure violated at n={n}: {reason}")


class DegenerateGap(StructureError):
    """No usable dominant root (tie for maximal modulus, or |alpha_1| <= 1)."""


class BudgetError(CycloLRSError):
    """Parent of errors raised when a computational budget runs out."""


class FactorizationTimeout(BudgetError):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class CapExceeded(BudgetError):
    def __init__(self, n, window, cap):
        self.n = n
        self.window = window
        self.cap = cap
        super().__init__(f"n={n}: search window {window} exceeds height cap {cap}")


class IncompleteFactorization(CycloLRSError):
    pass


class UniverseTooSmall(CycloLRSError):
    def __init__(self, witnesses):
        self.witnesses = list(witnesses)
        super().__init__(
            "torsion witnesses found outside the working cyclotomic field: "
            + ", ".join(f"(r={r}, s={s}, u in Q(zeta_{cond}), {shape})" for r, s, cond, shape in self.witnesses)
        )


class NoConvergence(CycloLRSError):
    pass
