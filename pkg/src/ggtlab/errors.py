"""Exception types shared by all modules.

Each error carries a short machine-readable ``code`` that the command line
front end maps onto exit statuses.
"""


class GgtError(Exception):
    code = "module-error"


class ValidationError(GgtError):
    code = "validation"

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class HypothesisViolation(GgtError):
    """Inputs fall outside the hypotheses an operation relies on."""
    code = "hypotheses-violated"

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class PrecisionError(GgtError):
    """A numeric certificate could not be reached at working precision."""
    code = "precision"


class TruncationError(GgtError):
    """An enumeration hit its budget before finishing."""
    code = "truncated"

    def __init__(self, message, achieved_radius=None, partial=None):
        super().__init__(message)
        self.achieved_radius = achieved_radius
        self.partial = partial


class NotInHullError(GgtError):
    """Target point lies outside the convex hull of the given set."""
    code = "not-in-hull"

    def __init__(self, message, certificate=None):
        super().__init__(message)
        # (normal, offset): normal . s <= offset for all s in S, normal . x > offset
        self.certificate = certificate


class NotMinimalError(GgtError):
    code = "not-minimal"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NoCodimensionOneEvidence(GgtError):
    code = "no-codim-1"


class BudgetExceeded(GgtError):
    code = "budget"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
