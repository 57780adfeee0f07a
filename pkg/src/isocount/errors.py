"""Exception hierarchy shared by all modules.

Domain errors map to CLI exit code 1, resource errors to exit code 2.
"""


class IsocountError(Exception):
    pass


class DomainError(IsocountError):
    """Invalid input for an operation (bad index, non-coprime residue, ...)."""


class PreconditionFailed(DomainError):
    """A stated mathematical precondition does not hold for the given input."""


class ZeroKernel(DomainError):
    """Requested a basis of a kernel that is the zero subspace."""


class NoPointFound(DomainError):
    """No acceptable rational/algebraic point found under the search schedule."""


class ResourceBudgetError(IsocountError):
    """Work estimate exceeds the configured budget; never silently truncate."""


class PrecisionExhausted(ResourceBudgetError):
    """Certified comparison still undecided at the precision cap."""


class InternalConsistencyError(IsocountError):
    """A fact guaranteed by construction failed a re-verification; fatal."""
