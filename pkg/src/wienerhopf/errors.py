"""Exception hierarchy shared by all modules."""


class WienerHopfError(Exception):
    """Base class for all domain errors raised by this package."""


class ExprSyntaxError(WienerHopfError):
    """Expression text failed to parse.

    Carries the byte offset of the failure and the set of token kinds
    that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += " (expected: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class EvalDomainError(WienerHopfError):
    """Evaluation hit a singularity (division by zero, log of zero)."""


class GridError(WienerHopfError):
    """Grid parameters are invalid or two grids are incompatible."""


class EmptyStripError(WienerHopfError):
    """Class arithmetic produced an empty common strip."""


class OnLineError(WienerHopfError):
    """Cauchy integral requested on its own contour; use plemelj_boundary."""


class OutsideDomainError(WienerHopfError):
    """A half-plane handle was evaluated outside its region of validity."""


class CrossLineMismatchError(WienerHopfError):
    """Two-line data are inconsistent with a single analytic function.

    The measured sup-norm discrepancy is available as ``discrepancy``.
    """

    def __init__(self, message, discrepancy):
        self.discrepancy = discrepancy
        super().__init__(f"{message} (discrepancy {discrepancy:.3e})")


class KernelVanishesError(WienerHopfError):
    """Kernel has a (near-)zero on the line or inside the strip."""


class NonIntegralIndexError(WienerHopfError):
    """Winding-number accumulation did not land near an integer."""


class IndexNotZeroError(WienerHopfError):
    """Factorization requires a zero-index kernel; run normalize_index first."""


class KernelLimitError(WienerHopfError):
    """Kernel does not approach 1 at the ends of the line."""


class InequivalentFactorizationsError(WienerHopfError):
    """Two factor pairs do not differ by a single constant."""


class UnderdeterminedProblemError(WienerHopfError):
    """Liouville polynomial degree > 0 leaves unknown coefficients."""


class NumericsWarning(UserWarning):
    """Advisory warning about degraded numerical conditions."""
