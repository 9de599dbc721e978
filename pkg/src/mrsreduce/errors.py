"""Exception hierarchy shared by all modules."""


class MRSError(Exception):
    """Base class; ``order`` is filled in by the driver when known."""

    order = None

    def with_order(self, order):
        self.order = order
        return self


class ParseError(MRSError, ValueError):
    pass


class DivisionByZero(MRSError, ZeroDivisionError):
    def __init__(self, what="0"):
        super().__init__(f"division by zero: {what}")
        self.what = what


class NonInvertibleAlgebraic(MRSError):
    """A declared minimal polynomial turned out reducible during an inversion."""

    def __init__(self, generator, factor):
        super().__init__(
            f"minimal polynomial of {generator} is reducible; found factor {factor}")
        self.generator = generator
        self.factor = factor


class NonCommuting(MRSError):
    def __init__(self, i, j):
        super().__init__(f"maps {i} and {j} do not commute")
        self.pair = (i, j)


class EigenvalueOutsideTower(MRSError):
    def __init__(self, factor):
        super().__init__(
            f"eigenvalues are roots of {factor}, which has no root in the constant tower; "
            "extend the tower and rerun")
        self.factor = factor


class NotOffDiagonal(MRSError):
    pass


class UpperBlockNonzero(MRSError):
    pass


class DiagonalNotAbelian(MRSError):
    def __init__(self, witness=None, msg="diagonal Lie algebra is not abelian"):
        super().__init__(msg)
        self.witness = witness


class SingularGauge(MRSError):
    pass


class MalformedHamiltonian(MRSError, ValueError):
    pass


class AllZero(MRSError, ValueError):
    pass


class Ve1NotReduced(MRSError):
    pass


class CurveMismatch(MRSError):
    def __init__(self, component, residual):
        super().__init__(f"curve does not solve X_H: component {component} "
                         f"has residual {residual}")
        self.component = component
        self.residual = residual


class DegreeCapExceeded(MRSError):
    pass


class Cancelled(MRSError):
    pass
