"""Exception hierarchy shared by the library and the CLI."""


class ClassifierError(Exception):
    """Base class for every error raised by this package."""


class UnitarityError(ClassifierError, ValueError):
    """A matrix that must be unitary is not.

    Attributes:
        deviation: Frobenius norm of ``U^dagger U - I``.
    """

    def __init__(self, deviation: float, tol: float):
        self.deviation = float(deviation)
        self.tol = tol
        super().__init__(f"matrix is not unitary: ||U^dag U - I|| = {deviation:.3e} > {tol:.1e}")


class DimensionError(ClassifierError, ValueError):
    pass


class LimitError(ClassifierError, ValueError):
    pass


class SpecError(ClassifierError, ValueError):
    """Malformed circuit, encoding or configuration."""


class SharedParameterError(SpecError):
    """A trained parameter enters more than one physical phase."""


class DataError(ClassifierError, ValueError):
    pass


class NumericError(ClassifierError, ArithmeticError):
    pass
