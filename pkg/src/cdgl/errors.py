"""Exception hierarchy shared by every module of the package."""


class CdglError(Exception):
    """Base class for all library errors."""


class WindowTooNarrow(CdglError):
    pass


class AlgebraMismatch(CdglError):
    pass


class PresentationMismatch(CdglError):
    pass


class DegreeError(CdglError):
    pass


class ValidationError(CdglError):
    """A presentation or script failed semantic validation."""


class MissingFiltration(CdglError):
    pass


class ShapeError(CdglError):
    pass


class NotAMorphism(CdglError):
    def __init__(self, message, generator=None, residue=None):
        super().__init__(message)
        self.generator = generator
        self.residue = residue


class ResidualNonzero(CdglError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class VariantMismatch(CdglError):
    pass


class RuleIncompatible(CdglError):
    pass


class DslSyntaxError(CdglError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownGenerator(CdglError):
    def __init__(self, name, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"unknown generator {name!r}{where}")
        self.name = name
        self.line = line
        self.column = column
