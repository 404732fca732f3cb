"""Exception hierarchy shared by every hamlie module.

Every error knows how to render itself as the ``{"error": ...}`` dict the CLI
prints in ``--json`` mode.
"""


class HamlieError(Exception):
    """Base class; ``details`` are extra keys for the error dict."""

    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        payload = {"error": self.message, "kind": type(self).__name__}
        payload.update({k: v for k, v in self.details.items() if v is not None})
        return payload


class ConfigError(HamlieError):
    exit_code = 2


class ShapeError(HamlieError):
    pass


class LatticeError(HamlieError):
    """Lattice validation failure; ``index_kind`` is one of p, q, r, basis."""

    def __init__(self, message, index_kind=None, index=None, **details):
        super().__init__(message, index_kind=index_kind, index=index, **details)
        self.index_kind = index_kind
        self.index = index


class AlgebraMismatchError(HamlieError):
    pass


class ElementError(HamlieError):
    pass


class FieldError(HamlieError):
    """A scalar root needed by the computation does not exist in the working field."""


class SolveError(HamlieError):
    """Inconsistent exact linear system; ``row`` names the violated equation."""

    def __init__(self, message, row=None, **details):
        super().__init__(message, row=row, **details)
        self.row = row


class DerivationError(HamlieError):
    pass


class IsomorphismError(HamlieError):
    pass


class CocycleError(HamlieError):
    pass


class ParseError(HamlieError):
    exit_code = 2

    def __init__(self, message, line=None, column=None, clause=None):
        super().__init__(message, line=line, column=column, clause=clause)
        self.line = line
        self.column = column
        self.clause = clause

    def __str__(self):
        where = f"line {self.line}, column {self.column}" if self.line is not None else "input"
        clause = f" in {self.clause}" if self.clause else ""
        return f"{where}{clause}: {self.message}"
