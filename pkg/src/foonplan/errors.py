"""Exception hierarchy shared across the planner."""

from __future__ import annotations


class FoonError(Exception):
    """Base class for every error raised by foonplan."""


class IdentifierConflict(FoonError):
    """Two different subgraphs were merged under the same recipe id."""


class ParseError(FoonError):
    def __init__(self, message: str, line: int, column: int = 1, source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class VectorFileError(FoonError):
    pass


class ConfigError(FoonError):
    pass


class NoVerbError(FoonError):
    """No motion verb is known for a state, even at category level."""


class UnknownDishClass(FoonError):
    pass


class UnreachableItem(FoonError):
    def __init__(self, item):
        self.item = item
        super().__init__(f"item {item} is neither in the kitchen nor producible")


class ModificationError(FoonError):
    """Base for per-ingredient failures during tree modification."""

    def __init__(self, ingredient: str, message: str):
        self.ingredient = ingredient
        super().__init__(message)


class NotFound(ModificationError):
    pass


class UnconvertibleState(ModificationError):
    pass


class UnplaceableIngredient(ModificationError):
    pass


class NoAttachmentPoint(ModificationError):
    pass


class PruneConflict(ModificationError):
    pass


class OracleTooLarge(FoonError):
    pass


class IncompleteLabels(FoonError):
    pass
