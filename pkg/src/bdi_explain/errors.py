"""Exception hierarchy shared by the library and the CLI."""


class ExplainError(Exception):
    """Base class for all errors raised by this package."""


class TreeFormatError(ExplainError, ValueError):
    """A tree or trace document is malformed or violates a structural invariant."""


class UnknownNodeError(ExplainError, KeyError):
    def __init__(self, node_id: str):
        super().__init__(node_id)
        self.node_id = node_id

    def __str__(self) -> str:
        return f"unknown node id {self.node_id!r}"


class NotAnActionError(ExplainError, ValueError):
    """A query that needs an action node was given a goal node."""


class NoCommonAncestorError(ExplainError, ValueError):
    """``ca`` was asked for a pair with no strict closest common ancestor."""


class NotInTraceError(ExplainError):
    """The fact was never performed, so the only honest answer is "I didn't"."""

    def __init__(self, node_id: str):
        super().__init__(f"I didn't do {node_id}")
        self.node_id = node_id


class InvalidFoilError(ExplainError):
    def __init__(self, fact: str, foil: str):
        super().__init__(f"{foil!r} is not a valid foil for {fact!r}")
        self.fact = fact
        self.foil = foil


class NoValidFoilsError(ExplainError):
    def __init__(self, fact: str):
        super().__init__(f"{fact!r} has no valid foils, so an implicit contrastive question has no answer")
        self.fact = fact
