"""Exception types raised by negolab."""


class NegolabError(Exception):
    """Base class for all library errors."""


class DomainError(NegolabError, ValueError):
    """A utility was evaluated outside its natural region."""


class DegenerateInputError(NegolabError, ValueError):
    """Inputs are well-typed but numerically degenerate (vanishing gradients, empty grids)."""


class InfeasibleObjectiveError(NegolabError):
    """The objective is -inf on every candidate point of the search grid."""


class NegotiationDefault(NegolabError):
    """A method produced no admissible settlement; the status quo stands."""


class ScenarioError(NegolabError, ValueError):
    """Scenario file failed to parse or validate.

    ``field`` is the dotted path of the offending entry and ``line`` the
    1-based source line when it can be located.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(f"field '{field}'")
        if line:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
