"""Exception hierarchy shared by the frontends, the logic layer and the checker."""


class ReactmcError(Exception):
    """Base class for all errors raised by this package."""


class ModelFormatError(ReactmcError):
    """A model file (explicit LTS, net or task JSON) is malformed."""


class StateSpaceExceeded(ReactmcError):
    def __init__(self, max_states):
        super().__init__(f"state space exceeds the bound of {max_states} states")
        self.max_states = max_states


class CcsSyntaxError(ReactmcError):
    def __init__(self, message, line=None, column=None):
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class UnguardedChoice(CcsSyntaxError):
    """A ``+`` operand is not an action-prefixed term."""


class UndefinedIdentifier(ReactmcError):
    def __init__(self, name):
        super().__init__(f"agent identifier {name!r} has no defining equation")
        self.name = name


class UnguardedRecursion(ReactmcError):
    def __init__(self, name):
        super().__init__(f"agent identifier {name!r} is defined by unguarded recursion")
        self.name = name


class NotEnabled(ReactmcError):
    """The preset of a step is not contained in the marking."""


class NotStructuralConflictNet(ReactmcError):
    def __init__(self, violations):
        first = violations[0]
        super().__init__(
            f"not a structural conflict net: step {{{first.t}, {first.u}}} is enabled "
            f"at marking {first.marking} but the presets overlap"
        )
        self.violations = violations


class FormulaSyntaxError(ReactmcError):
    def __init__(self, message, position=None):
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position


class XNotSupported(FormulaSyntaxError):
    def __init__(self, position=None):
        super().__init__("the next-state operator X is not supported", position)


class TaskSetMismatch(ReactmcError):
    """A task references transitions that do not exist in the model."""
