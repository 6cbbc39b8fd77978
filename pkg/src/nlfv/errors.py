"""Exception types raised by the solver."""


class NlfvError(Exception):
    """Base class for solver errors."""


class MismatchedSupport(NlfvError, ValueError):
    pass


class NegativeWeight(NlfvError, ValueError):
    pass


class GhostZoneTooSmall(NlfvError, ValueError):
    pass


class RangeViolation(NlfvError, ValueError):
    pass


class NonPositiveCfl(NlfvError, ValueError):
    pass


class SupportOverflow(NlfvError, RuntimeError):
    """The solution reached the padded edge of the computational domain."""


class NonNestedGrids(NlfvError, ValueError):
    pass


class DegenerateStudy(NlfvError, ValueError):
    pass


class ConfigParseError(NlfvError, ValueError):
    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


class ConfigValidationError(NlfvError, ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(map(str, self.problems)))
