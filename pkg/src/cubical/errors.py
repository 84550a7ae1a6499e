class CubicalError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3


class MalformedInput(CubicalError):
    exit_code = 2


class ParseError(MalformedInput):
    def __init__(self, message, line=None, offset=None):
        where = f" (line {line}, offset {offset})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.offset = offset


class NotMedian(CubicalError):
    def __init__(self, witness, report=None):
        x, y, z, count = witness
        super().__init__(f"triple ({x}, {y}, {z}) has {count} medians")
        self.witness = witness
        self.report = report


class DisconnectedPair(CubicalError):
    pass


class SelfCrossing(CubicalError):
    pass


class NotConvex(CubicalError):
    pass


class EmptyInput(CubicalError):
    pass


class UnknownFixture(MalformedInput):
    pass


class BudgetExceeded(CubicalError):
    exit_code = 4


class CapExceeded(CubicalError):
    exit_code = 4

    def __init__(self, message, count=None, best=None):
        super().__init__(message)
        self.count = count
        self.best = best


class NoLeafHyperplane(CubicalError):
    pass


class EmptyFactor(CubicalError):
    pass


class NotRich(CubicalError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SameClass(CubicalError):
    pass


class BadIndex(CubicalError):
    pass


class Inconsistent(CubicalError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
