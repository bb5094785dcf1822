"""Exception hierarchy shared by every module."""


class RieszIntError(Exception):
    """Base class for all package errors."""


class StructuralError(RieszIntError, ValueError):
    """Inputs live in incompatible spaces or use an unsupported construction."""


class ContractViolation(RieszIntError, ValueError):
    """A documented precondition was checked and found false."""

    def __init__(self, message, *, module=None, operation=None):
        self.module = module
        self.operation = operation
        where = ".".join(p for p in (module, operation) if p)
        super().__init__(f"{where}: {message}" if where else message)


class ResourceExhausted(RieszIntError, RuntimeError):
    """A bounded search (bisection depth, budget) ran out before finishing."""


class DSLError(RieszIntError, ValueError):
    """Syntax or semantic error in a function/measure spec string."""

    def __init__(self, message, position=None, expected=None):
        self.position = position
        self.expected = expected
        parts = [message]
        if position is not None:
            parts.append(f"at position {position}")
        if expected:
            parts.append(f"(expected {expected})")
        super().__init__(" ".join(parts))
