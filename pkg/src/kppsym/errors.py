"""Exception types raised across the package."""


class KppSymError(Exception):
    pass


class ParseError(KppSymError, ValueError):
    """Syntax error in expression or equation text; ``offset`` is a byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class NonPolynomial(KppSymError, ValueError):
    def __init__(self, var):
        super().__init__(f"expression is not polynomial in {var}")
        self.var = var


class UnboundSymbol(KppSymError, LookupError):
    def __init__(self, name):
        super().__init__(f"no numeric value bound for {name!r}")
        self.name = name


class DomainError(KppSymError, ValueError):
    pass


class OrderOverflow(KppSymError, ValueError):
    pass


class NotClosed(KppSymError, ValueError):
    pass


class SeriesNotClosing(KppSymError, ValueError):
    pass


class ZeroElement(KppSymError, ValueError):
    pass


class NotAffine(KppSymError, ValueError):
    pass
