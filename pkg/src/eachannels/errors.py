class DomainError(ValueError):
    """Input outside the domain an operation is defined on."""


class SpecParseError(ValueError):
    """Malformed channel spec string; ``token`` names the offending piece."""

    def __init__(self, message: str, token: str = ""):
        super().__init__(message)
        self.token = token
