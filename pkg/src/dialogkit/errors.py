"""Exception types shared across the engine."""


class DialogKitError(Exception):
    """Base class for all engine errors."""


class MissingFile(DialogKitError):
    pass


class ParseError(DialogKitError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class ValidationError(DialogKitError):
    """Raised when a project fails validation; carries every violation found."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class IoError(DialogKitError):
    pass


class UntrainableIntent(DialogKitError):
    def __init__(self, intent: str):
        super().__init__(f"intent '{intent}' has no usable (human or approved) examples")
        self.intent = intent


class EmptyUtterance(DialogKitError):
    pass


class WrongEntityKind(DialogKitError):
    pass


class UnknownTemplate(DialogKitError):
    pass


# Gateway-side name for the same condition.
TemplateUnknown = UnknownTemplate


class MissingBinding(DialogKitError):
    def __init__(self, name: str):
        super().__init__(f"missing binding for placeholder '{name}'")
        self.name = name


class ProviderError(DialogKitError):
    pass


class ProviderTimeout(ProviderError):
    pass


class ProviderHTTPError(ProviderError):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"provider returned HTTP {status}: {detail}")
        self.status = status


class MissingFixture(ProviderError):
    pass


class FixtureParseError(DialogKitError):
    pass


class EmptyList(DialogKitError):
    pass


class FormatParseError(DialogKitError):
    pass


class UnknownItem(DialogKitError):
    pass


class AlreadyDecided(DialogKitError):
    pass
