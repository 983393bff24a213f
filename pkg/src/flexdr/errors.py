"""Exception hierarchy. Every error raised by the toolkit derives from FlexDRError."""


class FlexDRError(ValueError):
    pass


class SpecError(FlexDRError):
    """A parameter record violates its invariants."""


class BoundViolationError(FlexDRError):
    pass


class ExclusivityError(FlexDRError):
    """Storage asked to charge and discharge in the same step."""


class ComfortViolationError(FlexDRError):
    pass


class IdentificationError(FlexDRError):
    pass


class ResamplingGridError(FlexDRError):
    pass


class InsufficientDataError(FlexDRError):
    pass


class CapabilityBoundError(FlexDRError):
    pass


class EnumerationSizeError(FlexDRError):
    pass


class AccountingError(FlexDRError):
    pass


class NotFoundError(FlexDRError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class FormatError(FlexDRError):
    pass


class VersionMismatchError(FormatError):
    pass


class ConfigError(FlexDRError):
    pass
