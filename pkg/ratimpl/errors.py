"""
Errors raised by the toolkit
"""


class RatImplError(Exception):
    """Base class for toolkit errors"""


class EnvironmentFormatError(RatImplError, ValueError):
    """Malformed environment, game or mechanism file"""

    def __init__(self, message: str, messages: dict = None):
        super().__init__(message)
        self.messages = messages or {}

    def to_dict(self) -> dict:
        return {'error': 'Validation error', 'details': self.messages or str(self)}


class UnknownIdError(RatImplError, KeyError):
    """Unknown agent, state, outcome or axiom id"""

    def __str__(self):
        return str(self.args[0]) if self.args else 'unknown id'


class LotteryError(RatImplError, ValueError):
    """Probability vector is not a lottery"""


class PreconditionError(RatImplError):
    """Mechanism precondition failed; carries the failing axiom report"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class CertificateFailure(RatImplError):
    """Lottery system failed exact re-verification"""

    def __init__(self, message: str, checks=None):
        super().__init__(message)
        self.checks = list(checks or [])


class CapExceededError(RatImplError):
    """Search or profile space larger than the configured cap"""


class UnsupportedBeliefModel(RatImplError):
    """Belief model not supported for this game"""
