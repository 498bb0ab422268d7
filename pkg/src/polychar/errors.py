"""Exceptions shared by the checkers and the command line."""


class HypothesisError(ValueError):
    """Matrix hypotheses of a checker are not satisfied."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class SoundnessViolation(AssertionError):
    """Equation and hypotheses hold but the proved conclusion fails."""

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict
