class BoostError(ValueError):
    """Root of every data/usage error the engines raise. Commands map it to exit 2."""


class DimacsParseError(BoostError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CapacityError(BoostError):
    pass


class BoundNotApplicableError(BoostError):
    pass


class HypothesisError(BoostError):
    pass


class BudgetExceededError(BoostError):
    pass


class ConfigError(BoostError):
    pass


class InstanceError(BoostError):
    pass
