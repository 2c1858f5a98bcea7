class ChoiceLabError(Exception):
    """
    Base class for every error raised by the library.

    :param detail: str: Human readable explanation, shown by the CLI
    """

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidLotteryError(ChoiceLabError):
    pass


class InvalidMenuError(ChoiceLabError):
    pass


class DegenerateGeometryError(ChoiceLabError):
    pass


class ChartError(ChoiceLabError):
    pass


class InvalidRepresentationError(ChoiceLabError):
    pass


class InvalidDistributionError(ChoiceLabError):
    pass


class SingularSystemError(ChoiceLabError):
    pass


class DecompositionError(ChoiceLabError):
    pass


class ConditioningWarning(UserWarning):
    pass
