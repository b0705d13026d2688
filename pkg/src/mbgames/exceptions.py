from __future__ import annotations


class MBGamesError(Exception):
    pass

class ConfigError(MBGamesError, ValueError):
    pass

class InvalidBoardError(MBGamesError, ValueError):
    pass

class IllegalMoveError(MBGamesError, ValueError):
    pass

class UnsupportedBoardError(MBGamesError, TypeError):
    pass

class CapacityExceeded(MBGamesError, ValueError):
    pass

class UndefinedDensityError(MBGamesError, ValueError):
    pass

class InvariantViolation(MBGamesError, RuntimeError):
    pass

class PreconditionError(MBGamesError, ValueError):
    pass

class DivisibilityError(MBGamesError, ValueError):
    pass

class TranscriptFormatError(MBGamesError, ValueError):
    def __init__(self, message: str, round_index: int | None = None):
        if round_index is not None:
            message = f"round {round_index}: {message}"
        super().__init__(message)
        self.round_index = round_index

class InsufficientDataError(MBGamesError, ValueError):
    pass

class StrategySpecError(MBGamesError, ValueError):
    pass
