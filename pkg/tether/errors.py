class TetherError(Exception):
    pass


class ConfigurationError(TetherError, ValueError):
    pass


class InvalidGraph(TetherError, ValueError):
    pass


class DimensionMismatch(TetherError, ValueError):
    pass


class ParseError(TetherError, ValueError):
    def __init__(self, message: str, path: str = '<input>', line: int = 0):
        super().__init__(f'{path}:{line}: {message}')
        self.path = path
        self.line = line


class DegenerateLaplacian(TetherError):
    pass


class OracleTooLarge(TetherError):
    pass


class InitializationFailed(TetherError, RuntimeError):
    pass


class VerificationFailed(TetherError):
    def __init__(self, item: str, message: str = ''):
        super().__init__(f'{item}: {message}' if message else item)
        self.item = item
