"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line tool:
0 success, 1 unsatisfiable/sampling failure, 2 usage/parse error,
3 I/O or network error.
"""


class SceneForgeError(Exception):
    exit_code = 1


class DescriptorError(SceneForgeError):
    """Invalid model-descriptor document. ``path`` is the offending key path."""

    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        self.path = path
        self.reason = message
        super().__init__(f"{path}: {message}" if path else message)


class AcquisitionError(SceneForgeError):
    exit_code = 3


class ModelNotFoundError(AcquisitionError):
    pass


class DownloadError(AcquisitionError):
    pass


class OfflineError(DownloadError):
    pass


class ArchiveError(AcquisitionError):
    pass


class GeometryError(SceneForgeError):
    exit_code = 2


class UnsupportedGeometry(GeometryError):
    def __init__(self, shape: str, where: str = ""):
        self.shape = shape
        msg = f"unsupported collision geometry '{shape}'"
        super().__init__(f"{msg} in {where}" if where else msg)


class MeshLoadError(GeometryError):
    exit_code = 3


class RegistryError(SceneForgeError):
    exit_code = 2


class StaleRegistryError(RegistryError):
    pass


class DslError(SceneForgeError):
    """Lexing or parsing failure with a 1-based source position."""

    exit_code = 2

    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        self.reason = message
        super().__init__(f"line {line}, column {col}: {message}")


class LexError(DslError):
    pass


class ParseError(DslError):
    pass


class EvaluationError(SceneForgeError):
    exit_code = 1


class UnsatisfiableScenario(SceneForgeError):
    exit_code = 1

    def __init__(self, message: str, attempts: int):
        self.attempts = attempts
        self.violation = message
        super().__init__(f"no valid scene after {attempts} attempts; last violation: {message}")


class EmitError(SceneForgeError):
    exit_code = 1


class OutputExistsError(SceneForgeError):
    exit_code = 3


class InputFileError(SceneForgeError):
    """An input file (descriptor, scenario, template, scene record) cannot be read."""

    exit_code = 3
