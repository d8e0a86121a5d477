"""exceptions.py"""


class ToolkitError(Exception):
    """
    Base exception for all toolkit errors.

    This class extends the standard Exception class and adds a code attribute, which the command line front end uses
    as its exit status.

    Properties:
        code (int | None): An optional error code, the process exit status on the command line.
    """
    code: int | None = None

    def __init__(self, message: str = None, code: int | None = 1):
        """Initializes the ToolkitError with an optional message and code.

        Args:
            :param message: (str, optional):     The error message. If empty or None, defaults to "Toolkit error".
            :param code: (int | None, optional): An error code, the exit status on the command line.
        """
        super().__init__(message if message and message.strip() else "Toolkit error")
        self.code = code

    def __str__(self) -> str:
        """Returns a string representation of the error, including the code if present.

        Returns:
            str: The error message, optionally with code information.
        """
        s = super().__str__()

        return f"{s} (code: {self.code})" if self.code else s


class ConfigError(ToolkitError):
    """Exception class for invalid or unreadable experiment configurations.

    Properties:
        field (str | None): Dotted path of the offending config key, if known.
        line (int | None):  1-based line number in the config file, if known.
    """

    def __init__(self, message: str = None, code: int | None = 2, field: str | None = None, line: int | None = None):
        """Initializes the ConfigError with an optional message, code and location.

        :param message: (str, optional):     The error message. If empty or None, defaults to "Invalid configuration".
        :param code: (int | None, optional): The exit status.
        :param field: (str | None, optional): Dotted path of the offending key.
        :param line: (int | None, optional):  Line number in the config file.
        """
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        text = message if message and message.strip() else "Invalid configuration"
        if location:
            text = f"{text} [{', '.join(location)}]"
        super().__init__(text, code)
        self.field = field
        self.line = line


class ModelSpecError(ToolkitError):
    """Exception class for subordinator specifications that violate their invariants."""

    def __init__(self, message: str = None, code: int | None = 3):
        """Initializes the ModelSpecError with an optional message and code.

        :param message: (str, optional):     The error message. If empty or None, defaults to "Invalid model".
        :param code: (int | None, optional): The exit status.
        """
        super().__init__(message if message and message.strip() else "Invalid model", code)


class UnstableModelError(ModelSpecError):
    """Exception class for net-input models whose mean input rate is not below the unit drain."""

    def __init__(self, message: str = None, code: int | None = 3):
        super().__init__(message if message and message.strip() else "Unstable model", code)


class DomainError(ToolkitError):
    """Exception class for arguments outside the domain of an operation."""

    def __init__(self, message: str = None, code: int | None = 4):
        """Initializes the DomainError with an optional message and code.

        :param message: (str, optional):     The error message. If empty or None, defaults to "Argument out of domain".
        :param code: (int | None, optional): The exit status.
        """
        super().__init__(message if message and message.strip() else "Argument out of domain", code)


class SingularityError(DomainError):
    """Exception class for evaluations at a removable singularity that is deliberately not expanded."""

    def __init__(self, message: str = None, code: int | None = 4):
        super().__init__(message if message and message.strip() else "Evaluation at a singular point", code)


class NumericalError(ToolkitError):
    """Exception class for numerical procedures that fail to converge.

    Properties:
        diagnostics (dict): Whatever the failing procedure could report (achieved tolerance, bracket, ...).
    """

    def __init__(self, message: str = None, code: int | None = 5, diagnostics: dict | None = None):
        """Initializes the NumericalError with an optional message, code and diagnostics.

        :param message: (str, optional):      The error message. If empty or None, defaults to "Numerical error".
        :param code: (int | None, optional):  The exit status.
        :param diagnostics: (dict, optional): Diagnostic values of the failing procedure.
        """
        self.diagnostics = dict(diagnostics or {})
        text = message if message and message.strip() else "Numerical error"
        if self.diagnostics:
            text = f"{text} {self.diagnostics}"
        super().__init__(text, code)


class UnsupportedModelError(ToolkitError):
    """Exception class for models an operation cannot handle."""

    def __init__(self, message: str = None, code: int | None = 6):
        super().__init__(message if message and message.strip() else "Unsupported model", code)


class StationarySamplerUnavailableError(UnsupportedModelError):
    """Exception class for models without an exact stationary sampler."""

    def __init__(self, message: str = None, code: int | None = 6):
        super().__init__(message if message and message.strip()
                         else "No exact stationary sampler for this model; use init 'burn-in'", code)


class SimulationLimitError(ToolkitError):
    """Exception class for simulations whose expected size exceeds the configured guard."""

    def __init__(self, message: str = None, code: int | None = 7):
        super().__init__(message if message and message.strip() else "Simulation limit exceeded", code)


class EmptyProbeSampleError(ToolkitError):
    """Exception class for probe draws that leave no probe inside the observation horizon."""

    def __init__(self, message: str = None, code: int | None = 8):
        super().__init__(message if message and message.strip() else "Empty probe sample", code)


class VarianceUnavailableError(ToolkitError):
    """Exception class for plug-in variances that cannot be formed from the sample."""

    def __init__(self, message: str = None, code: int | None = 8):
        super().__init__(message if message and message.strip()
                         else "No emptiness observed; variance plug-in unavailable", code)
