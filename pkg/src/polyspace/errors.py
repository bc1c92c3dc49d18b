"""Exception types and the CLI exit-code mapping."""


class PolyspaceError(Exception):
    """Base class; ``code`` is the stable error identifier."""

    code = "ERROR"
    exit_code = 1


class CapExceeded(PolyspaceError):
    code = "CAP_EXCEEDED"
    exit_code = 5


class NonGeneric(PolyspaceError):
    code = "NON_GENERIC"
    exit_code = 6


class ToleranceAmbiguous(PolyspaceError):
    code = "TOLERANCE_AMBIGUOUS"
    exit_code = 7


class EvenN(PolyspaceError):
    code = "EVEN_N"
    exit_code = 8


class TNonPositive(PolyspaceError):
    code = "T_NONPOSITIVE"
    exit_code = 9


class DivisionRemainder(PolyspaceError):
    code = "DIVISION_REMAINDER"
    exit_code = 10


class ParseError(PolyspaceError):
    code = "PARSE_ERROR"
    exit_code = 2


class ConfigInvalid(PolyspaceError):
    code = "CONFIG_INVALID"
    exit_code = 3


class IOFailure(PolyspaceError):
    code = "IO_ERROR"
    exit_code = 4


#: exit status of ``verify`` when the run completed but a declared check failed
EXIT_CHECK_FAILED = 1

EXIT_CODES = {
    cls.code: cls.exit_code
    for cls in (
        ParseError,
        ConfigInvalid,
        IOFailure,
        CapExceeded,
        NonGeneric,
        ToleranceAmbiguous,
        EvenN,
        TNonPositive,
        DivisionRemainder,
    )
}
