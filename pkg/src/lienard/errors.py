"""Exception hierarchy.

Every error carries a short upper-case ``code`` so the CLI can print a
single machine-parsable line.
"""


class LienardError(Exception):
    code = "LIENARD_ERROR"


# curves
class DomainError(LienardError):
    code = "DOMAIN_ERROR"


class VerticalTangent(LienardError):
    code = "VERTICAL_TANGENT"


class NonSimpleZero(LienardError):
    code = "NON_SIMPLE_ZERO"


# construction
class PlanError(LienardError):
    code = "PLAN_INVALID"


class DegenerateInterval(LienardError):
    code = "DEGENERATE_INTERVAL"


class NonMonotone(LienardError):
    code = "NON_MONOTONE"


class HNotMonotone(LienardError):
    code = "H_NOT_MONOTONE"


class SignViolation(LienardError):
    code = "SIGN_VIOLATION"


class JointMismatch(LienardError):
    code = "JOINT_MISMATCH"


class ZeroSlope(LienardError):
    code = "ZERO_SLOPE"


# dynamics
class MaxTimeExceeded(LienardError):
    code = "MAX_TIME_EXCEEDED"


class StepUnderflow(LienardError):
    code = "STEP_UNDERFLOW"


class NoReturn(LienardError):
    code = "NO_RETURN"

    def __init__(self, message: str = "", escaped: bool = False):
        super().__init__(message)
        self.escaped = escaped


# cycles
class ScanTooCoarse(LienardError):
    code = "SCAN_TOO_COARSE"


class NoRootInInterval(LienardError):
    code = "NO_ROOT_IN_INTERVAL"
