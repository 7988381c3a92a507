"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class A3Error(Exception):
    code = "A3_ERROR"

    def to_dict(self):
        return {"code": self.code, "message": str(self)}


class NotInvertible(A3Error):
    code = "NOT_INVERTIBLE"


class SingularEvaluation(A3Error):
    code = "SINGULAR_EVALUATION"


class ParseError(A3Error):
    code = "PARSE_ERROR"

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"{message} at offset {position}" + (f" (expected one of: {exp})" if exp else ""))


class DegenerateFrame(A3Error):
    code = "DEGENERATE_FRAME"


class NonSurjectiveFrame(A3Error):
    code = "NON_SURJECTIVE_FRAME"


class ResolventSingular(A3Error):
    code = "RESOLVENT_SINGULAR"


class ContourDoesNotEnclose(A3Error):
    code = "CONTOUR_DOES_NOT_ENCLOSE"


class QuadratureNotConverged(A3Error):
    code = "QUADRATURE_NOT_CONVERGED"


class LimitNotConverged(A3Error):
    code = "LIMIT_NOT_CONVERGED"


class DomainExit(A3Error):
    code = "DOMAIN_EXIT"


class NotMonogenicAt(A3Error):
    code = "NOT_MONOGENIC_AT"

    def __init__(self, zeta, direction, residual):
        self.zeta = zeta
        self.direction = direction
        self.residual = residual
        super().__init__(f"Gateaux limit along {direction} misses h*Phi' by {residual:.3g} at {zeta}")


class HypothesisViolated(A3Error):
    code = "HYPOTHESIS_VIOLATED"


class GridTooSmall(A3Error):
    code = "GRID_TOO_SMALL"


class NonFiniteSample(A3Error):
    code = "NON_FINITE_SAMPLE"


class NotMonogenic(A3Error):
    code = "NOT_MONOGENIC"


class FiberInconsistent(A3Error):
    code = "FIBER_INCONSISTENT"


class InterpolationFailed(A3Error):
    code = "INTERPOLATION_FAILED"


class IllConditionedFit(A3Error):
    code = "ILL_CONDITIONED_FIT"


class ConfigError(A3Error):
    code = "CONFIG_ERROR"


class UnknownFixture(ConfigError):
    code = "UNKNOWN_FIXTURE"
