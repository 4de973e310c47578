"""Exception hierarchy.

Every error carries the pipeline stage it came from (``module``) and the
process exit code the CLI maps it to: 1 numerical failure, 2 config error,
3 singularity abort.
"""


class BkmError(Exception):
    module = "bkmflow"
    exit_code = 1

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def describe(self):
        extra = ", ".join(f"{k}={v}" for k, v in self.context.items())
        base = f"[{self.module}] {type(self).__name__}: {self}"
        return f"{base} ({extra})" if extra else base


class ConfigError(BkmError):
    module = "cli-runner"
    exit_code = 2


class SingularityError(BkmError):
    """Trajectory reached a locus where the construction is undefined."""

    exit_code = 3


# polynomial-core
class DivisionByZeroPoly(BkmError):
    module = "polynomial-core"


class DuplicateNode(BkmError):
    module = "polynomial-core"


# rho-map
class SharedRoot(SingularityError):
    module = "rho-map"


class EvaluationAtEigenvalue(BkmError):
    module = "rho-map"


# stackel-hamiltonian
class SingularMmatrix(SingularityError):
    module = "stackel-hamiltonian"


class DegenerateEigenvalues(BkmError):
    module = "stackel-hamiltonian"


# flow-integrator
class BlowUp(BkmError):
    module = "flow-integrator"


class SingularityHit(SingularityError):
    module = "flow-integrator"


class ToleranceFailure(BkmError):
    module = "flow-integrator"


class OffLevelSet(BkmError):
    module = "flow-integrator"


# solution-synthesizer
class NonpositiveCLambda(BkmError):
    module = "solution-synthesizer"


# verification-suite
class EigenvalueCollision(SingularityError):
    module = "verification-suite"


class GridTooCoarse(BkmError):
    module = "verification-suite"


class MuEqualsLambda(BkmError):
    module = "verification-suite"
