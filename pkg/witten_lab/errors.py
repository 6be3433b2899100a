
# Every failure the library reports carries a stable code string, used in
# CLI messages, and the exit status the CLI returns for it.  Exit status 2 is
# a configuration/validation problem, 3 a numerical one.

class LabError(RuntimeError):
    code = "error"
    exit_code = 3
    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

# Configuration and validation errors

class InvalidArgumentError(LabError, ValueError):
    code = "invalid-argument"
    exit_code = 2

class ConfigError(LabError):
    code = "config"
    exit_code = 2

class DomainMismatchError(LabError):
    code = "domain-mismatch"
    exit_code = 2

class UnsupportedDimensionError(LabError):
    code = "unsupported-dimension"
    exit_code = 2

class MeshError(LabError):
    code = "mesh"
    exit_code = 2

class MeshParseError(MeshError):
    code = "parse"

class NonManifoldError(MeshError):
    code = "non-manifold"

class NegativeAreaError(MeshError):
    code = "negative-area"

class OrientationError(MeshError):
    code = "orientation"

# Numerical errors

class DegenerateMeshError(LabError):
    code = "degenerate-mesh"

class NotMorseError(LabError):
    code = "not-morse"

class NotLeafwiseMorseError(NotMorseError):
    code = "not-leafwise-morse"

class DegenerateModelError(LabError):
    code = "degenerate-model"

class OverflowGuardError(LabError):
    code = "overflow-guard"

class SolverError(LabError):
    code = "solver-failure"

class InsufficientKError(LabError):
    code = "insufficient-k"

class KernelMismatchError(LabError):
    code = "kernel-mismatch"

class IncompleteSearchWarning(UserWarning):
    pass

