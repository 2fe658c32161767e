"""Exceptions raised across the workbench.

Every exception carries the process exit status the command line maps it to:
2 for usage/config errors, 3 for pipeline/data errors and 4 for numerical
failures.
"""


class PhaselessFarFieldException(Exception):
    exit_code = 3


class ConfigError(PhaselessFarFieldException):
    exit_code = 2


class SpecialFunctionDomainError(PhaselessFarFieldException, ValueError):
    """Argument outside the domain of a special function"""

    exit_code = 2


class InvalidGeometryError(PhaselessFarFieldException, ValueError):
    pass


class GridMisalignmentError(PhaselessFarFieldException, ValueError):
    """Direction grids do not support the requested pairing"""

    pass


class SingularityError(PhaselessFarFieldException):
    exit_code = 4


class ConditioningError(PhaselessFarFieldException):
    exit_code = 4

    def __init__(self, message: str, condition_estimate: float):
        super().__init__(f"{message} (condition estimate {condition_estimate:.3e})")
        self.condition_estimate = condition_estimate


class NonConvergenceError(PhaselessFarFieldException):
    exit_code = 4

    def __init__(self, message: str, residual_history):
        last = residual_history[-1] if len(residual_history) else float("nan")
        super().__init__(
            f"{message} after {len(residual_history)} iterations, "
            f"last relative residual {last:.3e}"
        )
        self.residual_history = list(residual_history)


class FragmentationError(PhaselessFarFieldException):
    """The trusted region of a relative phase field falls apart"""

    def __init__(self, components):
        sizes = ", ".join(str(len(component)) for component in components)
        super().__init__(
            f"Unmasked region has {len(components)} components that cannot "
            f"be mutually oriented (sizes: {sizes})"
        )
        self.components = components


class UnresolvedBranchError(PhaselessFarFieldException):
    def __init__(self, ratio: float, candidates):
        super().__init__(
            f"Conjugation branch could not be decided, probe ratio {ratio:.4f} "
            f"is within 10% of 1"
        )
        self.ratio = ratio
        self.candidates = candidates


class ExpansionValidityError(PhaselessFarFieldException):
    pass


class GaugeInconsistencyError(PhaselessFarFieldException):
    exit_code = 4

    def __init__(self, constant: complex):
        super().__init__(
            f"Estimated gauge constant {constant:.6f} has modulus "
            f"{abs(constant):.4f}, more than 5% away from 1"
        )
        self.constant = constant


class DegenerateOperatorError(PhaselessFarFieldException):
    exit_code = 4


class StaleUpstreamError(PhaselessFarFieldException):
    pass
