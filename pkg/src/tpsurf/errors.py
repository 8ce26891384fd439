"""Exception hierarchy for the tpsurf pipeline.

Every error carries the module and operation it originated from, so the CLI
can name the failing stage in diagnostics and map errors to exit codes.
"""

from __future__ import annotations


class TpsurfError(Exception):
    """Base class; `module`/`op` identify the origin of the failure."""

    def __init__(self, message: str, *, module: str = "", op: str = ""):
        super().__init__(message)
        self.module = module
        self.op = op

    def __str__(self) -> str:
        base = super().__str__()
        if self.module or self.op:
            return f"[{self.module}.{self.op}] {base}"
        return base


# -- arithmetic -------------------------------------------------------------

class DivisionByZero(TpsurfError):
    pass


class NotDivisible(TpsurfError):
    """Exact polynomial division has a nonzero remainder."""


class NonSquare(TpsurfError):
    """A determinant was requested for a non-square scalar matrix."""


# -- hypothesis gate (exit code 2) -------------------------------------------

class HypothesisError(TpsurfError):
    """The input fails one of the structural hypotheses; not a bug."""


class NotCertifiedBasepointFree(HypothesisError):
    pass


class HasLinearSyzygy(HypothesisError):
    """A syzygy of bidegree (0,1) or (1,0) exists; this tool rejects such
    inputs and points the user at the linear-syzygy method instead."""


class NoQuadraticSyzygy(HypothesisError):
    pass


class DegreeTooSmall(HypothesisError):
    """b < 3 (or a < 3 in the swapped orientation)."""


class NonvanishingViolated(TpsurfError):
    """A scalar that the case analysis requires to be nonzero vanished.

    Under the structural hypotheses this is provably impossible; if it ever
    triggers it is reported as a finding, not silently worked around.
    """


# -- internal contracts (exit code 1) ----------------------------------------

class InternalContract(TpsurfError):
    """An internally-guaranteed identity failed; indicates a bug upstream."""


class DenominatorZero(TpsurfError):
    """Defensive: a closed-form decomposition denominator vanished."""


class NotSquare(TpsurfError):
    """The assembled strand matrix is not square; the syzygy set is wrong."""


class ZeroDeterminant(TpsurfError):
    pass


class NotAPerfectPower(TpsurfError):
    pass


class KernelNotUnique(TpsurfError):
    """Sampling oracle could not isolate a one-dimensional solution space."""


class GenerationExhausted(TpsurfError):
    """Instance generator hit its redraw limit."""
