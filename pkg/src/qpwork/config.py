"""Central tolerance record and package exceptions."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module.

    Construction tolerances (``herm``, ``unitary``, ``projector``) guard the
    inputs; ``axiom`` and ``merge`` are comparison thresholds used once
    products have accumulated rounding.
    """

    herm: float = 1e-12
    unitary: float = 1e-10
    projector: float = 1e-10
    reconstruction: float = 1e-9
    degeneracy: float = 1e-9
    jacobi_sweeps: int = 100
    jacobi_off: float = 1e-13
    density_eig: float = 1e-10
    density_trace: float = 1e-10
    effect: float = 1e-10
    merge: float = 1e-9
    prune: float = 1e-12
    normalization: float = 1e-9
    axiom: float = 1e-9
    symmetry: float = 1e-10
    fourier: float = 1e-8
    coherence: float = 1e-9

    def updated(self, overrides: dict | None) -> "Tolerances":
        if not overrides:
            return self
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValidationError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **overrides)


DEFAULT_TOLERANCES = Tolerances()


class ValidationError(ValueError):
    """Input violates a precondition (shape, hermiticity, normalization...)."""


class DimensionError(ValidationError):
    """Operands have incompatible dimensions."""


class ConvergenceError(ArithmeticError):
    """An iterative routine hit its iteration cap."""


class PropertyViolation(AssertionError):
    """Two independent computations that must agree did not."""
