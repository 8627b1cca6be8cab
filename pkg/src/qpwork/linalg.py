"""Dense complex matrix helpers and Hermitian spectral decomposition.

Matrices are plain ``complex128`` numpy arrays.  The validators
(:func:`as_matrix`, :func:`as_hermitian`, :func:`as_unitary`) check the
invariants once and hand back a clean array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import (
    DEFAULT_TOLERANCES,
    ConvergenceError,
    DimensionError,
    ValidationError,
)


def as_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def as_hermitian(a, tol: float = DEFAULT_TOLERANCES.herm) -> np.ndarray:
    m = as_matrix(a)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValidationError(f"matrix is not Hermitian (max |A - A^H| = {defect:.3e})")
    return m


def as_unitary(u, tol: float = DEFAULT_TOLERANCES.unitary) -> np.ndarray:
    m = as_matrix(u)
    defect = unitarity_defect(m)
    if defect > tol:
        raise ValidationError(f"matrix is not unitary (max |U^H U - I| = {defect:.3e})")
    return m


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def multiply(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_dims(a, b)
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues with their orthogonal eigenprojectors.

    Attributes
    ----------
    eigenvalues : ndarray, shape (m,)
        Strictly increasing.
    projectors : ndarray, shape (m, d, d)
        ``projectors[k]`` projects onto the eigenspace of ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    projectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,kab->ab", self.eigenvalues, self.projectors)

    def defects(self) -> dict:
        """Max-entry violations of completeness, orthogonality and idempotence."""
        p = self.projectors
        eye = np.eye(self.dim)
        completeness = float(np.max(np.abs(p.sum(axis=0) - eye)))
        products = np.einsum("jab,kbc->jkac", p, p)
        target = np.zeros_like(products)
        for k in range(len(p)):
            target[k, k] = p[k]
        orthogonality = float(np.max(np.abs(products - target)))
        return {"completeness": completeness, "orthogonality": orthogonality}


def hermitian_eig(a, degeneracy_tol: float | None = None, *, tolerances=DEFAULT_TOLERANCES) -> SpectralDecomposition:
    """Spectral decomposition with degenerate eigenvalues grouped.

    Eigenvalues are clustered by single linkage: neighbours closer than
    ``degeneracy_tol`` share a cluster, which is reported at its mean with the
    sum of the rank-1 projectors as its projector.

    Raises
    ------
    ValidationError
        Input is not Hermitian within ``tolerances.herm``.
    ConvergenceError
        Jacobi sweeps did not converge within ``tolerances.jacobi_sweeps``.
    """
    tol = tolerances.degeneracy if degeneracy_tol is None else degeneracy_tol
    m = as_hermitian(a, tolerances.herm)
    m = hermitian_part(m)
    w, v, sweeps, converged = _kernels.jacobi_eigh(m, tolerances.jacobi_sweeps, tolerances.jacobi_off)
    if not converged:
        raise ConvergenceError(f"Jacobi eigensolver did not converge in {sweeps} sweeps")

    groups = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    eigenvalues = np.array([w[g].mean() for g in groups])
    projectors = np.array([v[:, g] @ v[:, g].conj().T for g in groups])
    return SpectralDecomposition(eigenvalues, projectors)


def exp_i_hermitian(a, theta: float, *, tolerances=DEFAULT_TOLERANCES) -> np.ndarray:
    """Return ``exp(-i theta A)`` via the spectral decomposition of ``A``."""
    sd = hermitian_eig(a, tolerances=tolerances)
    return spectral_exp(sd, theta)


def spectral_exp(sd: SpectralDecomposition, theta: float) -> np.ndarray:
    phases = np.exp(-1j * theta * sd.eigenvalues)
    return np.einsum("k,kab->ab", phases, sd.projectors)


def matrix_to_json(a) -> dict:
    m = as_matrix(a)
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"dim", "re", "im"}``; a bare nested list is read as real."""
    if isinstance(obj, list):
        return as_matrix(np.array(obj, dtype=float))
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    if re.shape != im.shape:
        raise DimensionError("real and imaginary parts differ in shape")
    m = as_matrix(re + 1j * im)
    if "dim" in obj and obj["dim"] != m.shape[0]:
        raise DimensionError(f"declared dim {obj['dim']} but matrix is {m.shape[0]}x{m.shape[0]}")
    return m
