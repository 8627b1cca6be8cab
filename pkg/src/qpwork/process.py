"""Driven protocols: piecewise-constant schedules, propagators, initial states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, DimensionError, ValidationError
from .linalg import (
    as_hermitian,
    as_matrix,
    as_unitary,
    exp_i_hermitian,
    hermitian_eig,
    hermitian_part,
    matrix_from_json,
)


@dataclass(frozen=True)
class HamiltonianSchedule:
    """Ordered ``(duration, hamiltonian)`` segments, earliest first."""

    segments: tuple

    def __post_init__(self):
        if not self.segments:
            raise ValidationError("schedule needs at least one segment")
        cleaned = []
        dim = None
        for dt, h in self.segments:
            dt = float(dt)
            if not np.isfinite(dt) or dt < 0:
                raise ValidationError(f"segment duration must be >= 0, got {dt}")
            h = as_hermitian(h)
            if dim is None:
                dim = h.shape[0]
            elif h.shape[0] != dim:
                raise DimensionError("schedule segments have different dimensions")
            cleaned.append((dt, h))
        object.__setattr__(self, "segments", tuple(cleaned))

    @property
    def dim(self) -> int:
        return self.segments[0][1].shape[0]

    @property
    def tau(self) -> float:
        return sum(dt for dt, _ in self.segments)

    @classmethod
    def linear_ramp(cls, h0, h1, tau: float, segments: int = 64) -> "HamiltonianSchedule":
        """``H(t) = (1 - t/tau) H0 + (t/tau) H1`` sampled at segment midpoints."""
        if segments < 1:
            raise ValidationError("a ramp needs at least one segment")
        h0, h1 = as_hermitian(h0), as_hermitian(h1)
        if h0.shape != h1.shape:
            raise DimensionError("ramp endpoints differ in dimension")
        dt = float(tau) / segments
        mids = (np.arange(segments) + 0.5) / segments
        return cls(tuple((dt, (1 - s) * h0 + s * h1) for s in mids))


def propagator(schedule: HamiltonianSchedule, *, tolerances=DEFAULT_TOLERANCES) -> np.ndarray:
    """Time-ordered product of segment exponentials, later segments on the left."""
    u = np.eye(schedule.dim, dtype=np.complex128)
    for dt, h in schedule.segments:
        if dt == 0.0:
            continue
        u = exp_i_hermitian(h, dt, tolerances=tolerances) @ u
    return u


def heisenberg(observable, u) -> np.ndarray:
    """``U^H A U``."""
    a, u = as_hermitian(observable), as_matrix(u)
    if a.shape != u.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {u.shape}")
    return hermitian_part(u.conj().T @ a @ u)


def as_density_matrix(rho, tolerances=DEFAULT_TOLERANCES) -> np.ndarray:
    m = hermitian_part(as_hermitian(rho, max(tolerances.herm, 1e-10)))
    tr = np.trace(m).real
    if abs(tr - 1.0) > tolerances.density_trace:
        raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
    lowest = hermitian_eig(m, tolerances=tolerances).eigenvalues[0]
    if lowest < -tolerances.density_eig:
        raise ValidationError(f"density matrix has negative eigenvalue {lowest:.3e}")
    return m


def pure_state(vector) -> np.ndarray:
    psi = np.asarray(vector, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("state vector is zero")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def thermal_state(h, beta: float, *, tolerances=DEFAULT_TOLERANCES) -> np.ndarray:
    """Gibbs state ``exp(-beta H) / Z``; diagonal in the eigenbasis of ``H``."""
    if not np.isfinite(beta) or beta < 0:
        raise ValidationError(f"beta must be finite and >= 0, got {beta}")
    sd = hermitian_eig(h, tolerances=tolerances)
    # shift by the ground energy so large beta does not underflow
    shifted = sd.eigenvalues - sd.eigenvalues[0]
    boltzmann = np.exp(-beta * shifted)
    ranks = np.real(np.einsum("kaa->k", sd.projectors))
    z = np.sum(boltzmann * ranks)
    return np.einsum("k,kab->ab", boltzmann / z, sd.projectors)


@dataclass(frozen=True)
class HamiltonianProcess:
    """Initial and final Hamiltonians, the full propagator and the initial state."""

    h_initial: np.ndarray
    h_final: np.ndarray
    propagator: np.ndarray
    initial_state: np.ndarray

    def __post_init__(self):
        h0 = as_hermitian(self.h_initial)
        h1 = as_hermitian(self.h_final)
        u = as_unitary(self.propagator)
        rho = as_density_matrix(self.initial_state)
        if not (h0.shape == h1.shape == u.shape == rho.shape):
            raise DimensionError("process operators have different dimensions")
        for name, value in (("h_initial", h0), ("h_final", h1), ("propagator", u), ("initial_state", rho)):
            object.__setattr__(self, name, value)

    @property
    def dim(self) -> int:
        return self.h_initial.shape[0]

    def final_heisenberg_hamiltonian(self) -> np.ndarray:
        return heisenberg(self.h_final, self.propagator)

    def with_state(self, rho) -> "HamiltonianProcess":
        return HamiltonianProcess(self.h_initial, self.h_final, self.propagator, rho)


def schedule_from_json(obj: dict):
    """Build ``(schedule_or_None, propagator, h_first, h_last)`` from a schedule object.

    ``h_first``/``h_last`` are ``None`` for an explicit unitary, where the
    scenario must name the endpoint Hamiltonians itself.
    """
    kind = obj.get("type")
    if kind == "segments":
        segs = [(seg["dt"], matrix_from_json(seg["H"])) for seg in obj["segments"]]
        sched = HamiltonianSchedule(tuple(segs))
        return sched, propagator(sched), sched.segments[0][1], sched.segments[-1][1]
    if kind == "linear_ramp":
        h0, h1 = matrix_from_json(obj["H0"]), matrix_from_json(obj["H1"])
        sched = HamiltonianSchedule.linear_ramp(h0, h1, obj["tau"], int(obj.get("segments", 64)))
        return sched, propagator(sched), as_hermitian(h0), as_hermitian(h1)
    if kind == "explicit_unitary":
        return None, as_unitary(matrix_from_json(obj["U"])), None, None
    raise ValidationError(f"unknown schedule type {kind!r}")


__all__ = [
    "HamiltonianSchedule",
    "HamiltonianProcess",
    "propagator",
    "heisenberg",
    "thermal_state",
    "pure_state",
    "as_density_matrix",
    "schedule_from_json",
]
