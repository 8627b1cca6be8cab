"""Backward process under conjugation by the forward propagator.

Three backward distributions are built here:

* ``backward_pq``: the forward q-family with every event and the state
  conjugated by ``U`` and the support negated;
* ``backward_tpm``: the TPM distribution of the backward process;
* ``operational_backward_pq``: the q-family construction applied natively to
  the backward process (final energy measured first).

They coincide at ``q in {0, 1}`` and generally differ elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .distribution import (
    WorkDistribution,
    assemble_family,
    assemble_tpm,
    atomwise_defect,
    negate_support,
    pq_distribution,
    pq_weights,
    three_index_weights,
)
from .events import ForwardEvents, dephase, forward_events, is_incoherent, random_density_matrix
from .linalg import hermitian_eig, hermitian_part, matrix_to_json
from .process import HamiltonianProcess, pure_state


def _conjugate(u: np.ndarray, ops: np.ndarray) -> np.ndarray:
    out = np.einsum("ab,...bc,dc->...ad", u, ops, u.conj())
    return hermitian_part(out) if out.ndim == 2 else 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))


@dataclass(frozen=True)
class BackwardProcess:
    """Time-reversed data.

    Energy labels ``eps`` and ``eps_prime`` are carried over from the forward
    decompositions; the conjugated projectors are never re-diagonalised.
    """

    rho_bar: np.ndarray
    eps: np.ndarray
    pi_bar: np.ndarray
    eps_prime: np.ndarray
    pi_bar_prime: np.ndarray
    u_bar: np.ndarray

    @property
    def dim(self) -> int:
        return self.rho_bar.shape[0]

    def as_process(self, h_initial, h_final) -> HamiltonianProcess:
        """The backward data as a process starting from ``h_initial`` (the forward ``H(tau)``)."""
        return HamiltonianProcess(h_initial, h_final, self.u_bar, self.rho_bar)


def reverse(proc: HamiltonianProcess, ev: ForwardEvents) -> BackwardProcess:
    u = proc.propagator
    return BackwardProcess(
        rho_bar=_conjugate(u, proc.initial_state),
        eps=ev.eps,
        pi_bar=_conjugate(u, ev.pi),
        eps_prime=ev.eps_prime,
        pi_bar_prime=_conjugate(u, ev.pi_prime),
        u_bar=u.conj().T.copy(),
    )


def reverse_backward(b: BackwardProcess) -> tuple[np.ndarray, ForwardEvents]:
    """Apply the same conjugation with ``U_bar``; recovers ``(rho, forward events)``."""
    u = b.u_bar
    events = ForwardEvents(b.eps, _conjugate(u, b.pi_bar), b.eps_prime, _conjugate(u, b.pi_bar_prime))
    return _conjugate(u, b.rho_bar), events


def backward_weights(b: BackwardProcess) -> np.ndarray:
    # Re Tr{Pibar_i rhobar Pibar_j Pibar'_k}
    return three_index_weights(b.pi_bar, b.rho_bar, b.pi_bar, b.pi_bar_prime)


def operational_weights(b: BackwardProcess) -> np.ndarray:
    # Re Tr{Pibar'_k rhobar Pibar'_l Pibar_i}, indexed [k, l, i]
    return three_index_weights(b.pi_bar_prime, b.rho_bar, b.pi_bar_prime, b.pi_bar)


def backward_pq(b: BackwardProcess, q: float, *, tolerances=DEFAULT_TOLERANCES) -> WorkDistribution:
    """Atoms at ``q eps_i + (1-q) eps_j - eps'_k``."""
    return assemble_family(backward_weights(b), b.eps, b.eps_prime, q, sign=-1.0, tolerances=tolerances)


def backward_tpm(b: BackwardProcess, *, tolerances=DEFAULT_TOLERANCES) -> WorkDistribution:
    """``Tr{Pibar'_k rhobar Pibar'_k Pibar_i}`` at ``eps_i - eps'_k``."""
    return assemble_tpm(operational_weights(b), b.eps_prime, b.eps, tolerances=tolerances)


def operational_backward_pq(b: BackwardProcess, q: float, *, tolerances=DEFAULT_TOLERANCES) -> WorkDistribution:
    """Atoms at ``eps_i - q eps'_k - (1-q) eps'_l``."""
    return assemble_family(operational_weights(b), b.eps_prime, b.eps, q, tolerances=tolerances)


@dataclass
class SymmetryReport:
    q: float
    tol: float
    symmetry_defect: float
    class_defect: float
    tpm_reduction_backward: str
    tpm_reduction_defect: float | None
    expect_class_coincidence: bool

    @property
    def symmetry_pass(self) -> bool:
        return self.symmetry_defect <= self.tol

    @property
    def class_pass(self) -> bool:
        """Coincidence required at the endpoints; elsewhere the defect is informational."""
        return self.class_defect <= self.tol if self.expect_class_coincidence else True

    @property
    def tpm_reduction_pass(self) -> bool:
        if self.tpm_reduction_backward == "n/a" or not self.expect_class_coincidence:
            return True
        return self.tpm_reduction_backward == "pass"

    @property
    def verdict(self) -> str:
        return "PASS" if (self.symmetry_pass and self.class_pass and self.tpm_reduction_pass) else "FAIL"

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "symmetry_defect": self.symmetry_defect,
            "class_defect": self.class_defect,
            "class_coincidence_expected": self.expect_class_coincidence,
            "tpm_reduction_backward": self.tpm_reduction_backward,
            "tpm_reduction_defect": self.tpm_reduction_defect,
            "verdict": self.verdict,
        }


def is_endpoint(q: float) -> bool:
    return q == 0.0 or q == 1.0


def verify_symmetry(proc: HamiltonianProcess, ev: ForwardEvents, q: float, tol: float = DEFAULT_TOLERANCES.symmetry) -> SymmetryReport:
    """Compare the backward distributions for one value of ``q``.

    The TPM reduction of ``backward_pq`` is only evaluated when the backward
    state is incoherent in the final energy basis, and is expected to hold at
    the endpoints only.
    """
    b = reverse(proc, ev)
    forward = pq_distribution(proc, ev, q)
    reversed_q = backward_pq(b, q)
    operational = operational_backward_pq(b, q)
    sym = atomwise_defect(reversed_q, negate_support(forward))
    cls = atomwise_defect(operational, reversed_q)
    if is_incoherent(b.rho_bar, b.pi_bar_prime):
        red_defect = atomwise_defect(reversed_q, backward_tpm(b))
        status = "pass" if red_defect <= DEFAULT_TOLERANCES.normalization else "fail"
    else:
        red_defect, status = None, "n/a"
    return SymmetryReport(float(q), tol, sym, cls, status, red_defect, is_endpoint(q))


def weight_invariance_defect(proc: HamiltonianProcess, ev: ForwardEvents) -> float:
    """Max over ``(i, j, k)`` of the forward vs backward three-index weight difference."""
    return float(np.max(np.abs(backward_weights(reverse(proc, ev)) - pq_weights(proc, ev))))


# --------------------------------------------------------------------------
# witness searches


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary from the QR of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    qm, r = np.linalg.qr(z)
    d = np.diag(r)
    return qm * (d / np.abs(d))


def _random_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    return pure_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def _random_diag_hamiltonian(rng: np.random.Generator, dim: int) -> np.ndarray:
    return np.diag(np.sort(rng.normal(size=dim))).astype(np.complex128)


@dataclass
class Witness:
    found: bool
    draws: int
    defect: float
    process: HamiltonianProcess | None

    def to_json(self) -> dict:
        out = {"found": self.found, "draws": self.draws, "defect": self.defect}
        if self.process is not None:
            out["process"] = {
                "h_initial": matrix_to_json(self.process.h_initial),
                "h_final": matrix_to_json(self.process.h_final),
                "U": matrix_to_json(self.process.propagator),
                "rho": matrix_to_json(self.process.initial_state),
            }
        return out


def find_class_witness(dim: int, seed: int, q: float = 0.5, draws: int = 100, threshold: float = 1e-6) -> Witness:
    """Random pure states and Haar unitaries until ``p~_q`` and ``p-bar_q`` differ by more than ``threshold``."""
    rng = np.random.default_rng(seed)
    best = Witness(False, 0, 0.0, None)
    for n in range(1, draws + 1):
        proc = HamiltonianProcess(
            _random_diag_hamiltonian(rng, dim), _random_diag_hamiltonian(rng, dim), random_unitary(rng, dim), _random_pure(rng, dim)
        )
        b = reverse(proc, forward_events(proc))
        defect = atomwise_defect(operational_backward_pq(b, q), backward_pq(b, q))
        if defect > best.defect:
            best = Witness(False, n, defect, proc)
        if defect > threshold:
            return Witness(True, n, defect, proc)
    best.draws = draws
    return best


def find_backward_tpm_witness(dim: int, seed: int, q: float = 0.5, draws: int = 100, threshold: float = 1e-6) -> Witness:
    """Backward-incoherent scenario where ``p-bar_q`` differs from ``p-bar_TPM``.

    The backward state is drawn incoherent in the final energy basis, so the
    forward state ``U^H rho-bar U`` is generally coherent.
    """
    rng = np.random.default_rng(seed)
    best = Witness(False, 0, 0.0, None)
    for n in range(1, draws + 1):
        h0, h1 = _random_diag_hamiltonian(rng, dim), _random_diag_hamiltonian(rng, dim)
        u = random_unitary(rng, dim)
        proc = incoherent_backward_process(h0, h1, u, random_density_matrix(rng, dim))
        b = reverse(proc, forward_events(proc))
        defect = atomwise_defect(backward_pq(b, q), backward_tpm(b))
        if defect > best.defect:
            best = Witness(False, n, defect, proc)
        if defect > threshold:
            return Witness(True, n, defect, proc)
    best.draws = draws
    return best


def incoherent_backward_process(h_initial, h_final, u, seed_state) -> HamiltonianProcess:
    """Process whose backward state ``U rho U^H`` is dephased in the eigenbasis of ``h_final``."""
    final = hermitian_eig(h_final)
    rho_bar = dephase(seed_state, final.projectors)
    rho = hermitian_part(u.conj().T @ rho_bar @ u)
    return HamiltonianProcess(h_initial, h_final, u, rho)
