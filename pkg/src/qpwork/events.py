"""Effects, the ordered-product quasiprobability and executable axiom checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, DimensionError, ValidationError
from .linalg import (
    SpectralDecomposition,
    as_hermitian,
    hermitian_eig,
    hermitian_part,
    matrix_to_json,
)
from .process import HamiltonianProcess, heisenberg


def as_effect(e, tolerances=DEFAULT_TOLERANCES) -> np.ndarray:
    """Validate ``0 <= E <= I`` and return ``E`` as an array."""
    m = hermitian_part(as_hermitian(e, max(tolerances.herm, 1e-10)))
    w = hermitian_eig(m, tolerances=tolerances).eigenvalues
    if w[0] < -tolerances.effect or w[-1] > 1 + tolerances.effect:
        raise ValidationError(f"effect spectrum [{w[0]:.3e}, {w[-1]:.3e}] leaves [0, 1]")
    return m


def _same_dim(*ops: np.ndarray) -> None:
    shapes = {op.shape for op in ops}
    if len(shapes) != 1:
        raise DimensionError(f"operands have different shapes: {sorted(shapes)}")


def single_event_prob(e, rho) -> float:
    e, rho = np.asarray(e), np.asarray(rho)
    _same_dim(e, rho)
    return float(np.trace(e @ rho).real)


def quasiprob_v(seq: Sequence, rho, order: Sequence[int] | None = None) -> float:
    """``Re Tr{E_1 E_2 ... E_n rho}`` for the ordered events ``seq``.

    ``order`` permutes the product, e.g. ``(1, 0, 2)`` evaluates ``F E G``
    for ``seq = (E, F, G)``; the default is the listed order.
    """
    if len(seq) == 0:
        raise ValidationError("event sequence is empty")
    ops = [np.asarray(e) for e in seq]
    rho = np.asarray(rho)
    _same_dim(rho, *ops)
    if order is not None:
        if sorted(order) != list(range(len(ops))):
            raise ValidationError(f"order {order!r} is not a permutation of the events")
        ops = [ops[k] for k in order]
    prod = rho
    for op in reversed(ops):
        prod = op @ prod
    return float(np.trace(prod).real)


def tpm_joint(e, f, rho) -> float:
    """``Tr{E F E rho}``, the sequential-measurement joint probability."""
    e, f, rho = np.asarray(e), np.asarray(f), np.asarray(rho)
    _same_dim(e, f, rho)
    return float(np.trace(e @ f @ e @ rho).real)


def _check_family(projectors: np.ndarray, tol: float) -> None:
    sd = SpectralDecomposition(np.arange(len(projectors), dtype=float), projectors)
    d = sd.defects()
    if d["completeness"] > tol:
        raise ValidationError(f"projector family is incomplete (defect {d['completeness']:.3e})")
    if d["orthogonality"] > tol:
        raise ValidationError(f"projector family is not orthogonal (defect {d['orthogonality']:.3e})")


def dephase(rho, projectors, tolerances=DEFAULT_TOLERANCES) -> np.ndarray:
    """``sum_i P_i rho P_i`` for a complete orthogonal family ``P_i``."""
    projectors = np.asarray(projectors, dtype=np.complex128)
    rho = np.asarray(rho, dtype=np.complex128)
    if projectors.ndim != 3 or projectors.shape[1:] != rho.shape:
        raise DimensionError("projectors and state differ in dimension")
    _check_family(projectors, tolerances.projector)
    return hermitian_part(np.einsum("iab,bc,icd->ad", projectors, rho, projectors))


def is_incoherent(rho, projectors, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(dephase(rho, projectors) - rho)) <= tol)


@dataclass(frozen=True)
class ForwardEvents:
    """Initial energy projectors and final energy projectors in the Heisenberg picture."""

    eps: np.ndarray
    pi: np.ndarray
    eps_prime: np.ndarray
    pi_prime: np.ndarray

    def __post_init__(self):
        tol = DEFAULT_TOLERANCES.projector
        _check_family(self.pi, tol)
        _check_family(self.pi_prime, tol)


def forward_events(proc: HamiltonianProcess, *, tolerances=DEFAULT_TOLERANCES) -> ForwardEvents:
    initial = hermitian_eig(proc.h_initial, tolerances=tolerances)
    final = hermitian_eig(proc.h_final, tolerances=tolerances)
    u = proc.propagator
    pulled_back = np.array([u.conj().T @ p @ u for p in final.projectors])
    pulled_back = 0.5 * (pulled_back + np.conj(np.swapaxes(pulled_back, 1, 2)))
    return ForwardEvents(initial.eigenvalues, initial.projectors, final.eigenvalues, pulled_back)


# --------------------------------------------------------------------------
# random effects


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (x + x.conj().T)


def random_effect(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random Hermitian with its spectrum mapped affinely into ``[0, s]``, ``s <= 1``."""
    h = random_hermitian(rng, dim)
    w = hermitian_eig(h).eigenvalues
    span = w[-1] - w[0]
    e = (h - w[0] * np.eye(dim)) / span if span > 0 else np.zeros((dim, dim))
    return hermitian_part(rng.uniform(0.2, 1.0) * e)


def random_decomposition(rng: np.random.Generator, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Two effects whose sum is again an effect.

    Alternates between splitting one effect as ``sE + (1-s)E`` and rescaling an
    independent pair so the top eigenvalue of their sum is at most 1.
    """
    if rng.uniform() < 0.5:
        e = random_effect(rng, dim)
        s = rng.uniform()
        return s * e, (1 - s) * e
    e1, e2 = random_effect(rng, dim), random_effect(rng, dim)
    top = hermitian_eig(e1 + e2).eigenvalues[-1]
    if top > 1:
        e1, e2 = e1 / top, e2 / top
    return e1, e2


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    return hermitian_part(rho / np.trace(rho).real)


# --------------------------------------------------------------------------
# axiom oracles


@dataclass
class AxiomCheck:
    name: str
    max_defect: float = 0.0
    expect_violation: bool = False
    witness: dict | None = None

    def record(self, defect: float, witness: dict) -> None:
        if defect > self.max_defect or self.witness is None:
            self.max_defect = float(defect)
            self.witness = witness

    def passed(self, tol: float) -> bool:
        violated = self.max_defect > tol
        return violated if self.expect_violation else not violated


@dataclass
class AxiomReport:
    tol: float
    trials: int
    seed: int
    checks: dict = field(default_factory=dict)

    def check(self, name: str, expect_violation: bool = False) -> AxiomCheck:
        if name not in self.checks:
            self.checks[name] = AxiomCheck(name, expect_violation=expect_violation)
        return self.checks[name]

    @property
    def passed(self) -> bool:
        return all(c.passed(self.tol) for c in self.checks.values())

    def to_json(self, include_witnesses: bool = True) -> dict:
        out = {"tol": self.tol, "trials": self.trials, "seed": self.seed, "passed": self.passed, "checks": {}}
        for name, c in self.checks.items():
            entry = {
                "pass": c.passed(self.tol),
                "max_defect": c.max_defect,
                "expect_violation": c.expect_violation,
            }
            # witnesses only matter where something was (or had to be) violated
            if include_witnesses and (c.expect_violation or not c.passed(self.tol)):
                entry["witness"] = c.witness
            out["checks"][name] = entry
        return out


def _wit(**ops) -> dict:
    return {k: matrix_to_json(v) for k, v in ops.items()}


def check_axioms(rho, seed: int = 0, trials: int = 200, tol: float = DEFAULT_TOLERANCES.axiom) -> AxiomReport:
    """Probe the single-, two-, three- and four-event axioms on random effects.

    Every trial draws fresh effects and a fresh decomposition ``E = E1 + E2``.
    The sequential form ``Tr{E F E rho}`` is checked for additivity in its first
    slot as an expected violation.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    rho = np.asarray(rho, dtype=np.complex128)
    dim = rho.shape[0]
    eye = np.eye(dim, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    report = AxiomReport(tol=tol, trials=trials, seed=seed)

    report.check("P2_normalization").record(abs(single_event_prob(eye, rho) - 1.0), {})
    for _ in range(trials):
        e = random_effect(rng, dim)
        f = random_effect(rng, dim)
        g = random_effect(rng, dim)
        h = random_effect(rng, dim)
        e1, e2 = random_decomposition(rng, dim)
        e12 = e1 + e2

        # single event
        p = single_event_prob(e, rho)
        report.check("P1_range").record(max(0.0, -p, p - 1.0), _wit(E=e))
        report.check("P3_additivity").record(
            abs(single_event_prob(e12, rho) - single_event_prob(e1, rho) - single_event_prob(e2, rho)),
            _wit(E1=e1, E2=e2),
        )

        # two events
        v_ef = quasiprob_v((e, f), rho)
        jordan = 0.5 * np.trace((e @ f + f @ e) @ rho)
        report.check("Q1_real").record(
            max(abs(v_ef - jordan.real), abs(jordan.imag)), _wit(E=e, F=f)
        )
        v_e = single_event_prob(e, rho)
        report.check("Q2_marginal").record(
            max(abs(quasiprob_v((eye, e), rho) - v_e), abs(quasiprob_v((e, eye), rho) - v_e)), _wit(E=e)
        )
        add_first = quasiprob_v((e12, g), rho) - quasiprob_v((e1, g), rho) - quasiprob_v((e2, g), rho)
        add_second = quasiprob_v((g, e12), rho) - quasiprob_v((g, e1), rho) - quasiprob_v((g, e2), rho)
        report.check("Q3_additivity").record(max(abs(add_first), abs(add_second)), _wit(E1=e1, E2=e2, G=g))

        # three events, canonical ordering E F G
        v_ef_marg = [quasiprob_v(s, rho) for s in ((eye, e, f), (e, eye, f), (e, f, eye))]
        report.check("Qq2_marginal").record(max(abs(x - v_ef) for x in v_ef_marg), _wit(E=e, F=f))
        defect3 = 0.0
        for slot in range(3):
            defect3 = max(defect3, abs(_slot_additivity((g, h, f), slot, e1, e2, rho)))
        report.check("Qq3_additivity").record(defect3, _wit(E1=e1, E2=e2, F=f, G=g, H=h))

        # four events
        base = (e, f, g)
        v_base = quasiprob_v(base, rho)
        marg = max(abs(quasiprob_v(base[:k] + (eye,) + base[k:], rho) - v_base) for k in range(4))
        report.check("QM_marginal").record(marg, _wit(E=e, F=f, G=g))
        defect4 = max(abs(_slot_additivity((e, f, g, h), slot, e1, e2, rho)) for slot in range(4))
        report.check("QM_additivity").record(defect4, _wit(E1=e1, E2=e2, E=e, F=f, G=g, H=h))

        # sequential joint probability is not additive in its first slot
        tpm_defect = tpm_joint(e12, f, rho) - tpm_joint(e1, f, rho) - tpm_joint(e2, f, rho)
        report.check("TPM_Q3_violation", expect_violation=True).record(abs(tpm_defect), _wit(E1=e1, E2=e2, F=f))
    return report


def _slot_additivity(seq, slot, e1, e2, rho) -> float:
    def with_slot(x):
        s = list(seq)
        s[slot] = x
        return s

    return quasiprob_v(with_slot(e1 + e2), rho) - quasiprob_v(with_slot(e1), rho) - quasiprob_v(with_slot(e2), rho)
