"""Work quasiprobability distributions as finite lists of delta atoms."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import DEFAULT_TOLERANCES, PropertyViolation, ValidationError
from .events import ForwardEvents
from .process import HamiltonianProcess


@dataclass(frozen=True)
class WorkDistribution:
    """Atoms ``(w, p)`` sorted by ``w`` with gaps larger than ``merge_tol``.

    Weights are real and may be negative.  ``q`` records the family parameter
    used to build the distribution, ``None`` for TPM-type distributions.
    """

    w: np.ndarray
    p: np.ndarray
    q: float | None = None
    merge_tol: float = DEFAULT_TOLERANCES.merge

    @classmethod
    def from_atoms(cls, w, p, q=None, merge_tol=DEFAULT_TOLERANCES.merge, prune_tol=DEFAULT_TOLERANCES.prune):
        """Sort, merge supports closer than ``merge_tol`` and prune tiny weights."""
        w = np.asarray(w, dtype=float).ravel()
        p = np.asarray(p, dtype=float).ravel()
        if w.shape != p.shape:
            raise ValidationError("support and weights differ in length")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(p))):
            raise ValidationError("distribution has non-finite atoms")
        order = np.argsort(w, kind="stable")
        w, p = w[order], p[order]
        merged_w, merged_p = [], []
        start = 0
        for k in range(1, len(w) + 1):
            if k == len(w) or w[k] - w[k - 1] > merge_tol:
                cluster_p = p[start:k]
                merged_w.append(float(np.mean(w[start:k])))
                merged_p.append(float(np.sum(cluster_p)))
                start = k
        merged_w = np.array(merged_w)
        merged_p = np.array(merged_p)
        keep = np.abs(merged_p) >= prune_tol
        return cls(merged_w[keep], merged_p[keep], None if q is None else float(q), merge_tol)

    def __len__(self) -> int:
        return len(self.w)

    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.w.tolist(), self.p.tolist()))

    def total(self) -> float:
        return float(np.sum(self.p))

    def to_json(self) -> dict:
        return {"q": self.q, "atoms": [{"w": float(w), "p": float(p)} for w, p in zip(self.w, self.p)]}

    @classmethod
    def from_json(cls, obj: dict) -> "WorkDistribution":
        atoms = obj.get("atoms", [])
        w = np.array([a["w"] for a in atoms], dtype=float)
        p = np.array([a["p"] for a in atoms], dtype=float)
        q = obj.get("q")
        return cls(w, p, None if q is None else float(q))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["w", "p"])
        for w, p in zip(self.w, self.p):
            writer.writerow([repr(float(w)), repr(float(p))])
        return buf.getvalue()


def _check_normalized(d: WorkDistribution, tol: float) -> WorkDistribution:
    total = d.total()
    if abs(total - 1.0) > tol:
        raise PropertyViolation(f"distribution weights sum to {total!r}, expected 1")
    return d


def three_index_weights(first: np.ndarray, rho: np.ndarray, second: np.ndarray, third: np.ndarray) -> np.ndarray:
    """``W[i, j, k] = Re Tr{first_i rho second_j third_k}``."""
    return _kernels.triple_trace_weights(first, rho, second, third)


def assemble_family(weights, e_outer, e_third, q, sign=1.0, *, tolerances=DEFAULT_TOLERANCES) -> WorkDistribution:
    """Atoms at ``sign * (e_third[k] - q e_outer[i] - (1-q) e_outer[j])``."""
    e_outer = np.asarray(e_outer, dtype=float)
    e_third = np.asarray(e_third, dtype=float)
    support = e_third[None, None, :] - q * e_outer[:, None, None] - (1 - q) * e_outer[None, :, None]
    d = WorkDistribution.from_atoms(
        sign * support, weights, q, tolerances.merge, tolerances.prune
    )
    return _check_normalized(d, tolerances.normalization)


def assemble_tpm(weights, e_outer, e_third, sign=1.0, *, tolerances=DEFAULT_TOLERANCES) -> WorkDistribution:
    """Diagonal ``i == j`` of the three-index weights at ``sign * (e_third[k] - e_outer[i])``."""
    n = weights.shape[0]
    diag = weights[np.arange(n), np.arange(n), :]
    support = np.asarray(e_third)[None, :] - np.asarray(e_outer)[:, None]
    d = WorkDistribution.from_atoms(sign * support, diag, None, tolerances.merge, tolerances.prune)
    return _check_normalized(d, tolerances.normalization)


def pq_weights(proc: HamiltonianProcess, ev: ForwardEvents) -> np.ndarray:
    # Re Tr{Pi_i rho Pi_j Pi'_k}
    return three_index_weights(ev.pi, proc.initial_state, ev.pi, ev.pi_prime)


def pq_distribution(proc: HamiltonianProcess, ev: ForwardEvents, q: float, *, tolerances=DEFAULT_TOLERANCES) -> WorkDistribution:
    """Forward q-family distribution, one atom per ``(i, j, k)`` before merging."""
    return assemble_family(pq_weights(proc, ev), ev.eps, ev.eps_prime, q, tolerances=tolerances)


def tpm_distribution(proc: HamiltonianProcess, ev: ForwardEvents, *, tolerances=DEFAULT_TOLERANCES) -> WorkDistribution:
    """Two-projective-measurement distribution ``Tr{Pi_i rho Pi_i Pi'_k}``."""
    return assemble_tpm(pq_weights(proc, ev), ev.eps, ev.eps_prime, tolerances=tolerances)


def moment(d: WorkDistribution, n: int) -> float:
    if n < 0:
        raise ValidationError("moment order must be >= 0")
    return float(np.sum(d.p * d.w**n))


def char_function_direct(d: WorkDistribution, u: float) -> complex:
    return complex(np.sum(d.p * np.exp(1j * u * d.w)))


def negate_support(d: WorkDistribution) -> WorkDistribution:
    return WorkDistribution(-d.w[::-1], d.p[::-1].copy(), d.q, d.merge_tol)


def atomwise_defect(a: WorkDistribution, b: WorkDistribution, merge_tol: float | None = None) -> float:
    """Largest weight difference after aligning supports within ``merge_tol``.

    An atom present on one side only is compared against weight 0.
    """
    tol = max(a.merge_tol, b.merge_tol) if merge_tol is None else merge_tol
    i = j = 0
    worst = 0.0
    while i < len(a) or j < len(b):
        if j >= len(b) or (i < len(a) and a.w[i] < b.w[j] - tol):
            worst = max(worst, abs(a.p[i]))
            i += 1
        elif i >= len(a) or b.w[j] < a.w[i] - tol:
            worst = max(worst, abs(b.p[j]))
            j += 1
        else:
            worst = max(worst, abs(a.p[i] - b.p[j]))
            i += 1
            j += 1
    return float(worst)


def distributions_equal(a: WorkDistribution, b: WorkDistribution, tol: float) -> bool:
    return atomwise_defect(a, b) <= tol
