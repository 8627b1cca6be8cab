"""Hot loops: complex Jacobi eigensolver and the three-index trace kernel.

Each kernel exists twice, a numba ``@njit`` scalar-loop version and a
vectorised pure-numpy version.  The public names (``jacobi_eigh``,
``triple_trace_weights``) dispatch to one of them, chosen once at import:

* ``QPWORK_BACKEND=numpy`` forces the numpy path;
* otherwise numba is used when it imports, else numpy.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


def _requested_backend() -> str:
    name = os.environ.get("QPWORK_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"QPWORK_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


BACKEND = _requested_backend()


# --------------------------------------------------------------------------
# Jacobi eigensolver for complex Hermitian matrices
#
# A rotation in the (p, q) plane first removes the phase of a[p, q] with
# D = diag(1, e^{-i phi}) and then applies the classic real rotation
# R = [[c, s], [-s, c]].  G = D R, and a <- G^H a G, v <- v G.
# Elements below off_tol * scale / n are left alone: they cannot keep the
# off-diagonal norm above threshold, and rotating on denormals overflows.


@njit(cache=True)
def _rotation(app, aqq, apq):
    r = abs(apq)
    phase = apq / r
    theta = (aqq - app) / (2.0 * r)
    if theta >= 0.0:
        t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
    else:
        t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    ph = np.conj(phase)
    return complex(c), complex(s), -s * ph, c * ph


@njit(cache=True)
def _jacobi_numba(a, max_sweeps, off_tol):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = max(np.sqrt(np.sum(np.abs(a) ** 2)), 1.0)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += abs(a[p, q]) ** 2
        if np.sqrt(off) <= off_tol * scale:
            return a, v, sweep, True
        if sweep == max_sweeps:
            break
        skip = off_tol * scale / n
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                g00, g01, g10, g11 = _rotation(a[p, p].real, a[q, q].real, apq)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * g00 + akq * g10
                    a[k, q] = akp * g01 + akq * g11
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * g00 + vkq * g10
                    v[k, q] = vkp * g01 + vkq * g11
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(g00) * apk + np.conj(g10) * aqk
                    a[q, k] = np.conj(g01) * apk + np.conj(g11) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return a, v, max_sweeps, False


def _offdiag_norm(a: np.ndarray) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _jacobi_numpy(a, max_sweeps, off_tol):
    n = a.shape[0]
    a = np.array(a, dtype=np.complex128, copy=True)
    v = np.eye(n, dtype=np.complex128)
    scale = max(float(np.linalg.norm(a)), 1.0)
    rotation = getattr(_rotation, "py_func", _rotation)
    for sweep in range(max_sweeps + 1):
        if _offdiag_norm(a) <= off_tol * scale:
            return a, v, sweep, True
        if sweep == max_sweeps:
            break
        skip = off_tol * scale / n
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                g = np.array(rotation(a[p, p].real, a[q, q].real, apq)).reshape(2, 2)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                v[:, idx] = v[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return a, v, max_sweeps, False


def _finish(result):
    a, v, sweeps, converged = result
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order]), int(sweeps), bool(converged)


def jacobi_eigh_numba(a, max_sweeps=100, off_tol=1e-13):
    """Eigen-decompose a Hermitian matrix with cyclic Jacobi sweeps (numba).

    Returns ``(eigenvalues, eigenvectors, sweeps, converged)`` with eigenvalues
    ascending and eigenvectors as columns.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    return _finish(_jacobi_numba(a, int(max_sweeps), float(off_tol)))


def jacobi_eigh_numpy(a, max_sweeps=100, off_tol=1e-13):
    """Same contract as :func:`jacobi_eigh_numba`, numpy slicing only."""
    return _finish(_jacobi_numpy(a, int(max_sweeps), float(off_tol)))


# --------------------------------------------------------------------------
# weights[i, j, k] = Re Tr{F_i rho S_j T_k}


@njit(cache=True)
def _triple_numba(first, rho, second, third):
    n1, d, _ = first.shape
    n2 = second.shape[0]
    n3 = third.shape[0]
    out = np.zeros((n1, n2, n3))
    m1 = np.zeros((d, d), dtype=np.complex128)
    m2 = np.zeros((d, d), dtype=np.complex128)
    for i in range(n1):
        for a in range(d):
            for b in range(d):
                acc = 0.0j
                for c in range(d):
                    acc += first[i, a, c] * rho[c, b]
                m1[a, b] = acc
        for j in range(n2):
            for a in range(d):
                for b in range(d):
                    acc = 0.0j
                    for c in range(d):
                        acc += m1[a, c] * second[j, c, b]
                    m2[a, b] = acc
            for k in range(n3):
                acc = 0.0j
                for a in range(d):
                    for b in range(d):
                        acc += m2[a, b] * third[k, b, a]
                out[i, j, k] = acc.real
    return out


def triple_trace_weights_numba(first, rho, second, third):
    """``out[i, j, k] = Re Tr{first[i] @ rho @ second[j] @ third[k]}`` (numba)."""
    args = [np.ascontiguousarray(x, dtype=np.complex128) for x in (first, rho, second, third)]
    return _triple_numba(*args)


def triple_trace_weights_numpy(first, rho, second, third):
    """Same contract as :func:`triple_trace_weights_numba`, via einsum."""
    left = np.einsum("iac,cb,jbd->ijad", first, rho, second, optimize=True)
    return np.einsum("ijab,kba->ijk", left, third, optimize=True).real


if BACKEND == "numba":
    jacobi_eigh = jacobi_eigh_numba
    triple_trace_weights = triple_trace_weights_numba
else:
    jacobi_eigh = jacobi_eigh_numpy
    triple_trace_weights = triple_trace_weights_numpy
