import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpwork.config import ValidationError
from qpwork.distribution import (
    WorkDistribution,
    atomwise_defect,
    char_function_direct,
    distributions_equal,
    moment,
    negate_support,
    pq_distribution,
    pq_weights,
    tpm_distribution,
)
from qpwork.events import dephase, forward_events
from qpwork.process import HamiltonianProcess, thermal_state

from conftest import random_process

Q_VALUES = [0.0, 0.25, 0.5, 0.75, 1.0]


def brute_force_pq(proc, ev, q):
    """Triple sum over (i, j, k) with explicit products, merged by exact support."""
    atoms = {}
    for i, pi in enumerate(ev.pi):
        for j, pj in enumerate(ev.pi):
            for k, pk in enumerate(ev.pi_prime):
                w = round(ev.eps_prime[k] - q * ev.eps[i] - (1 - q) * ev.eps[j], 9)
                atoms[w] = atoms.get(w, 0.0) + np.trace(pi @ proc.initial_state @ pj @ pk).real
    return {w: p for w, p in atoms.items() if abs(p) > 1e-12}


def as_dict(d):
    return {round(w, 9): p for w, p in d.atoms()}


def assert_atoms(d, expected, tol=1e-12):
    got = d.atoms()
    assert len(got) == len(expected), got
    for (w, p), (we, pe) in zip(got, expected):
        assert w == pytest.approx(we, abs=tol)
        assert p == pytest.approx(pe, abs=tol)


def test_identity_process_is_point_mass():
    proc = random_process(0, 3)
    proc = HamiltonianProcess(proc.h_initial, proc.h_initial, np.eye(3), proc.initial_state)
    ev = forward_events(proc)
    for q in Q_VALUES:
        assert_atoms(pq_distribution(proc, ev, q), [(0.0, 1.0)], tol=1e-10)
    assert_atoms(tpm_distribution(proc, ev), [(0.0, 1.0)], tol=1e-10)


def test_hadamard_ground_state(hadamard_ground):
    proc, ev = hadamard_ground
    expected = [(0.0, 0.5), (1.0, 0.5)]
    for q in Q_VALUES:
        assert_atoms(pq_distribution(proc, ev, q), expected)
    assert_atoms(tpm_distribution(proc, ev), expected)


def test_hadamard_plus_state_q1(hadamard_plus):
    proc, ev = hadamard_plus
    d = pq_distribution(proc, ev, 1.0)
    assert_atoms(d, [(-1.0, 0.5), (0.0, 0.5)])
    brute = brute_force_pq(proc, ev, 1.0)
    assert as_dict(d).keys() == brute.keys()
    assert moment(d, 1) == pytest.approx(-0.5, abs=1e-12)


def test_hadamard_plus_half_has_negative_weight(hadamard_plus):
    proc, ev = hadamard_plus
    d = pq_distribution(proc, ev, 0.5)
    brute = brute_force_pq(proc, ev, 0.5)
    for w, p in d.atoms():
        assert p == pytest.approx(brute[round(w, 9)], abs=1e-12)
    assert min(d.p) < -0.4
    assert not distributions_equal(d, tpm_distribution(proc, ev), 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 5), st.sampled_from(Q_VALUES))
def test_matches_brute_force_and_normalizes(seed, n, q):
    proc = random_process(seed, n)
    ev = forward_events(proc)
    d = pq_distribution(proc, ev, q)
    assert d.total() == pytest.approx(1.0, abs=1e-9)
    brute = brute_force_pq(proc, ev, q)
    assert len(d) == len(brute)
    for w, p in d.atoms():
        assert p == pytest.approx(brute[round(w, 9)], abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 5))
def test_first_moment_identity(seed, n):
    proc = random_process(seed, n, state="mixed")
    ev = forward_events(proc)
    rho = proc.initial_state
    expected = np.trace(rho @ proc.final_heisenberg_hamiltonian()).real - np.trace(rho @ proc.h_initial).real
    for q in Q_VALUES:
        assert moment(pq_distribution(proc, ev, q), 1) == pytest.approx(expected, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 5), st.floats(0.0, 3.0))
def test_tpm_reduction_for_incoherent_states(seed, n, beta):
    proc = random_process(seed, n, state="mixed")
    ev = forward_events(proc)
    for rho in (dephase(proc.initial_state, ev.pi), thermal_state(proc.h_initial, beta)):
        p = proc.with_state(rho)
        ptpm = tpm_distribution(p, ev)
        assert np.all(ptpm.p >= -1e-12)
        for q in Q_VALUES:
            assert atomwise_defect(pq_distribution(p, ev, q), ptpm) <= 1e-9


def test_weights_are_q_independent():
    proc = random_process(3, 3)
    ev = forward_events(proc)
    w = pq_weights(proc, ev)
    assert w.shape == (len(ev.pi), len(ev.pi), len(ev.pi_prime))
    # unmerged supports move affinely in q
    e, ep = ev.eps, ev.eps_prime
    s0 = ep[None, None, :] - e[None, :, None]
    s1 = ep[None, None, :] - e[:, None, None]
    for q in Q_VALUES:
        sq = ep[None, None, :] - q * e[:, None, None] - (1 - q) * e[None, :, None]
        np.testing.assert_allclose(sq, (1 - q) * s0 + q * s1, atol=1e-12)
        assert moment(pq_distribution(proc, ev, q), 0) == pytest.approx(w.sum(), abs=1e-12)


def test_tpm_weights_nonnegative():
    for seed in range(10):
        proc = random_process(seed, 4)
        assert np.all(tpm_distribution(proc, forward_events(proc)).p >= -1e-12)


def test_moment_and_char_function_basics(hadamard_ground):
    proc, ev = hadamard_ground
    d = pq_distribution(proc, ev, 0.5)
    assert moment(d, 0) == pytest.approx(1.0, abs=1e-9)
    assert char_function_direct(d, 0.0) == pytest.approx(1.0, abs=1e-9)
    assert char_function_direct(d, np.pi) == pytest.approx(0.0, abs=1e-12)
    point = WorkDistribution.from_atoms([0.0], [1.0])
    for u in (-3.0, 0.7, 10.0):
        assert char_function_direct(point, u) == 1.0
    with pytest.raises(ValidationError):
        moment(d, -1)


def test_from_atoms_merges_and_prunes():
    d = WorkDistribution.from_atoms([1.0, 0.0, 1.0 + 1e-11, 2.0], [0.25, 0.5, 0.25, 1e-14])
    assert d.atoms() == [(0.0, 0.5), (pytest.approx(1.0), 0.5)]
    with pytest.raises(ValidationError):
        WorkDistribution.from_atoms([0.0], [np.nan])


def test_distributions_equal_examples():
    d = WorkDistribution.from_atoms([0.0, 1.0], [0.5, 0.5])
    assert distributions_equal(d, d, 1e-12)
    tol = 1e-6
    assert not distributions_equal(
        WorkDistribution.from_atoms([0.0], [1.0]), WorkDistribution.from_atoms([0.0], [1 - 2 * tol]), tol
    )
    # atom missing on one side counts against weight zero
    assert atomwise_defect(d, WorkDistribution.from_atoms([0.0], [0.5])) == pytest.approx(0.5)


def test_negate_support():
    point = WorkDistribution.from_atoms([0.0], [1.0])
    assert negate_support(point).atoms() == [(0.0, 1.0)]
    d = WorkDistribution.from_atoms([-1.0, 0.0], [0.5, 0.5])
    assert negate_support(d).atoms() == [(0.0, 0.5), (1.0, 0.5)]
    assert negate_support(negate_support(d)).atoms() == d.atoms()


def test_json_and_csv_roundtrip(hadamard_plus):
    proc, ev = hadamard_plus
    d = pq_distribution(proc, ev, 0.5)
    text = d.dumps()
    again = WorkDistribution.from_json(__import__("json").loads(text))
    assert again.dumps() == text
    assert again.q == 0.5
    lines = d.to_csv().splitlines()
    assert lines[0] == "w,p" and len(lines) == len(d) + 1
