"""Exit criteria, one test per criterion, each at its pinned tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import numpy as np
import pytest

from qpwork.detector import (
    chi_backward_operational,
    chi_q_operational,
    closed_form_coherence_ratio,
    simulated_coherence_ratio,
)
from qpwork.distribution import (
    atomwise_defect,
    char_function_direct,
    moment,
    negate_support,
    pq_distribution,
    tpm_distribution,
)
from qpwork.events import check_axioms, dephase, forward_events, random_density_matrix
from qpwork.linalg import hermitian_eig, unitarity_defect
from qpwork.process import HamiltonianSchedule, propagator, thermal_state
from qpwork.reversal import (
    backward_pq,
    backward_tpm,
    find_backward_tpm_witness,
    find_class_witness,
    incoherent_backward_process,
    operational_backward_pq,
    reverse,
    weight_invariance_defect,
)
from qpwork.scenario import generate_scenario

from conftest import hadamard_process, PLUS, record_acceptance

Q_ALL = [0.0, 0.25, 0.5, 0.75, 1.0]
Q_ENDPOINTS = [0.0, 1.0]
U_GRID = np.linspace(-4.0, 4.0, 17)
N_SCENARIOS = 50


@pytest.fixture(scope="module")
def scenarios():
    """50 seeded random ramp scenarios, dims cycling through 2..5."""
    out = []
    for seed in range(N_SCENARIOS):
        sc = generate_scenario(seed, 2 + seed % 4)
        ev = forward_events(sc.process)
        out.append((sc, ev, reverse(sc.process, ev)))
    return out


def _all_distributions(proc, ev, b, q):
    return [pq_distribution(proc, ev, q), tpm_distribution(proc, ev), backward_pq(b, q), backward_tpm(b), operational_backward_pq(b, q)]


def test_1_normalization(scenarios):
    worst = 0.0
    for sc, ev, b in scenarios:
        for q in Q_ALL:
            for d in _all_distributions(sc.process, ev, b, q):
                worst = max(worst, abs(d.total() - 1.0))
    ok = record_acceptance(1, "normalization of p_q, p_TPM, p-bar_q, p-bar_TPM, p~_q", worst <= 1e-9, f"max |sum - 1| = {worst:.2e} (tol 1e-9)")
    assert ok


def test_2_time_reversal_symmetry(scenarios):
    worst = 0.0
    for sc, ev, b in scenarios:
        for q in Q_ALL:
            worst = max(worst, atomwise_defect(backward_pq(b, q), negate_support(pq_distribution(sc.process, ev, q))))
    ok = record_acceptance(2, "p-bar_q(w) = p_q(-w)", worst <= 1e-10, f"max atom defect = {worst:.2e} (tol 1e-10)")
    assert ok


def test_3_tpm_reductions(scenarios):
    rng = np.random.default_rng(2024)
    fwd = 0.0
    op_bwd = 0.0
    bar_end = 0.0
    for sc, ev, _ in scenarios:
        proc = sc.process
        dephased = proc.with_state(dephase(random_density_matrix(rng, proc.dim), ev.pi))
        thermal = proc.with_state(thermal_state(proc.h_initial, rng.uniform(0.1, 3.0)))
        for p in (dephased, thermal):
            ptpm = tpm_distribution(p, ev)
            for q in Q_ALL:
                fwd = max(fwd, atomwise_defect(pq_distribution(p, ev, q), ptpm))
        inc = incoherent_backward_process(proc.h_initial, proc.h_final, proc.propagator, random_density_matrix(rng, proc.dim))
        b = reverse(inc, forward_events(inc))
        btpm = backward_tpm(b)
        for q in Q_ALL:
            op_bwd = max(op_bwd, atomwise_defect(operational_backward_pq(b, q), btpm))
        for q in Q_ENDPOINTS:
            bar_end = max(bar_end, atomwise_defect(backward_pq(b, q), btpm))

    hadamard = hadamard_process(PLUS)
    hb = reverse(hadamard, forward_events(hadamard))
    regression = atomwise_defect(backward_pq(hb, 0.5), backward_tpm(hb))
    search = find_backward_tpm_witness(3, seed=3, q=0.5)

    ok = all((fwd <= 1e-9, op_bwd <= 1e-9, bar_end <= 1e-9, regression > 1e-6, search.found))
    record_acceptance(
        3,
        "TPM reductions",
        ok,
        f"p_q vs p_TPM {fwd:.2e}, p~_q vs p-bar_TPM {op_bwd:.2e}, p-bar_q vs p-bar_TPM at q=0,1 {bar_end:.2e} (tol 1e-9); "
        f"q=1/2 counterexample defect {regression:.3f} (Hadamard), {search.defect:.3f} (search, {search.draws} draws) (need > 1e-6)",
    )
    assert ok


def test_4_class_coincidence(scenarios):
    worst = 0.0
    for _, _, b in scenarios:
        for q in Q_ENDPOINTS:
            worst = max(worst, atomwise_defect(operational_backward_pq(b, q), backward_pq(b, q)))
    witness = find_class_witness(3, seed=4, q=0.5, draws=100, threshold=1e-6)
    ok = worst <= 1e-10 and witness.found
    record_acceptance(
        4,
        "p~_q = p-bar_q at q=0,1; differs at q=1/2",
        ok,
        f"endpoint defect {worst:.2e} (tol 1e-10); q=1/2 witness defect {witness.defect:.3f} after {witness.draws} draws (need > 1e-6 within 100)",
    )
    assert ok


def test_5_weight_invariance(scenarios):
    worst = max(weight_invariance_defect(sc.process, ev) for sc, ev, _ in scenarios)
    ok = record_acceptance(5, "quasiprobability weights invariant under reversal", worst <= 1e-12, f"max defect {worst:.2e} (tol 1e-12)")
    assert ok


def test_6_axiom_oracles(scenarios):
    sc = scenarios[3][0]
    report = check_axioms(sc.process.initial_state, seed=6, trials=200, tol=1e-9)
    holds = {k: c.max_defect for k, c in report.checks.items() if not c.expect_violation}
    tpm = report.checks["TPM_Q3_violation"]
    ok = report.passed and tpm.witness is not None and tpm.max_defect > 1e-9
    worst_name = max(holds, key=holds.get)
    record_acceptance(
        6,
        "axiom oracles over 200 draws",
        ok,
        f"{len(holds)} axioms hold, worst {worst_name} {holds[worst_name]:.2e} (tol 1e-9); Tr{{EFE rho}} additivity defect {tpm.max_defect:.3f} with witness",
    )
    assert ok


def test_7_detector_protocol(scenarios):
    fourier = 0.0
    backward = 0.0
    sim = 0.0
    rng = np.random.default_rng(7)
    pool = [(hadamard_process(PLUS),)] + [(sc.process,) for sc, _, _ in scenarios[:10]]
    for (proc,) in pool:
        ev = forward_events(proc)
        b = reverse(proc, ev)
        for q in (0.0, 0.5, 1.0):
            fwd = pq_distribution(proc, ev, q)
            op = operational_backward_pq(b, q)
            for u in U_GRID:
                fourier = max(fourier, abs(chi_q_operational(proc, u, q) - char_function_direct(fwd, u)))
                chi_b = chi_backward_operational(b, proc.h_final, proc.h_initial, u, q)
                backward = max(backward, abs(chi_b - char_function_direct(op, u)))
        for lam, lam_p in rng.uniform(-5, 5, size=(20, 2)):
            sim = max(sim, abs(simulated_coherence_ratio(proc, lam, lam_p) - closed_form_coherence_ratio(proc, lam, lam_p)))
    ok = fourier <= 1e-8 and backward <= 1e-8 and sim <= 1e-9
    record_acceptance(
        7,
        "detector protocol",
        ok,
        f"chi_q vs Fourier sum {fourier:.2e} (tol 1e-8), backward chi vs p~_q {backward:.2e} (tol 1e-8), kicked simulation vs closed form {sim:.2e} (tol 1e-9)",
    )
    assert ok


def test_8_first_moment(scenarios):
    worst = 0.0
    for sc, ev, _ in scenarios:
        proc = sc.process
        rho = proc.initial_state
        expected = np.trace(rho @ proc.final_heisenberg_hamiltonian()).real - np.trace(rho @ proc.h_initial).real
        for q in Q_ALL:
            worst = max(worst, abs(moment(pq_distribution(proc, ev, q), 1) - expected))
    ok = record_acceptance(8, "mean of p_q = <H_H(tau)> - <H(0)>", worst <= 1e-9, f"max defect {worst:.2e} (tol 1e-9)")
    assert ok


def test_9_numerics(scenarios):
    recon = 0.0
    unit = 0.0
    cauchy = True
    for sc, _, _ in scenarios:
        proc = sc.process
        for h in (proc.h_initial, proc.h_final):
            recon = max(recon, float(np.max(np.abs(hermitian_eig(h).reconstruct() - h))))
        unit = max(unit, unitarity_defect(proc.propagator))
        tau = sc.raw["schedule"]["tau"]
        us = [propagator(HamiltonianSchedule.linear_ramp(proc.h_initial, proc.h_final, tau, n)) for n in (16, 32, 64)]
        unit = max(unit, *(unitarity_defect(u) for u in us))
        cauchy &= bool(np.linalg.norm(us[2] - us[1]) < np.linalg.norm(us[1] - us[0]))
    ok = recon <= 1e-9 and unit <= 1e-10 and cauchy
    record_acceptance(
        9,
        "numerics",
        ok,
        f"eig reconstruction {recon:.2e} (tol 1e-9), unitarity {unit:.2e} (tol 1e-10), ramp 16->32->64 Cauchy-decreasing: {cauchy}",
    )
    assert ok
