"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line shown in the terminal summary.
"""
import time

import numpy as np
import pytest

from quditcode.coding import (
    CodingScheme,
    all_outcomes,
    hamming_ball,
    subsets_of_size,
    subspace_dimension,
    verify_completeness,
)
from quditcode.harness import (
    brute_force_oracle,
    correlation_control,
    entanglement_experiment,
    golden_suite,
    mixed_state_experiment,
    monte_carlo,
    run_trial,
)
from quditcode.protocol import exact_success_probability, joint_table
from quditcode.state import (
    StateVector,
    SystemLayout,
    environment_entangled_state,
    haar_product_state,
    purified_product_state,
    random_density_matrix,
    random_environment_coeffs,
)

from conftest import record_acceptance

GRID = [CodingScheme(n, d, k) for n in range(1, 5) for d in (2, 3) for k in range(1, n + 1)]
CELLS = [(s, sub) for s in GRID for sub in subsets_of_size(s.n, s.k)]


def generic_state(n, d, rng):
    g = rng.standard_normal((d**n, 2))
    return StateVector(SystemLayout.qudits(n, d), (g[:, 0] + 1j * g[:, 1]) / np.linalg.norm(g))


def test_c1_povm_completeness():
    worst, slowest = 0.0, 0.0
    ok = True
    for s in GRID:
        t0 = time.perf_counter()
        rep = verify_completeness(s, dense=True)
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, rep.max_deviation)
        ok &= rep.ok
    ok = ok and worst <= 1e-10 and slowest <= 1.0
    record_acceptance("C1 POVM completeness", ok, f"max deviation {worst:.2e}, slowest cell {slowest:.3f}s")
    assert ok


def test_c2_dimension_formula():
    values = {(2, 2, 1): 3, (3, 2, 1): 4, (3, 2, 2): 7, (2, 3, 1): 5}
    ok = all(subspace_dimension(CodingScheme(*key)) == v for key, v in values.items())
    ok &= all(subspace_dimension(s) == s.d**s.n for s in GRID if s.k == s.n)
    for s in GRID:
        D = subspace_dimension(s)
        ok &= all(len(hamming_ball(s, m)) == D for m in all_outcomes(s))
    record_acceptance("C2 dimension formula", ok, "3, 4, 7, 5 and d^n at k=n; every ball checked")
    assert ok


def test_c3_state_independent_success_probability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240603)
    states = {}
    for n, d in sorted({(s.n, s.d) for s in GRID}):
        batch = [haar_product_state(n, d, rng)[0] for _ in range(100)]
        batch += [environment_entangled_state([random_environment_coeffs(d, d, rng) for _ in range(n)])
                  for _ in range(20)]
        batch += [purified_product_state([random_density_matrix(d, rng) for _ in range(n)]) for _ in range(10)]
        batch += [generic_state(n, d, rng) for _ in range(5)]
        states[(n, d)] = batch
    worst = 0.0
    count = 0
    for s, subset in CELLS:
        for psi in states[(s.n, s.d)]:
            worst = max(worst, abs(exact_success_probability(psi, s, subset) - s.p_theory))
            count += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 120
    record_acceptance("C3 success probability d^k/D_k", ok,
                      f"{count} evaluations, max error {worst:.2e}, {elapsed:.1f}s")
    assert ok


@pytest.mark.parametrize("scheme,subset,value", [
    (CodingScheme(2, 2, 1), (1,), 2 / 3),
    (CodingScheme(3, 2, 1), (1,), 1 / 2),
    (CodingScheme(3, 2, 2), (1, 2), 4 / 7),
])
def test_c4_golden_probabilities(scheme, subset, value):
    psi, _ = haar_product_state(scheme.n, scheme.d, np.random.default_rng(1))
    exact = exact_success_probability(psi, scheme, subset)
    est = monte_carlo(scheme, subset, 100_000, master_seed=20240604)
    se = np.sqrt(value * (1 - value) / est.trials)
    ok = abs(exact - value) <= 1e-12 and abs(est.p_hat - value) <= 4 * se
    record_acceptance(f"C4 golden value {scheme} subset {subset}", ok,
                      f"exact {exact:.12f}, MC {est.p_hat:.5f} +/- {se:.5f} vs {value:.5f}")
    assert ok


def test_c5_perfect_fidelity_on_success():
    successes, worst = 0, 1.0
    for i, (s, subset) in enumerate(CELLS):
        est = monte_carlo(s, subset, 400, master_seed=1000 + i)
        successes += est.successes
        if est.min_fidelity is not None:
            worst = min(worst, est.min_fidelity)
    for source in ("entangled", "mixed"):
        for i, (s, subset) in enumerate(CELLS[:20]):
            for t in range(40):
                rec = run_trial(s, subset, source, seed=5000 + i, trial=t)
                if rec.success:
                    successes += 1
                    worst = min(worst, rec.fidelity)
    ok = successes >= 10_000 and worst >= 1 - 1e-10
    record_acceptance("C5 perfect fidelity on success", ok,
                      f"{successes} successful trials, min fidelity {worst:.15f}")
    assert ok


def test_c6_entanglement_preservation():
    rng = np.random.default_rng(6)
    bell = np.eye(2) / np.sqrt(2)
    s221 = CodingScheme(2, 2, 1)
    bell_rep = entanglement_experiment(s221, (1,), [[bell, random_environment_coeffs(2, 2, rng)]])
    bell_ok = all(abs(r["entropy_before"] - 1) <= 1e-12 and abs(r["entropy_after"] - 1) <= 1e-9
                  for r in bell_rep.rows)
    worst, fid, inputs = bell_rep.max_entropy_change, bell_rep.min_fidelity, 1
    configs = [(s221, (1,)), (CodingScheme(3, 2, 2), (1, 3)), (CodingScheme(2, 3, 1), (2,)),
               (CodingScheme(3, 3, 1), (3,))]
    for i in range(100):
        s, subset = configs[i % len(configs)]
        coeffs = [random_environment_coeffs(s.d, s.d, rng) for _ in range(s.n)]
        rep = entanglement_experiment(s, subset, [coeffs])
        worst = max(worst, rep.max_entropy_change)
        fid = min(fid, rep.min_fidelity)
        inputs += 1
    ok = bell_ok and worst <= 1e-9 and fid >= 1 - 1e-10
    record_acceptance("C6 entanglement preservation", ok,
                      f"{inputs} inputs, max entropy change {worst:.2e}, Bell case exact: {bell_ok}")
    assert ok


def test_c7_mixed_states():
    rng = np.random.default_rng(7)
    configs = [(CodingScheme(2, 2, 1), (1,)), (CodingScheme(3, 2, 2), (2, 3)), (CodingScheme(2, 3, 1), (1,))]
    worst = 0.0
    for i in range(50):
        s, subset = configs[i % len(configs)]
        rhos = [random_density_matrix(s.d, rng, rank=int(rng.integers(1, s.d + 1))) for _ in range(s.n)]
        worst = max(worst, mixed_state_experiment(s, subset, [rhos]).max_trace_distance)
    ok = worst <= 1e-9
    record_acceptance("C7 mixed states", ok, f"50 inputs, max trace distance {worst:.2e}")
    assert ok


def test_c8_negative_control():
    s221 = CodingScheme(2, 2, 1)
    bell = StateVector(SystemLayout.qudits(2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
    rep = correlation_control(s221, (1,), bell)
    ok = rep.min_fidelity <= 1 - 1e-3 and abs(rep.success_probability - 2 / 3) <= 1e-10
    rng = np.random.default_rng(8)
    s321 = CodingScheme(3, 2, 1)
    generic = generic_state(3, 2, rng)
    rep3 = correlation_control(s321, (2,), generic)
    ok &= rep3.min_fidelity <= 1 - 1e-3 and abs(rep3.success_probability - 0.5) <= 1e-10
    record_acceptance("C8 cross-boundary negative control", ok,
                      f"min fidelity {rep.min_fidelity:.4f}, success probability {rep.success_probability:.12f}")
    assert ok


def test_c9_oracle_equivalence():
    rng = np.random.default_rng(9)
    worst = 0.0
    cells = 0
    for s, subset in CELLS:
        if s.n_strings > 256:
            continue
        inputs = [generic_state(s.n, s.d, rng)]
        if s.n_strings <= 9:
            inputs.append(environment_entangled_state(
                [random_environment_coeffs(s.d, 2, rng) for _ in range(s.n)]))
        for psi in inputs:
            oracle = brute_force_oracle(s, subset, psi)
            engine = joint_table(psi, s, subset)
            worst = max(worst,
                        np.max(np.abs(oracle.outcome_probabilities - engine.outcome_probabilities)),
                        np.max(np.abs(oracle.success_joint - engine.success_joint)))
        cells += 1
    ok = worst <= 1e-12
    record_acceptance("C9 oracle equivalence", ok, f"{cells} cells, max entrywise gap {worst:.2e}")
    assert ok


def test_c10_worked_examples():
    checks = golden_suite()
    failed = [c.name for c in checks if not c.passed]
    ok = not failed
    record_acceptance("C10 worked examples", ok, f"{len(checks)} checks" + (f", failed: {failed}" if failed else ""))
    assert ok
