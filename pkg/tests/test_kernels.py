import os
import subprocess
import sys

import numpy as np
import pytest

from quditcode import _kernels
from quditcode.coding import CodingScheme
from quditcode.harness import monte_carlo_records, run_trial

needs_numba = pytest.mark.skipif(not _kernels.NUMBA_AVAILABLE, reason="numba not installed")


def test_digit_table():
    table = _kernels.digit_table(3, 2)
    assert table.tolist()[:4] == [[0, 0, 0], [0, 0, 1], [0, 1, 0], [0, 1, 1]]
    assert table.shape == (8, 3)


@needs_numba
@pytest.mark.parametrize("n,d,r", [(1, 2, 0), (3, 2, 1), (3, 3, 2), (4, 3, 1), (2, 5, 0)])
def test_ball_incidence_parity(n, d, r):
    strings = _kernels.digit_table(n, d)
    a = _kernels.ball_incidence_numpy(strings, r)
    b = _kernels.ball_incidence_numba(strings, r)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, a.T)


@needs_numba
@pytest.mark.parametrize("n,d,r", [(2, 2, 1), (3, 3, 2), (4, 2, 3)])
def test_ball_sums_parity(n, d, r):
    strings = _kernels.digit_table(n, d)
    w = np.random.default_rng(n * d).random(d**n)
    a = _kernels.ball_sums_numpy(strings, w, r)
    b = _kernels.ball_sums_numba(strings, w, r)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)
    np.testing.assert_allclose(a, _kernels.ball_incidence_numpy(strings, r) @ w, atol=1e-13)


def _batch_inputs(n, d, subset, trials, seed, k):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((trials, n, d, 2))
    amps = g[..., 0] + 1j * g[..., 1]
    amps /= np.linalg.norm(amps, axis=2, keepdims=True)
    u = rng.random((trials, 2))
    strings = _kernels.digit_table(n, d)
    mask = np.zeros(n, dtype=bool)
    mask[[t - 1 for t in subset]] = True
    ball = _kernels.ball_incidence_numpy(strings, k)
    agree = _kernels.ball_incidence_numpy(np.ascontiguousarray(strings[:, ~mask]), 0)
    return amps, u, strings, mask, ball, agree


@needs_numba
@pytest.mark.parametrize("n,d,k,subset", [
    (2, 2, 1, (1,)), (3, 2, 2, (1, 3)), (3, 3, 1, (2,)), (4, 2, 2, (2, 4)),
    # large balls take the axis-by-axis summation path
    (4, 3, 2, (1, 3)), (5, 3, 3, (2, 4, 5)), (6, 2, 4, (1, 2, 5, 6)),
])
def test_product_trials_parity(n, d, k, subset):
    args = _batch_inputs(n, d, subset, 3000, 11, k)
    dim = float(CodingScheme(n, d, k).dimension)
    a = _kernels.product_trials_numpy(*args, dim, 1e-14)
    b = _kernels.product_trials_numba(*args, dim, 1e-14)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    np.testing.assert_allclose(a[2], b[2], atol=1e-12)
    np.testing.assert_allclose(a[3], b[3], atol=1e-12)
    assert np.all(np.isnan(a[3]) == ~a[1])


@pytest.mark.parametrize("n,d,k,subset", [(2, 2, 1, (1,)), (3, 2, 2, (2, 3)), (3, 3, 1, (3,)), (4, 3, 2, (2, 4))])
def test_batch_replays_engine(n, d, k, subset):
    scheme = CodingScheme(n, d, k)
    batch = monte_carlo_records(scheme, subset, 200, master_seed=31)
    for rec in batch:
        ref = run_trial(scheme, subset, "product", seed=31, trial=rec.trial)
        assert rec.outcome == ref.outcome
        assert rec.success == ref.success
        assert abs(rec.conditional_success_probability - ref.conditional_success_probability) <= 1e-12
        if rec.success:
            assert abs(rec.fidelity - ref.fidelity) <= 1e-12


def test_env_flag_selects_numpy():
    code = "from quditcode import _kernels as k; print(k.USE_NUMBA, k.product_trials.__name__)"
    env = dict(os.environ, QUDITCODE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "product_trials_numpy"]
    env["QUDITCODE_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    expected = "product_trials_numba" if _kernels.NUMBA_AVAILABLE else "product_trials_numpy"
    assert out.stdout.split()[1] == expected
