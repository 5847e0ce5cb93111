"""Verification campaigns: single trials, Monte Carlo, sweeps and oracles.

Randomness: trial ``t`` of a campaign with master seed ``s`` draws from
``numpy.random.default_rng([s, t])``, so any trial can be replayed alone
and results never depend on how trials are scheduled. A product-state trial
consumes, in order, ``n*d*2`` standard normals (the local states), one
uniform for Alice's outcome and one uniform for Bob's branch.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .coding import (
    DEFAULT_CAP,
    PROB_CUTOFF,
    CodingScheme,
    _incidence,
    _strings,
    all_outcomes,
    encoding_operator,
    outcome_str,
    subsets_of_size,
)
from .linalg import (
    embed_on_subsystems,
    fidelity_pure,
    fidelity_state_density,
    partial_trace,
    reduced_density,
    trace_distance,
)
from .protocol import (
    Decoder,
    classical_message,
    decode,
    decode_projectors,
    encode,
    exact_success_probability,
    joint_table,
    normalize_subset,
)
from .state import (
    DATA,
    StateVector,
    SystemLayout,
    entanglement_entropy,
    environment_entangled_state,
    haar_product_state,
    haar_random_local,
    purified_product_state,
    purify,
    random_density_matrix,
    random_environment_coeffs,
)

log = logging.getLogger(__name__)

__all__ = [
    "SOURCES",
    "CSV_COLUMNS",
    "trial_rng",
    "TrialRecord",
    "run_trial",
    "MonteCarloEstimate",
    "monte_carlo",
    "monte_carlo_records",
    "OracleTable",
    "brute_force_oracle",
    "GoldenCheck",
    "golden_suite",
    "EntanglementReport",
    "entanglement_experiment",
    "MixedStateReport",
    "mixed_state_experiment",
    "CorrelationReport",
    "correlation_control",
    "SweepRow",
    "default_grid",
    "sweep",
    "sweep_to_csv",
    "sweep_to_json",
]

SOURCES = ("product", "entangled", "mixed", "correlated")
CSV_COLUMNS = ["n", "d", "k", "subset", "D_k", "p_theory", "p_exact", "p_mc", "stderr", "trials", "seed"]


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(master_seed), int(trial)])


# ---------------------------------------------------------------------------
# input states
# ---------------------------------------------------------------------------


@dataclass
class _Input:
    state: StateVector
    target: np.ndarray  # pure state of the subset (with environments), or None
    target_rho: np.ndarray | None = None  # reduced data state of the subset


def _kron_all(vectors):
    out = np.ones(1, dtype=np.complex128)
    for v in vectors:
        out = np.kron(out, v)
    return out


def _make_input(source, scheme, subset, rng) -> _Input:
    n, d = scheme.n, scheme.d
    if source == "product":
        state, locs = haar_product_state(n, d, rng)
        return _Input(state, _kron_all(locs[t - 1] for t in subset))
    if source == "entangled":
        coeffs = [random_environment_coeffs(d, d, rng) for _ in range(n)]
        state = environment_entangled_state(coeffs)
        return _Input(state, _kron_all(coeffs[t - 1].T.reshape(-1) for t in subset))
    if source == "mixed":
        rhos = [random_density_matrix(d, rng) for _ in range(n)]
        state = purified_product_state(rhos)
        pairs = [purify(rhos[t - 1]).amplitudes for t in subset]
        rho_sub = rhos[subset[0] - 1]
        for t in subset[1:]:
            rho_sub = np.kron(rho_sub, rhos[t - 1])
        return _Input(state, _kron_all(pairs), rho_sub)
    if source == "correlated":
        g = rng.standard_normal((d**n, 2))
        amps = g[:, 0] + 1j * g[:, 1]
        state = StateVector(SystemLayout.qudits(n, d), amps / np.linalg.norm(amps))
        rho_sub = reduced_density(state.amplitudes, state.layout, [t - 1 for t in subset])
        return _Input(state, None, rho_sub)
    raise ValueError(f"unknown state source {source!r}; expected one of {SOURCES}")


def _score(inp: _Input, recovered: StateVector) -> float:
    if inp.target is not None:
        return fidelity_pure(recovered.amplitudes, inp.target)
    return fidelity_state_density(recovered.amplitudes, inp.target_rho)


# ---------------------------------------------------------------------------
# trials and Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    trial: int
    scheme: CodingScheme
    subset: tuple[int, ...]
    source: str
    outcome: tuple[int, ...]
    outcome_probability: float
    success: bool
    conditional_success_probability: float
    fidelity: float | None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["scheme"] = self.scheme.to_dict()
        out["subset"] = list(self.subset)
        out["outcome"] = outcome_str(self.outcome)
        return out


def run_trial(
    scheme: CodingScheme,
    subset,
    source: str = "product",
    rng: np.random.Generator | None = None,
    *,
    seed: int = 0,
    trial: int = 0,
) -> TrialRecord:
    """Prepare an input, encode, send the message, decode, score the result.

    Without ``rng`` the trial stream ``trial_rng(seed, trial)`` is used.
    Fidelity is against the original subset state; for the ``correlated``
    source the subset has no pure state of its own and ``<psi|rho|psi>`` is
    reported instead.
    """
    subset = normalize_subset(subset, scheme)
    rng = trial_rng(seed, trial) if rng is None else rng
    inp = _make_input(source, scheme, subset, rng)
    bob = Decoder(scheme, subset)
    record = encode(inp.state, scheme, rng)
    result = bob.decode(classical_message(record), record.post_state, rng)
    fid = None
    if result.success:
        if result.recovered is None:
            raise RuntimeError("successful decode did not yield a separable subset state")
        fid = _score(inp, result.recovered)
    return TrialRecord(
        seed, trial, scheme, subset, source, record.outcome, record.outcome_probability,
        result.success, result.conditional_success_probability, fid,
    )


@dataclass(frozen=True)
class MonteCarloEstimate:
    scheme: CodingScheme
    subset: tuple[int, ...]
    source: str
    trials: int
    successes: int
    seed: int
    min_fidelity: float | None

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return float(np.sqrt(p * (1.0 - p) / self.trials))

    @property
    def theory_stderr(self) -> float:
        p = self.scheme.p_theory
        return float(np.sqrt(p * (1.0 - p) / self.trials))

    def z_score(self) -> float:
        se = self.theory_stderr
        diff = self.p_hat - self.scheme.p_theory
        return 0.0 if se == 0.0 else float(diff / se)


def _product_batch(scheme, subset, trials, master_seed, cap):
    scheme.check_cap(cap)
    n, d = scheme.n, scheme.d
    g = np.empty((trials, n, d, 2))
    u = np.empty((trials, 2))
    for t in range(trials):
        rng = trial_rng(master_seed, t)
        g[t] = rng.standard_normal((n, d, 2))
        u[t] = rng.random(2)
    amps = g[..., 0] + 1j * g[..., 1]
    amps /= np.linalg.norm(amps, axis=2, keepdims=True)
    strings = _strings(n, d)
    mask = np.zeros(n, dtype=np.bool_)
    mask[[t - 1 for t in subset]] = True
    ball = _incidence(n, d, scheme.k)
    agree = _kernels.ball_incidence(np.ascontiguousarray(strings[:, ~mask]), 0)
    return _kernels.product_trials(
        amps, u, strings, mask, ball, agree, float(scheme.dimension), PROB_CUTOFF
    )


def monte_carlo(
    scheme: CodingScheme,
    subset,
    trials: int,
    master_seed: int,
    source: str = "product",
    cap: int | None = DEFAULT_CAP,
) -> MonteCarloEstimate:
    """Estimate the decoding success rate from ``trials`` independent runs.

    Product-state campaigns run through the compiled batch kernel; other
    sources go through :func:`run_trial` one by one.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    subset = normalize_subset(subset, scheme)
    if source == "product":
        _, success, _, fid = _product_batch(scheme, subset, trials, master_seed, cap)
        successes = int(success.sum())
        min_fid = float(np.nanmin(fid)) if successes else None
    else:
        successes, fids = 0, []
        for t in range(trials):
            rec = run_trial(scheme, subset, source, seed=master_seed, trial=t)
            successes += rec.success
            if rec.success:
                fids.append(rec.fidelity)
        min_fid = min(fids) if fids else None
    return MonteCarloEstimate(scheme, subset, source, trials, successes, master_seed, min_fid)


def monte_carlo_records(
    scheme: CodingScheme, subset, trials: int, master_seed: int, cap: int | None = DEFAULT_CAP
) -> list[TrialRecord]:
    """Per-trial records of a product-state campaign from the batch kernel."""
    subset = normalize_subset(subset, scheme)
    idx, success, cond, fid = _product_batch(scheme, subset, trials, master_seed, cap)
    strings = _strings(scheme.n, scheme.d)
    out = []
    for t in range(trials):
        out.append(
            TrialRecord(
                master_seed, t, scheme, subset, "product",
                tuple(int(x) for x in strings[idx[t]]), float("nan"),
                bool(success[t]), float(cond[t]),
                float(fid[t]) if success[t] else None,
            )
        )
    return out


# ---------------------------------------------------------------------------
# independent oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleTable:
    outcomes: list[tuple[int, ...]]
    outcome_probabilities: np.ndarray
    success_joint: np.ndarray

    @property
    def success_probability(self) -> float:
        return float(self.success_joint.sum())


def brute_force_oracle(scheme: CodingScheme, subset, state: StateVector, cap: int = 1024) -> OracleTable:
    """Exact (outcome, success) law from explicit projector algebra.

    Balls and agree-sets are found by comparing digit strings one by one, the
    operators are assembled as sums of ``|x><x|`` and embedded densely on the
    register. Nothing from the protocol engine is used.
    """
    n, d, k = scheme.n, scheme.d, scheme.k
    if d**n > cap:
        raise ValueError(f"d^n = {d**n} exceeds oracle cap {cap}")
    subset = sorted(set(int(t) for t in subset))
    if len(subset) != k:
        raise ValueError("subset size must equal k")
    strings = list(product(range(d), repeat=n))
    pos = {s: i for i, s in enumerate(strings)}
    N = len(strings)
    lay = state.layout
    data_pos = [
        next(p for p, s in enumerate(lay.subsystems) if s.role == DATA and s.qudit == t)
        for t in range(1, n + 1)
    ]
    psi = np.asarray(state.amplitudes)

    def ket(x):
        e = np.zeros(N, dtype=np.complex128)
        e[pos[x]] = 1.0
        return e

    probs = np.zeros(N)
    joint = np.zeros(N)
    for mi, m in enumerate(strings):
        ball = [x for x in strings if sum(a != b for a, b in zip(x, m)) <= k]
        M = sum(np.outer(ket(x), ket(x)) for x in ball) / np.sqrt(len(ball))
        P_S = np.zeros((N, N), dtype=np.complex128)
        for y in product(range(d), repeat=k):
            x = list(m)
            for t, digit in zip(subset, y):
                x[t - 1] = digit
            P_S += np.outer(ket(tuple(x)), ket(tuple(x)))
        big_m = embed_on_subsystems(M, lay, data_pos)
        big_s = embed_on_subsystems(P_S, lay, data_pos)
        after = big_m @ psi
        kept = big_s @ after
        probs[mi] = np.vdot(after, after).real
        joint[mi] = np.vdot(kept, kept).real
    return OracleTable(strings, probs, joint)


# ---------------------------------------------------------------------------
# golden checks of the worked examples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoldenCheck:
    name: str
    passed: bool
    detail: str = ""


def _diag_of(strings_on, n, d):
    out = np.zeros(d**n)
    for s in strings_on:
        out[int(s, d)] = 1.0
    return out


def _op_matches(op, support, coeff, n, d, tol=1e-12):
    expected = np.diag(coeff * _diag_of(support, n, d))
    return bool(np.max(np.abs(op - expected)) <= tol)


def golden_suite(seed: int = 2024) -> list[GoldenCheck]:
    """Reproduce the worked two- and three-qubit examples exactly."""
    rng = np.random.default_rng(seed)
    checks: list[GoldenCheck] = []

    def add(name, ok, detail=""):
        checks.append(GoldenCheck(name, bool(ok), detail))

    # two qubits into a qutrit
    s221 = CodingScheme(2, 2, 1)
    expected_221 = {
        "00": ["00", "01", "10"],
        "01": ["01", "00", "11"],
        "10": ["10", "11", "00"],
        "11": ["11", "10", "01"],
    }
    for m, support in expected_221.items():
        op = encoding_operator(s221, m)
        add(f"M_{m[0]},{m[1]} two-qubit operator", _op_matches(op, support, 1 / np.sqrt(3), 2, 2),
            "coefficient 1/sqrt(3)")

    q1, q2 = haar_random_local(2, rng), haar_random_local(2, rng)
    (a1, b1), (a2, b2) = q1, q2
    psi = StateVector(SystemLayout.qudits(2, 2), np.kron(q1, q2))
    rec = encode(psi, s221, outcome=(0, 0))
    exp = np.array([a1 * a2, a1 * b2, b1 * a2, 0.0])
    exp /= np.linalg.norm(exp)
    add("qutrit post-measurement state", np.allclose(rec.post_state.amplitudes, exp, atol=1e-12))

    for subset, s_sup, f_sup in [((1,), ["00", "10"], ["01"]), ((2,), ["00", "01"], ["10"])]:
        P_S, P_F = decode_projectors(s221, (0, 0), subset)
        ok = _op_matches(P_S, s_sup, 1.0, 2, 2) and _op_matches(P_F, f_sup, 1.0, 2, 2)
        add(f"two-qubit decode projectors for qubit {subset[0]}", ok)

    res = decode(rec, (1,), force=True)
    fid = fidelity_pure(res.recovered.amplitudes, q1)
    add("recovered first qubit equals input", abs(fid - 1) <= 1e-12, f"fidelity={fid!r}")

    # environment-entangled qubits
    c1, c2 = random_environment_coeffs(2, 2, rng), random_environment_coeffs(2, 2, rng)
    env_state = environment_entangled_state([c1, c2])
    env_rec = encode(env_state, s221, outcome=(0, 0))
    psi1, phi1 = c1[0], c1[1]
    psi2, phi2 = c2[0], c2[1]
    e0, e1 = np.eye(2)

    def reg(eA, xA, eB, xB):
        return np.kron(np.kron(eA, xA), np.kron(eB, xB))

    expected = reg(psi1, e0, psi2, e0) + reg(psi1, e0, phi2, e1) + reg(phi1, e1, psi2, e0)
    expected /= np.linalg.norm(expected)
    add("environment-entangled collapse", np.allclose(env_rec.post_state.amplitudes, expected, atol=1e-12))
    env_res = decode(env_rec, (1,), force=True)
    fid = fidelity_pure(env_res.recovered.amplitudes, c1.T.reshape(-1))
    add("recovered qubit keeps its environment", abs(fid - 1) <= 1e-12, f"fidelity={fid!r}")

    # two qudits into dimension 2d-1
    for d in (3, 4):
        sch = CodingScheme(2, d, 1)
        ok = sch.dimension == 2 * d - 1
        for i in range(d):
            for j in range(d):
                support = {(i, j)} | {(p, j) for p in range(d)} | {(i, q) for q in range(d)}
                diag = np.zeros(d * d)
                for p, q in support:
                    diag[p * d + q] = 1.0
                ok &= np.allclose(encoding_operator(sch, (i, j)), np.diag(diag) / np.sqrt(2 * d - 1), atol=1e-12)
        add(f"two qudits (d={d}) operators", ok)

    # three qubits, any one decodable
    s321 = CodingScheme(3, 2, 1)
    add("three-qubit k=1 operator M_0,0,0",
        _op_matches(encoding_operator(s321, "000"), ["000", "001", "010", "100"], 0.5, 3, 2),
        "coefficient 1/2")
    locs = [haar_random_local(2, rng) for _ in range(3)]
    psi3 = StateVector(SystemLayout.qudits(3, 2), _kron_all(locs))
    rec3 = encode(psi3, s321, outcome="000")
    full = psi3.amplitudes.copy()
    keep = _diag_of(["000", "001", "010", "100"], 3, 2)
    exp = full * keep / np.linalg.norm(full * keep)
    add("three-qubit k=1 post-measurement state", np.allclose(rec3.post_state.amplitudes, exp, atol=1e-12))
    P_S, P_F = decode_projectors(s321, "000", (1,))
    add("three-qubit k=1 decode projectors",
        _op_matches(P_S, ["000", "100"], 1.0, 3, 2) and _op_matches(P_F, ["010", "001"], 1.0, 3, 2))

    # three qubits, any two decodable
    s322 = CodingScheme(3, 2, 2)
    seven = ["000", "001", "010", "100", "011", "101", "110"]
    add("three-qubit k=2 operator M_0,0,0",
        _op_matches(encoding_operator(s322, "000"), seven, 1 / np.sqrt(7), 3, 2),
        "coefficient 1/sqrt(7)")
    rec32 = encode(psi3, s322, outcome="000")
    support = {outcome_str(x) for x, a in zip(all_outcomes(s322), rec32.post_state.amplitudes) if abs(a) > 1e-12}
    keep = _diag_of(seven, 3, 2)
    exp = full * keep / np.linalg.norm(full * keep)
    add("three-qubit k=2 post-measurement state",
        np.allclose(rec32.post_state.amplitudes, exp, atol=1e-12) and support == set(seven),
        f"support size {len(support)}")
    P_S, P_F = decode_projectors(s322, "000", (1, 2))
    add("three-qubit k=2 decode projectors",
        _op_matches(P_S, ["000", "100", "010", "110"], 1.0, 3, 2)
        and _op_matches(P_F, ["001", "011", "101"], 1.0, 3, 2))

    # success probabilities
    for sch, subset, value, label in [
        (s221, (1,), 2 / 3, "2/3"),
        (s321, (3,), 1 / 2, "1/2"),
        (s322, (1, 2), 4 / 7, "4/7"),
    ]:
        st, _ = haar_product_state(sch.n, sch.d, rng)
        p = exact_success_probability(st, sch, subset)
        add(f"success probability {label} for {sch}", abs(p - value) <= 1e-12, f"p={p!r}")
    return checks


# ---------------------------------------------------------------------------
# entanglement, mixed-state and correlation experiments
# ---------------------------------------------------------------------------


def _success_branches(state, scheme, subset, rng):
    """Encode/decode records for every success branch, or one sampled run."""
    if rng is not None:
        rec = encode(state, scheme, rng)
        res = decode(rec, subset, rng)
        return [(rec, res)] if res.success else []
    table = joint_table(state, scheme, subset)
    out = []
    for m, p, j in zip(all_outcomes(scheme), table.outcome_probabilities, table.success_joint):
        if p < PROB_CUTOFF or j < PROB_CUTOFF:
            continue
        rec = encode(state, scheme, outcome=m)
        out.append((rec, decode(rec, subset, force=True)))
    return out


@dataclass
class EntanglementReport:
    rows: list[dict] = field(default_factory=list)

    @property
    def max_entropy_change(self) -> float:
        return max((abs(r["entropy_after"] - r["entropy_before"]) for r in self.rows), default=0.0)

    @property
    def min_fidelity(self) -> float:
        return min((r["fidelity"] for r in self.rows), default=float("nan"))


def entanglement_experiment(
    scheme: CodingScheme, subset, coeff_sets: Iterable[Sequence], rng: np.random.Generator | None = None
) -> EntanglementReport:
    """Compare qudit-environment entanglement before encoding and after decoding.

    Every success branch is enumerated unless ``rng`` is given, in which case
    one sampled run per input is used.
    """
    subset = normalize_subset(subset, scheme)
    report = EntanglementReport()
    for i, coeffs in enumerate(coeff_sets):
        state = environment_entangled_state(coeffs)
        lay = state.layout
        before = {t: entanglement_entropy(state, [lay.env_position(t)]) for t in subset}
        target = _kron_all(np.asarray(coeffs[t - 1]).T.reshape(-1) for t in subset)
        for rec, res in _success_branches(state, scheme, subset, rng):
            out = res.recovered
            fid = fidelity_pure(out.amplitudes, target)
            for j, t in enumerate(subset, start=1):
                after = entanglement_entropy(out, [out.layout.env_position(j)])
                report.rows.append({
                    "input": i, "outcome": outcome_str(rec.outcome), "qudit": t,
                    "entropy_before": before[t], "entropy_after": after, "fidelity": fid,
                })
    return report


@dataclass
class MixedStateReport:
    rows: list[dict] = field(default_factory=list)

    @property
    def max_trace_distance(self) -> float:
        return max((r["trace_distance"] for r in self.rows), default=0.0)


def mixed_state_experiment(
    scheme: CodingScheme, subset, density_inputs: Iterable[Sequence], rng: np.random.Generator | None = None
) -> MixedStateReport:
    """Purify each qudit's density matrix, run the protocol, compare reduced states."""
    subset = normalize_subset(subset, scheme)
    report = MixedStateReport()
    for i, rhos in enumerate(density_inputs):
        rhos = [np.asarray(r, dtype=np.complex128) for r in rhos]
        state = purified_product_state(rhos)
        target = rhos[subset[0] - 1]
        for t in subset[1:]:
            target = np.kron(target, rhos[t - 1])
        for rec, res in _success_branches(state, scheme, subset, rng):
            out = res.recovered
            data_pos = [p for p, s in enumerate(out.layout.subsystems) if s.role == DATA]
            reduced = partial_trace(out.density().entries, out.layout, data_pos)
            report.rows.append({
                "input": i, "outcome": outcome_str(rec.outcome),
                "trace_distance": trace_distance(reduced, target),
            })
    return report


@dataclass(frozen=True)
class CorrelationReport:
    success_probability: float
    fidelities: list[float]

    @property
    def min_fidelity(self) -> float:
        return min(self.fidelities)


def correlation_control(scheme: CodingScheme, subset, state: StateVector) -> CorrelationReport:
    """Fidelity of every success branch against the subset's original reduced state.

    Meant for inputs whose subset qudits are correlated with qudits outside
    the subset, where exact recovery is not expected.
    """
    subset = normalize_subset(subset, scheme)
    lay = state.layout
    keep = []
    for t in subset:
        env = lay.env_position(t)
        keep += ([env] if env is not None else []) + [lay.data_position(t)]
    rho = reduced_density(state.amplitudes, lay, sorted(keep))
    fids = [
        fidelity_state_density(res.recovered.amplitudes, rho)
        for _, res in _success_branches(state, scheme, subset, None)
    ]
    return CorrelationReport(exact_success_probability(state, scheme, subset), fids)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    n: int
    d: int
    k: int
    subset: tuple[int, ...]
    D_k: int
    p_theory: float
    p_exact: float
    p_mc: float
    stderr: float
    trials: int
    seed: int

    def as_row(self) -> list:
        return [
            self.n, self.d, self.k, ",".join(map(str, self.subset)), self.D_k,
            repr(self.p_theory), repr(self.p_exact), repr(self.p_mc), repr(self.stderr),
            self.trials, self.seed,
        ]


def default_grid(n_values=range(1, 5), d_values=(2, 3)):
    """Cells ``(scheme, subset)`` in grid order: n, then d, then k, then subset."""
    cells = []
    for n in n_values:
        for d in d_values:
            for k in range(1, n + 1):
                sch = CodingScheme(n, d, k)
                cells.extend((sch, s) for s in subsets_of_size(n, k))
    return cells


def sweep(cells, trials: int, seed: int, cap: int | None = DEFAULT_CAP) -> list[SweepRow]:
    """Exact and sampled success rates for each cell; over-cap cells are skipped."""
    rows = []
    skipped = set()
    for sch, subset in cells:
        try:
            sch.check_cap(cap)
        except ValueError as exc:
            if sch not in skipped:
                log.warning("skipping %s: %s", sch, exc)
                skipped.add(sch)
            continue
        state, _ = haar_product_state(sch.n, sch.d, np.random.default_rng([seed, sch.n, sch.d, sch.k]))
        p_exact = exact_success_probability(state, sch, subset, cap)
        if trials > 0:
            est = monte_carlo(sch, subset, trials, seed, cap=cap)
            p_mc, se = est.p_hat, est.stderr
        else:
            p_mc, se = float("nan"), float("nan")
        rows.append(SweepRow(sch.n, sch.d, sch.k, tuple(subset), sch.dimension,
                             sch.p_theory, p_exact, p_mc, se, trials, seed))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.as_row())
    return buf.getvalue()


def sweep_to_json(rows: Sequence[SweepRow]) -> str:
    payload = []
    for row in rows:
        item = asdict(row)
        item["subset"] = list(row.subset)
        payload.append(item)
    return json.dumps({"columns": CSV_COLUMNS, "rows": payload}, indent=2)
