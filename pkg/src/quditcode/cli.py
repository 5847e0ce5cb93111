"""Command line front end: ``quditcode {verify,demo,simulate,sweep}``.

Machine-readable output goes to stdout (or ``--output``), diagnostics to
stderr. Exit codes: 0 success, 1 a check failed, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys

import numpy as np

from .coding import (
    DEFAULT_CAP,
    CodingScheme,
    all_outcomes,
    ball_mask,
    outcome_str,
    subsets_of_size,
    verify_completeness,
)
from .harness import (
    correlation_control,
    default_grid,
    mixed_state_experiment,
    sweep,
    sweep_to_csv,
    sweep_to_json,
)
from .linalg import fidelity_pure
from .protocol import decode, decode_projector_diagonals, encode, exact_success_probability, normalize_subset
from .state import (
    StateVector,
    SystemLayout,
    entanglement_entropy,
    environment_entangled_state,
    haar_random_local,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("quditcode")


class UsageError(Exception):
    pass


def _scheme(args) -> CodingScheme:
    try:
        return CodingScheme(args.n, args.d, args.k)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        print(f"seed={args.seed}", file=sys.stderr)
    if args.seed < 0:
        raise UsageError("seed must be non-negative")
    return args.seed


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    scheme = _scheme(args)
    if scheme.n_strings > args.cap:
        raise UsageError(f"d^n = {scheme.n_strings} exceeds cap {args.cap}")
    rep = verify_completeness(scheme, cap=args.cap)
    sizes = {int(ball_mask(scheme, m).sum()) for m in all_outcomes(scheme)}
    balls_ok = sizes == {scheme.dimension}
    proj_ok = True
    for subset in subsets_of_size(scheme.n, scheme.k):
        for m in all_outcomes(scheme):
            s, f = decode_projector_diagonals(scheme, m, subset)
            ball = ball_mask(scheme, m)
            proj_ok &= not np.any(s & f) and np.array_equal(s | f, ball)
    result = {
        "scheme": scheme.to_dict(),
        "D_k": scheme.dimension,
        "completeness_max_deviation": rep.max_deviation,
        "completeness_ok": rep.ok,
        "ball_sizes_ok": balls_ok,
        "projectors_ok": bool(proj_ok),
    }
    passed = rep.ok and balls_ok and proj_ok
    result["passed"] = bool(passed)
    _emit(json.dumps(result, indent=2), args.output)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# demo
# ---------------------------------------------------------------------------


def _fmt_state(amps, n_digits, d, labels=None) -> str:
    parts = []
    for i, a in enumerate(amps):
        if abs(a) <= 1e-12:
            continue
        digits = np.base_repr(i, d).rjust(n_digits, "0") if labels is None else labels[i]
        parts.append(f"({a.real:+.4f}{a.imag:+.4f}j)|{digits}>")
    return " ".join(parts)


def _demo_coding(scheme, subset, seed, lines):
    rng = np.random.default_rng(seed)
    locs = [haar_random_local(scheme.d, rng) for _ in range(scheme.n)]
    amps = np.ones(1, dtype=np.complex128)
    for v in locs:
        amps = np.kron(amps, v)
    psi = StateVector(SystemLayout.qudits(scheme.n, scheme.d), amps)
    lines.append(f"scheme {scheme}: D_k = {scheme.dimension} < d^n = {scheme.n_strings}"
                 if scheme.k < scheme.n else f"scheme {scheme}: D_k = {scheme.dimension}")
    lines.append("input  " + _fmt_state(psi.amplitudes, scheme.n, scheme.d))
    m = (0,) * scheme.n
    rec = encode(psi, scheme, outcome=m)
    support = int((np.abs(rec.post_state.amplitudes) > 1e-12).sum())
    lines.append(f"Alice's outcome {outcome_str(m)} (P = {rec.outcome_probability:.6f}), "
                 f"post state spans {support} strings:")
    lines.append("       " + _fmt_state(rec.post_state.amplitudes, scheme.n, scheme.d))
    res = decode(rec, subset, force=True)
    lines.append(f"Bob decodes qudits {','.join(map(str, subset))}: "
                 f"p(success | {outcome_str(m)}) = {res.conditional_success_probability:.6f}")
    target = np.ones(1, dtype=np.complex128)
    for t in subset:
        target = np.kron(target, locs[t - 1])
    fid = fidelity_pure(res.recovered.amplitudes, target)
    lines.append(f"recovered fidelity on success = {fid:.12f}")
    p = exact_success_probability(psi, scheme, subset)
    lines.append(f"overall success probability = {p:.12f} (d^k/D_k = {scheme.p_theory:.12f})")
    return True


def _demo_entangled(seed, lines):
    scheme = CodingScheme(2, 2, 1)
    rng = np.random.default_rng(seed)
    bell = np.array([[1, 0], [0, 1]]) / np.sqrt(2)
    g = rng.standard_normal((2, 2, 2))
    other = g[..., 0] + 1j * g[..., 1]
    other /= np.linalg.norm(other)
    state = environment_entangled_state([bell, other])
    lay = state.layout
    lines.append(f"register {lay}: qubit 1 maximally entangled with E1")
    s_before = entanglement_entropy(state, [lay.env_position(1)])
    lines.append(f"entropy(E1) before = {s_before:.12f}")
    rec = encode(state, scheme, outcome=(0, 0))
    lines.append(f"Alice's outcome 00 (P = {rec.outcome_probability:.6f})")
    res = decode(rec, (1,), force=True)
    out = res.recovered
    s_after = entanglement_entropy(out, [out.layout.env_position(1)])
    fid = fidelity_pure(out.amplitudes, bell.T.reshape(-1))
    lines.append(f"decoded (E1,q1): entropy after = {s_after:.12f}, fidelity = {fid:.12f}")
    p = exact_success_probability(state, scheme, (1,))
    lines.append(f"overall success probability = {p:.12f}")
    ok_corr = correlation_control(
        scheme, (1,), StateVector(SystemLayout.qudits(2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
    )
    lines.append(f"control, qubit 1 entangled with qubit 2: min success-branch fidelity = "
                 f"{ok_corr.min_fidelity:.6f}, success probability = {ok_corr.success_probability:.6f}")
    return abs(s_before - s_after) <= 1e-9 and abs(fid - 1) <= 1e-10


def _demo_mixed(seed, lines):
    scheme = CodingScheme(2, 2, 1)
    rho1 = np.diag([0.9, 0.1]).astype(complex)
    rho2 = np.eye(2, dtype=complex) / 2
    lines.append("rho_1 = diag(0.9, 0.1), rho_2 = I/2, decoding qubit 1")
    rep = mixed_state_experiment(scheme, (1,), [[rho1, rho2]])
    for row in rep.rows:
        lines.append(f"outcome {row['outcome']}: trace distance = {row['trace_distance']:.3e}")
    lines.append(f"max trace distance = {rep.max_trace_distance:.3e} (<= 1e-9)")
    return rep.max_trace_distance <= 1e-9


DEMOS = ("qutrit", "n3k1", "n3k2", "entangled", "mixed")


def cmd_demo(args) -> int:
    if args.example not in DEMOS:
        raise UsageError(f"unknown example {args.example!r}; choose from {', '.join(DEMOS)}")
    seed = 0 if args.seed is None else args.seed
    lines: list[str] = []
    if args.example == "qutrit":
        ok = _demo_coding(CodingScheme(2, 2, 1), (1,), seed, lines)
    elif args.example == "n3k1":
        ok = _demo_coding(CodingScheme(3, 2, 1), (1,), seed, lines)
    elif args.example == "n3k2":
        ok = _demo_coding(CodingScheme(3, 2, 2), (1, 2), seed, lines)
    elif args.example == "entangled":
        ok = _demo_entangled(seed, lines)
    else:
        ok = _demo_mixed(seed, lines)
    _emit("\n".join(lines), args.output)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# simulate / sweep
# ---------------------------------------------------------------------------


def _render(rows, fmt):
    return sweep_to_csv(rows) if fmt == "csv" else sweep_to_json(rows)


def cmd_simulate(args) -> int:
    scheme = _scheme(args)
    try:
        subset = normalize_subset(args.subset, scheme)
    except ValueError as exc:
        raise UsageError(f"invalid subset: {exc}") from exc
    if args.trials < 1:
        raise UsageError("trials must be >= 1")
    if scheme.n_strings > args.cap:
        raise UsageError(f"d^n = {scheme.n_strings} exceeds cap {args.cap}")
    seed = _seed(args)
    rows = sweep([(scheme, subset)], args.trials, seed, cap=args.cap)
    _emit(_render(rows, args.format), args.output)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from exc


def cmd_sweep(args) -> int:
    seed = _seed(args)
    if any(n < 1 for n in args.n_values) or any(d < 2 for d in args.d_values):
        raise UsageError("grid needs n >= 1 and d >= 2")
    if args.trials < 0:
        raise UsageError("trials must be >= 0")
    cells = default_grid(args.n_values, args.d_values)
    if args.k_equals_n:
        cells = [(s, sub) for s, sub in cells if s.k == s.n]
    rows = sweep(cells, args.trials, seed, cap=args.cap)
    if not rows:
        print("no grid cell within the cap", file=sys.stderr)
        return EXIT_USAGE
    _emit(_render(rows, args.format), args.output)
    bad = [r for r in rows if abs(r.p_exact - r.p_theory) > 1e-10]
    return EXIT_FAIL if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quditcode", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def scheme_args(p):
        p.add_argument("--n", type=int, required=True, help="number of encoded qudits")
        p.add_argument("--d", type=int, required=True, help="local dimension")
        p.add_argument("--k", type=int, required=True, help="size of the decodable subset")

    def output_args(p, formats=True):
        if formats:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", default=None, help="file path (default stdout)")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest d^n to enumerate")

    p = sub.add_parser("verify", help="check POVM completeness, ball sizes and projectors")
    scheme_args(p)
    output_args(p, formats=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="walk through a worked example")
    p.add_argument("example", help=f"one of {', '.join(DEMOS)}")
    p.add_argument("--seed", type=int, default=None, help="seed for the random input (default 0)")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("simulate", help="Monte Carlo estimate for one scheme and subset")
    scheme_args(p)
    p.add_argument("--subset", required=True, help="1-based comma list, e.g. 1,2")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    output_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="exact and sampled success rates over a grid")
    p.add_argument("--n-values", type=_int_list, default=[1, 2, 3, 4])
    p.add_argument("--d-values", type=_int_list, default=[2, 3])
    p.add_argument("--k-equals-n", action="store_true", help="only cells with k = n")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    output_args(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
