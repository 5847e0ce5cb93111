"""Alice encodes, Bob decodes a chosen subset of qudits.

Encoding never fails: every outcome of the ball measurement leaves a usable
state. Bob fixes his subset when the :class:`Decoder` is built, receives
Alice's outcome as a :class:`ClassicalMessage`, and then runs a two-outcome
projective measurement. On success the subset qudits (with any environments
attached to them) are recovered exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .coding import (
    DEFAULT_CAP,
    CodingScheme,
    Outcome,
    _strings,
    as_outcome,
    ball_mask,
    encoding_diagonal,
    outcome_index,
    outcome_probabilities,
    outcome_str,
    sample_outcome_index,
)
from .linalg import embed_diagonal
from .state import StateVector, Subsystem, SystemLayout

__all__ = [
    "NotSeparableError",
    "EncodeRecord",
    "ClassicalMessage",
    "DecodeResult",
    "Decoder",
    "JointTable",
    "normalize_subset",
    "encode",
    "classical_message",
    "decode_projector_diagonals",
    "decode_projectors",
    "decode",
    "recover_subset",
    "joint_table",
    "exact_success_probability",
    "transcript",
]

SEPARABILITY_TOL = 1e-10


class NotSeparableError(ValueError):
    """The decoded qudits are still correlated with discarded subsystems."""


def normalize_subset(subset, scheme: CodingScheme) -> tuple[int, ...]:
    """Validate a 1-based subset of size ``k``; accepts ``"1,2"`` too."""
    if isinstance(subset, str):
        subset = [int(s) for s in subset.split(",") if s.strip()]
    elif isinstance(subset, int):
        subset = [subset]
    labels = tuple(sorted(int(t) for t in subset))
    if len(set(labels)) != len(labels):
        raise ValueError(f"subset has repeated qudits: {labels}")
    if any(not 1 <= t <= scheme.n for t in labels):
        raise ValueError(f"subset labels must lie in 1..{scheme.n}, got {labels}")
    if len(labels) != scheme.k:
        raise ValueError(f"subset size {len(labels)} differs from k={scheme.k}")
    return labels


def _check_state(state: StateVector, scheme: CodingScheme):
    lay = state.layout
    if lay.n_data != scheme.n or any(dd != scheme.d for dd in lay.data_dims):
        raise ValueError(f"layout {lay} does not match scheme {scheme}")
    if not state.is_normalized():
        raise ValueError(f"state is not normalized (norm={state.norm!r})")


@dataclass(frozen=True)
class EncodeRecord:
    scheme: CodingScheme
    outcome: Outcome
    post_state: StateVector
    outcome_probability: float


@dataclass(frozen=True)
class ClassicalMessage:
    """Alice's full outcome string; Bob reads only what he needs."""

    outcome: Outcome

    def to_json(self) -> str:
        return json.dumps({"outcome": list(self.outcome)})

    @classmethod
    def from_json(cls, text: str) -> ClassicalMessage:
        return cls(tuple(int(x) for x in json.loads(text)["outcome"]))


@dataclass(frozen=True)
class DecodeResult:
    scheme: CodingScheme
    subset: tuple[int, ...]
    outcome: Outcome
    success: bool
    post_state: StateVector
    conditional_success_probability: float
    recovered: StateVector | None = None


def encode(
    state: StateVector,
    scheme: CodingScheme,
    rng: np.random.Generator | None = None,
    outcome=None,
    cap: int | None = DEFAULT_CAP,
) -> EncodeRecord:
    """Apply the ball measurement to the data qudits of ``state``.

    The outcome is sampled from its Born distribution with ``rng`` unless
    ``outcome`` forces it; a forced outcome still records its true
    probability and must not be impossible.
    """
    _check_state(state, scheme)
    probs = outcome_probabilities(state, scheme, cap)
    if outcome is None:
        if rng is None:
            raise ValueError("need an rng to sample the outcome")
        idx = sample_outcome_index(probs, rng.random())
        m = tuple(int(x) for x in _strings(scheme.n, scheme.d)[idx])
    else:
        m = as_outcome(outcome, scheme)
        idx = outcome_index(m, scheme.d)
    p = float(probs[idx])
    if p <= 0.0:
        raise ValueError(f"outcome {outcome_str(m)} has zero probability")
    lay = state.layout
    diag = embed_diagonal(encoding_diagonal(scheme, m), lay, lay.data_positions)
    post = StateVector(lay, diag * state.amplitudes / np.sqrt(p))
    return EncodeRecord(scheme, m, post, p)


def classical_message(record: EncodeRecord) -> ClassicalMessage:
    return ClassicalMessage(record.outcome)


def decode_projector_diagonals(scheme: CodingScheme, m, subset) -> tuple[np.ndarray, np.ndarray]:
    """Boolean diagonals of ``(P_S, P_F)`` on the data space.

    ``P_S`` keeps strings agreeing with ``m`` off the subset; ``P_F`` is the
    rest of the ball around ``m``.
    """
    m = np.asarray(as_outcome(m, scheme))
    subset = normalize_subset(subset, scheme)
    fixed = [t - 1 for t in range(1, scheme.n + 1) if t not in subset]
    strings = _strings(scheme.n, scheme.d)
    success = np.all(strings[:, fixed] == m[fixed][None, :], axis=1)
    failure = ball_mask(scheme, m) & ~success
    return success, failure


def decode_projectors(scheme: CodingScheme, m, subset) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(P_S, P_F)`` on the ``d^n`` data space."""
    s, f = decode_projector_diagonals(scheme, m, subset)
    return np.diag(s.astype(np.complex128)), np.diag(f.astype(np.complex128))


@dataclass(frozen=True)
class Decoder:
    """Bob, committed to ``subset`` before he learns Alice's outcome."""

    scheme: CodingScheme
    subset: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "subset", normalize_subset(self.subset, self.scheme))

    def projector_diagonals(self, message: ClassicalMessage):
        return decode_projector_diagonals(self.scheme, message.outcome, self.subset)

    def decode(
        self,
        message: ClassicalMessage,
        state: StateVector,
        rng: np.random.Generator | None = None,
        force: bool | None = None,
    ) -> DecodeResult:
        s_diag, f_diag = self.projector_diagonals(message)
        lay = state.layout
        keep = embed_diagonal(s_diag, lay, lay.data_positions)
        lose = embed_diagonal(f_diag, lay, lay.data_positions)
        kept = np.where(keep, state.amplitudes, 0.0)
        p = float(min(1.0, np.vdot(kept, kept).real))
        if force is None:
            if rng is None:
                raise ValueError("need an rng to sample the decode branch")
            success = bool(rng.random() < p)
        else:
            success = bool(force)
        branch = kept if success else np.where(lose, state.amplitudes, 0.0)
        nrm = np.linalg.norm(branch)
        if nrm == 0.0:
            raise ValueError(f"{'success' if success else 'failure'} branch has zero probability")
        post = StateVector(lay, branch / nrm)
        result = DecodeResult(self.scheme, self.subset, message.outcome, success, post, p)
        if success:
            try:
                rec = recover_subset(result)
            except NotSeparableError:
                rec = None
            result = DecodeResult(self.scheme, self.subset, message.outcome, success, post, p, rec)
        return result


def decode(
    record: EncodeRecord,
    subset,
    rng: np.random.Generator | None = None,
    force: bool | None = None,
) -> DecodeResult:
    """Run Bob's measurement on an encoded state.

    ``force`` selects the success (True) or failure (False) branch instead
    of sampling; the conditional success probability is reported either way.
    """
    bob = Decoder(record.scheme, subset)
    return bob.decode(classical_message(record), record.post_state, rng, force)


def recover_subset(result: DecodeResult) -> StateVector:
    """Extract the decoded qudits, with their environments, as a pure state.

    Non-subset data qudits are frozen at Alice's digits and dropped; the
    environments of non-subset qudits are traced away after checking they
    factor out. Kept subsystems keep their layout order and are relabelled
    ``1..k`` in subset order.
    """
    if not result.success:
        raise ValueError("cannot recover qudits from a failed decode")
    state = result.post_state
    lay = state.layout
    subset = result.subset
    tensor = state.tensor()
    index = [slice(None)] * len(lay.dims)
    for t in range(1, result.scheme.n + 1):
        if t not in subset:
            index[lay.data_position(t)] = result.outcome[t - 1]
    tensor = tensor[tuple(index)]
    remaining = [p for p in range(len(lay.dims)) if isinstance(index[p], slice)]
    kept_pos = [p for p in remaining if lay.subsystems[p].qudit in subset]
    dropped_pos = [p for p in remaining if p not in kept_pos]
    axes = [remaining.index(p) for p in kept_pos + dropped_pos]
    kd = int(np.prod([lay.dims[p] for p in kept_pos], dtype=np.int64))
    mat = tensor.transpose(axes).reshape(kd, -1)
    if mat.shape[1] == 1:
        vec = mat[:, 0]
    else:
        u, s, _ = np.linalg.svd(mat, full_matrices=False)
        weight = float((s**2).sum())
        if float((s[1:] ** 2).sum()) > SEPARABILITY_TOL * weight:
            raise NotSeparableError(
                "decoded qudits remain entangled with discarded environments"
            )
        vec = u[:, 0]
    vec = vec / np.linalg.norm(vec)
    relabel = {t: i for i, t in enumerate(subset, start=1)}
    subs = tuple(
        Subsystem(lay.subsystems[p].role, relabel[lay.subsystems[p].qudit], lay.dims[p])
        for p in kept_pos
    )
    return StateVector(SystemLayout(subs), vec)


@dataclass(frozen=True)
class JointTable:
    """Exact joint law of (Alice's outcome, Bob's success), lexicographic in ``m``."""

    scheme: CodingScheme
    subset: tuple[int, ...]
    outcome_probabilities: np.ndarray
    success_joint: np.ndarray

    @property
    def success_probability(self) -> float:
        return float(self.success_joint.sum())

    def conditional(self) -> list[float | None]:
        """``p(success | m)``; None where ``P(m) = 0``."""
        out = []
        for p, j in zip(self.outcome_probabilities, self.success_joint):
            out.append(None if p <= 0.0 else float(min(1.0, j / p)))
        return out


def joint_table(
    state: StateVector, scheme: CodingScheme, subset, cap: int | None = DEFAULT_CAP
) -> JointTable:
    """Enumerate every outcome and its success weight ``||P_S M_m psi||^2``."""
    _check_state(state, scheme)
    subset = normalize_subset(subset, scheme)
    probs = outcome_probabilities(state, scheme, cap)
    n, d = scheme.n, scheme.d
    w = state.data_weights().reshape((d,) * n)
    free_axes = tuple(t - 1 for t in subset)
    # weight of each agree-set depends only on the digits outside the subset
    marg = w.sum(axis=free_axes, keepdims=True)
    joint = np.broadcast_to(marg, (d,) * n).reshape(-1) / scheme.dimension
    return JointTable(scheme, subset, probs, joint.copy())


def exact_success_probability(
    state: StateVector, scheme: CodingScheme, subset, cap: int | None = DEFAULT_CAP
) -> float:
    """Total probability that Bob decodes ``subset``, summed over all outcomes."""
    return joint_table(state, scheme, subset, cap).success_probability


def transcript(
    record: EncodeRecord, result: DecodeResult, fidelity: float | None = None
) -> dict:
    """JSON-ready summary of one protocol run."""
    return {
        "scheme": record.scheme.to_dict(),
        "subset": list(result.subset),
        "outcome": outcome_str(record.outcome),
        "outcome_probability": record.outcome_probability,
        "success": result.success,
        "conditional_success_probability": result.conditional_success_probability,
        "fidelity": fidelity,
    }
