"""Encoding measurement: Hamming balls and the scaled-projector POVM.

For a scheme ``(n, d, k)`` the measurement operator for outcome string ``m``
is ``D_k**-0.5`` times the projector onto every basis string within Hamming
distance ``k`` of ``m``. Each basis string lies in exactly ``D_k`` balls,
which is why the operators sum (as ``M^dagger M``) to the identity.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from . import _kernels
from .state import StateVector

__all__ = [
    "DEFAULT_CAP",
    "PROB_CUTOFF",
    "CapExceededError",
    "CodingScheme",
    "Outcome",
    "as_outcome",
    "outcome_index",
    "outcome_str",
    "all_outcomes",
    "subspace_dimension",
    "hamming_ball",
    "ball_mask",
    "encoding_diagonal",
    "encoding_operator",
    "CompletenessReport",
    "verify_completeness",
    "outcome_probabilities",
    "outcome_distribution",
    "sample_outcome",
    "sample_outcome_index",
    "subsets_of_size",
]

DEFAULT_CAP = 4096
PROB_CUTOFF = 1e-14

Outcome = tuple[int, ...]


class CapExceededError(ValueError):
    """Raised when a computation would enumerate more strings than allowed."""


@dataclass(frozen=True)
class CodingScheme:
    """Encode ``n`` qudits of dimension ``d`` so any ``k`` can be decoded."""

    n: int
    d: int
    k: int

    def __post_init__(self):
        for name in ("n", "d", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise TypeError(f"{name} must be an integer")
            object.__setattr__(self, name, int(value))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")

    @property
    def dimension(self) -> int:
        return subspace_dimension(self)

    @property
    def n_strings(self) -> int:
        return self.d**self.n

    @property
    def p_theory(self) -> float:
        return self.d**self.k / self.dimension

    def check_cap(self, cap: int | None = DEFAULT_CAP) -> None:
        if cap is not None and self.n_strings > cap:
            raise CapExceededError(
                f"d^n = {self.n_strings} exceeds enumeration cap {cap} for {self}"
            )

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "k": self.k}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> CodingScheme:
        data = json.loads(text)
        return cls(data["n"], data["d"], data["k"])

    def __str__(self):
        return f"(n={self.n}, d={self.d}, k={self.k})"


def as_outcome(m, scheme: CodingScheme) -> Outcome:
    """Validate a digit string against ``scheme``."""
    if isinstance(m, str):
        m = [int(c) for c in m.replace(",", "")]
    digits = tuple(int(x) for x in m)
    if len(digits) != scheme.n:
        raise ValueError(f"outcome {digits} has length {len(digits)}, expected {scheme.n}")
    if any(not 0 <= x < scheme.d for x in digits):
        raise ValueError(f"outcome digits must lie in [0, {scheme.d}), got {digits}")
    return digits


def outcome_index(m: Sequence[int], d: int) -> int:
    idx = 0
    for x in m:
        idx = idx * d + int(x)
    return idx


def outcome_str(m: Sequence[int]) -> str:
    """Most-significant-first rendering, e.g. ``(1, 0, 1) -> '101'``."""
    sep = "" if all(x < 10 for x in m) else ","
    return sep.join(str(x) for x in m)


@lru_cache(maxsize=64)
def _strings(n: int, d: int) -> np.ndarray:
    table = _kernels.digit_table(n, d)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=32)
def _incidence(n: int, d: int, radius: int) -> np.ndarray:
    inc = _kernels.ball_incidence(_strings(n, d), radius)
    inc.setflags(write=False)
    return inc


def all_outcomes(scheme: CodingScheme) -> list[Outcome]:
    return [tuple(int(x) for x in row) for row in _strings(scheme.n, scheme.d)]


def subspace_dimension(scheme: CodingScheme) -> int:
    """Size of a Hamming ball of radius ``k`` in ``[d]^n``."""
    n, d, k = scheme.n, scheme.d, scheme.k
    return sum(comb(n, i) * (d - 1) ** i for i in range(k + 1))


def ball_mask(scheme: CodingScheme, center, radius: int | None = None) -> np.ndarray:
    """Boolean membership of every basis string in the ball around ``center``."""
    center = np.asarray(as_outcome(center, scheme))
    radius = scheme.k if radius is None else radius
    strings = _strings(scheme.n, scheme.d)
    return (strings != center[None, :]).sum(axis=1) <= radius


def hamming_ball(scheme: CodingScheme, center, radius: int | None = None) -> list[Outcome]:
    """Strings within distance ``radius`` (default ``k``) of ``center``, lexicographic."""
    mask = ball_mask(scheme, center, radius)
    return [tuple(int(x) for x in row) for row in _strings(scheme.n, scheme.d)[mask]]


def encoding_diagonal(scheme: CodingScheme, m) -> np.ndarray:
    """Diagonal of the encoding operator for outcome ``m``."""
    return ball_mask(scheme, m) / np.sqrt(scheme.dimension)


def encoding_operator(scheme: CodingScheme, m) -> np.ndarray:
    """Dense ``d^n x d^n`` encoding operator for outcome ``m``."""
    return np.diag(encoding_diagonal(scheme, m).astype(np.complex128))


@dataclass(frozen=True)
class CompletenessReport:
    scheme: CodingScheme
    ok: bool
    max_deviation: float
    coverage_min: int
    coverage_max: int

    def __bool__(self):
        return self.ok


def verify_completeness(
    scheme: CodingScheme, cap: int | None = DEFAULT_CAP, tol: float = 1e-10, dense: bool = False
) -> CompletenessReport:
    """Check that ``sum_m M_m^dagger M_m`` is the identity.

    With ``dense=True`` the full matrices are accumulated. Otherwise the
    diagonals are, which is exact here since every operator is diagonal.
    Coverage is the number of balls containing each string.
    """
    scheme.check_cap(cap)
    N = scheme.n_strings
    inc = _incidence(scheme.n, scheme.d, scheme.k)
    scale = 1.0 / np.sqrt(scheme.dimension)
    if dense:
        total = np.zeros((N, N), dtype=np.complex128)
        for m in range(N):
            op = np.diag(inc[m] * scale).astype(np.complex128)
            total += op.conj().T @ op
        deviation = float(np.max(np.abs(total - np.eye(N))))
    else:
        total = np.zeros(N)
        for m in range(N):
            diag = inc[m] * scale
            total += diag * diag
        deviation = float(np.max(np.abs(total - 1.0)))
    coverage = inc.sum(axis=0)
    return CompletenessReport(
        scheme, deviation <= tol, deviation, int(coverage.min()), int(coverage.max())
    )


def _data_weights(state: StateVector, scheme: CodingScheme) -> np.ndarray:
    if not isinstance(state, StateVector):
        raise TypeError("state must be a StateVector")
    lay = state.layout
    if lay.n_data != scheme.n or any(dd != scheme.d for dd in lay.data_dims):
        raise ValueError(
            f"layout {lay} does not carry {scheme.n} data qudits of dimension {scheme.d}"
        )
    return state.data_weights()


def outcome_probabilities(state: StateVector, scheme: CodingScheme, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """Born probabilities of every outcome, lexicographic order."""
    scheme.check_cap(cap)
    w = _data_weights(state, scheme)
    sums = _kernels.ball_sums(_strings(scheme.n, scheme.d), w, scheme.k)
    return sums / scheme.dimension


def outcome_distribution(
    state: StateVector, scheme: CodingScheme, cap: int | None = DEFAULT_CAP
) -> dict[Outcome, float]:
    probs = outcome_probabilities(state, scheme, cap)
    return {m: float(p) for m, p in zip(all_outcomes(scheme), probs)}


def sample_outcome_index(probs: np.ndarray, u: float) -> int:
    """Inverse CDF over lexicographic order; outcomes below the cutoff are skipped."""
    probs = np.where(np.asarray(probs) < PROB_CUTOFF, 0.0, probs)
    cdf = np.cumsum(probs)
    return int(np.searchsorted(cdf, u * cdf[-1], side="right"))


def sample_outcome(distribution, rng: np.random.Generator) -> Outcome:
    """Draw one outcome from a mapping ``outcome -> probability``."""
    items = sorted(distribution.items())
    probs = np.array([p for _, p in items])
    if abs(probs.sum() - 1.0) > 1e-10:
        raise ValueError(f"distribution sums to {probs.sum()!r}")
    return items[sample_outcome_index(probs, rng.random())][0]


def subsets_of_size(n: int, k: int) -> list[tuple[int, ...]]:
    """All ``k``-subsets of qudit labels ``1..n``, lexicographic."""
    return list(combinations(range(1, n + 1), k))
