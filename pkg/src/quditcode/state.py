"""Multi-qudit registers: layouts, pure and mixed states, random sampling.

A register is an ordered list of subsystems. Data qudits are labelled
1..n (matching ket notation ``|ijk...>``, qudit 1 leftmost); an optional
environment subsystem may be attached to each data qudit. Positions inside a
layout are 0-based, data-qudit labels are 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linalg import NORM_TOL, reduced_density, von_neumann_entropy

__all__ = [
    "DATA",
    "ENV",
    "Subsystem",
    "SystemLayout",
    "StateVector",
    "DensityMatrix",
    "product_state",
    "haar_random_local",
    "haar_product_state",
    "random_environment_coeffs",
    "environment_entangled_state",
    "random_density_matrix",
    "purify",
    "purified_product_state",
    "entanglement_entropy",
]

DATA = "data"
ENV = "environment"


@dataclass(frozen=True)
class Subsystem:
    role: str
    qudit: int
    dim: int

    def __post_init__(self):
        if self.role not in (DATA, ENV):
            raise ValueError(f"unknown subsystem role {self.role!r}")
        if int(self.dim) < 2:
            raise ValueError(f"local dimension must be >= 2, got {self.dim}")
        if int(self.qudit) < 1:
            raise ValueError(f"qudit labels start at 1, got {self.qudit}")

    def label(self) -> str:
        return f"q{self.qudit}" if self.role == DATA else f"E{self.qudit}"


@dataclass(frozen=True)
class SystemLayout:
    subsystems: tuple[Subsystem, ...]

    def __post_init__(self):
        subs = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        data = [s.qudit for s in subs if s.role == DATA]
        if sorted(data) != list(range(1, len(data) + 1)):
            raise ValueError(f"data qudits must be labelled 1..n exactly once, got {data}")
        envs = [s.qudit for s in subs if s.role == ENV]
        if len(set(envs)) != len(envs):
            raise ValueError("at most one environment per data qudit")
        if any(t not in data for t in envs):
            raise ValueError("environment attached to a missing data qudit")

    @classmethod
    def qudits(cls, n: int, d: int) -> SystemLayout:
        """``n`` bare data qudits of dimension ``d``."""
        return cls(tuple(Subsystem(DATA, t, d) for t in range(1, n + 1)))

    @classmethod
    def with_environments(cls, n: int, d: int, env_dim: int | None = None) -> SystemLayout:
        """Layout ``(E1, q1, E2, q2, ...)``."""
        env_dim = d if env_dim is None else env_dim
        subs = []
        for t in range(1, n + 1):
            subs += [Subsystem(ENV, t, env_dim), Subsystem(DATA, t, d)]
        return cls(tuple(subs))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def n_data(self) -> int:
        return sum(1 for s in self.subsystems if s.role == DATA)

    def data_position(self, t: int) -> int:
        for pos, s in enumerate(self.subsystems):
            if s.role == DATA and s.qudit == t:
                return pos
        raise IndexError(f"no data qudit {t}")

    def env_position(self, t: int) -> int | None:
        for pos, s in enumerate(self.subsystems):
            if s.role == ENV and s.qudit == t:
                return pos
        return None

    @property
    def data_positions(self) -> list[int]:
        return [self.data_position(t) for t in range(1, self.n_data + 1)]

    @property
    def data_dims(self) -> tuple[int, ...]:
        return tuple(self.dims[p] for p in self.data_positions)

    def to_list(self) -> list[dict]:
        return [{"role": s.role, "qudit": s.qudit, "dim": s.dim} for s in self.subsystems]

    @classmethod
    def from_list(cls, items: Iterable[dict]) -> SystemLayout:
        return cls(tuple(Subsystem(it["role"], int(it["qudit"]), int(it["dim"])) for it in items))

    def __str__(self):
        return "(" + ",".join(f"{s.label()}:{s.dim}" for s in self.subsystems) + ")"


def _frozen(a, dtype=np.complex128):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    """Pure state on a :class:`SystemLayout`. Amplitudes are read-only."""

    layout: SystemLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.layout.total_dim,):
            raise ValueError(f"expected {self.layout.total_dim} amplitudes, got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def normalized(self) -> StateVector:
        nrm = self.norm
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.layout, self.amplitudes / nrm)

    def tensor(self):
        return self.amplitudes.reshape(self.layout.dims)

    def data_weights(self) -> np.ndarray:
        """Probability of each data-qudit string, environments summed out.

        Returned flat in lexicographic order of ``(x_1, ..., x_n)``.
        """
        lay = self.layout
        probs = np.abs(self.tensor()) ** 2
        data_pos = lay.data_positions
        others = tuple(i for i in range(len(lay.dims)) if i not in data_pos)
        marg = probs.sum(axis=others) if others else probs
        # remaining axes are data qudits in layout order; reorder to label order
        remaining = sorted(data_pos)
        marg = marg.transpose([remaining.index(p) for p in data_pos])
        return marg.reshape(-1)

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_dict(self) -> dict:
        return {
            "layout": self.layout.to_list(),
            "amplitudes_re": self.amplitudes.real.tolist(),
            "amplitudes_im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> StateVector:
        amps = np.asarray(data["amplitudes_re"], float) + 1j * np.asarray(data["amplitudes_im"], float)
        return cls(SystemLayout.from_list(data["layout"]), amps)


@dataclass(frozen=True)
class DensityMatrix:
    layout: SystemLayout
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        ent = _frozen(self.entries)
        dim = self.layout.total_dim
        if ent.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got {ent.shape}")
        if not np.all(np.isfinite(ent)):
            raise ValueError("entries must be finite")
        object.__setattr__(self, "entries", ent)

    def check(self, tol: float = NORM_TOL) -> None:
        """Raise ValueError unless Hermitian, unit trace and PSD within ``tol``."""
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > tol:
            raise ValueError(f"density matrix trace is {np.trace(rho)!r}")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
            raise ValueError("density matrix has negative eigenvalues")

    @classmethod
    def single(cls, rho) -> DensityMatrix:
        rho = np.asarray(rho, dtype=np.complex128)
        return cls(SystemLayout.qudits(1, rho.shape[0]), rho)


def product_state(locals_: Sequence, d: int | None = None, tol: float = NORM_TOL) -> StateVector:
    """Tensor product of normalized single-qudit vectors, qudit 1 leftmost."""
    vecs = [np.asarray(v, dtype=np.complex128) for v in locals_]
    if not vecs:
        raise ValueError("need at least one qudit")
    d = vecs[0].shape[0] if d is None else d
    amps = np.ones(1, dtype=np.complex128)
    for t, v in enumerate(vecs, start=1):
        if v.shape != (d,):
            raise ValueError(f"qudit {t} has dimension {v.shape}, expected ({d},)")
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise ValueError(f"qudit {t} is not normalized")
        amps = np.kron(amps, v)
    return StateVector(SystemLayout.qudits(len(vecs), d), amps)


def haar_random_local(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state of one qudit (normalized complex Gaussian)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    g = rng.standard_normal((d, 2))
    v = g[:, 0] + 1j * g[:, 1]
    return v / np.linalg.norm(v)


def haar_product_state(n: int, d: int, rng: np.random.Generator) -> tuple[StateVector, list[np.ndarray]]:
    """Random product state plus its local factors."""
    locs = [haar_random_local(d, rng) for _ in range(n)]
    return product_state(locs, d), locs


def random_environment_coeffs(d: int, env_dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random normalized ``d x env_dim`` coefficient matrix (Haar on the pair)."""
    g = rng.standard_normal((d, env_dim, 2))
    c = g[..., 0] + 1j * g[..., 1]
    return c / np.linalg.norm(c)


def _pair_vector(coeffs, tol):
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.ndim != 2:
        raise ValueError("coefficient matrix must be 2-D (data x environment)")
    if abs(np.linalg.norm(c) - 1.0) > tol:
        raise ValueError("coefficient matrix is not normalized")
    # pair layout (E, q): amplitude index e * d + x
    return c.T.reshape(-1)


def environment_entangled_state(coeffs: Sequence, tol: float = NORM_TOL) -> StateVector:
    """State on ``(E1, q1, E2, q2, ...)`` from per-qudit coefficient matrices.

    ``coeffs[t-1][x, e]`` is the amplitude of ``|e>_{E_t} |x>_t``. Row ``x``
    is the (unnormalized) environment branch attached to data digit ``x``.
    """
    mats = [np.asarray(c, dtype=np.complex128) for c in coeffs]
    if not mats:
        raise ValueError("need at least one qudit")
    d, env_dim = mats[0].shape
    amps = np.ones(1, dtype=np.complex128)
    for t, c in enumerate(mats, start=1):
        if c.shape != (d, env_dim):
            raise ValueError(f"qudit {t} coefficients have shape {c.shape}, expected {(d, env_dim)}")
        amps = np.kron(amps, _pair_vector(c, tol))
    return StateVector(SystemLayout.with_environments(len(mats), d, env_dim), amps)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Ginibre) measure."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank, 2))
    a = g[..., 0] + 1j * g[..., 1]
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def _sqrt_psd(rho, tol):
    herm = 0.5 * (rho + rho.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    if evals.min() < -tol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {evals.min():.3g})")
    evals = np.where(evals < 1e-12, 0.0, evals)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def purify(rho, tol: float = NORM_TOL) -> StateVector:
    """Canonical purification ``sum_ij (sqrt rho)_ji |i>_E |j>``.

    The environment has the same dimension as the system; eigenvalues below
    1e-12 are dropped before the square root.
    """
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("density matrix must be square")
    if abs(np.trace(mat) - 1.0) > tol:
        raise ValueError("density matrix must have unit trace")
    root = _sqrt_psd(mat, tol)
    d = mat.shape[0]
    # amplitude of |i>_E |j> is root[j, i]
    amps = root.T.reshape(-1)
    return StateVector(SystemLayout.with_environments(1, d, d), amps).normalized()


def purified_product_state(rhos: Sequence, tol: float = NORM_TOL) -> StateVector:
    """Purify each single-qudit ``rho_t`` and assemble ``(E1, q1, E2, q2, ...)``."""
    coeffs = []
    for rho in rhos:
        pair = purify(rho, tol)
        d = pair.layout.dims[1]
        coeffs.append(pair.amplitudes.reshape(d, d).T)
    return environment_entangled_state(coeffs, tol)


def entanglement_entropy(psi: StateVector, cut: Iterable[int]) -> float:
    """Base-2 entropy of the reduced state on layout positions ``cut``."""
    cut = sorted(set(int(c) for c in cut))
    nsub = len(psi.layout.dims)
    if not cut or len(cut) == nsub:
        raise ValueError("cut must be a nonempty proper subset of the register")
    if not psi.is_normalized():
        raise ValueError("state must be normalized")
    return von_neumann_entropy(reduced_density(psi.amplitudes, psi.layout, cut))
