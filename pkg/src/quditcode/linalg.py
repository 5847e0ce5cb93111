"""Dense complex kernels over multi-subsystem registers.

States are 1-D complex arrays, operators are square 2-D complex arrays.
Registers are described by a sequence of local dimensions (or any object
with a ``dims`` attribute, e.g. :class:`quditcode.state.SystemLayout`).
The leftmost subsystem is the most significant in the flattened index.
"""
from collections.abc import Sequence

import numpy as np

__all__ = [
    "ATOL",
    "NORM_TOL",
    "tensor_product",
    "apply_operator",
    "embed_on_subsystems",
    "embed_diagonal",
    "partial_trace",
    "reduced_density",
    "fidelity_pure",
    "fidelity_state_density",
    "trace_distance",
    "von_neumann_entropy",
]

NORM_TOL = 1e-10
ATOL = 1e-12


def _dims(layout) -> tuple[int, ...]:
    dims = getattr(layout, "dims", layout)
    return tuple(int(x) for x in dims)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("array contains NaN or Inf entries")


def tensor_product(a, b):
    """Kronecker product of two states or two operators.

    The left operand is the most significant factor, so entry ``i*len(b)+j``
    of a state product is ``a[i] * b[j]``.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("operands must both be states (1-D) or both operators (2-D)")
    _check_finite(a, b)
    return np.kron(a, b)


def apply_operator(op, v):
    """Return ``op @ v`` without renormalizing."""
    op = np.asarray(op, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("operator must be square")
    if v.shape != (op.shape[1],):
        raise ValueError(f"dimension mismatch: operator {op.shape}, state {v.shape}")
    return op @ v


def _check_targets(dims, targets):
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < len(dims):
            raise IndexError(f"target subsystem {t} out of range for {len(dims)} subsystems")
    return targets


def embed_on_subsystems(op, layout, targets: Sequence[int]):
    """Lift ``op`` acting on ``targets`` to the whole register.

    ``targets`` are 0-based subsystem positions; their order fixes how the
    factors of ``op`` are wired (first target = most significant factor of
    ``op``). All other subsystems get the identity.
    """
    dims = _dims(layout)
    targets = _check_targets(dims, targets)
    op = np.asarray(op, dtype=np.complex128)
    tdims = [dims[t] for t in targets]
    if op.shape != (int(np.prod(tdims)),) * 2:
        raise ValueError(f"operator shape {op.shape} does not match target dims {tdims}")
    rest = [i for i in range(len(dims)) if i not in targets]
    rdim = int(np.prod([dims[i] for i in rest], dtype=np.int64))
    full = np.kron(op, np.eye(rdim, dtype=np.complex128))
    order = targets + rest
    nsub = len(dims)
    full = full.reshape([dims[i] for i in order] * 2)
    # axis j of the current tensor holds subsystem order[j]
    perm = [order.index(i) for i in range(nsub)]
    full = full.transpose(perm + [nsub + p for p in perm])
    total = int(np.prod(dims, dtype=np.int64))
    return full.reshape(total, total)


def embed_diagonal(diag, layout, targets: Sequence[int]):
    """Diagonal of ``embed_on_subsystems(np.diag(diag), layout, targets)``."""
    dims = _dims(layout)
    targets = _check_targets(dims, targets)
    diag = np.asarray(diag)
    tdims = [dims[t] for t in targets]
    if diag.shape != (int(np.prod(tdims)),):
        raise ValueError(f"diagonal length {diag.shape} does not match target dims {tdims}")
    tensor = diag.reshape(tdims).transpose([targets.index(s) for s in sorted(targets)])
    shape = [dims[i] if i in targets else 1 for i in range(len(dims))]
    return np.broadcast_to(tensor.reshape(shape), dims).reshape(-1).copy()


def partial_trace(rho, layout, keep):
    """Trace out every subsystem not in ``keep`` (0-based positions).

    Kept subsystems appear in ascending layout order in the result.
    """
    dims = _dims(layout)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    for k in keep:
        if not 0 <= k < len(dims):
            raise IndexError(f"subsystem {k} out of range")
    rho = np.asarray(rho, dtype=np.complex128)
    nsub = len(dims)
    traced = [i for i in range(nsub) if i not in keep]
    t = rho.reshape(list(dims) * 2)
    # bring traced row/col axes to the back, then contract them pairwise
    t = t.transpose(keep + traced + [nsub + i for i in keep] + [nsub + i for i in traced])
    kd = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    td = int(np.prod([dims[i] for i in traced], dtype=np.int64))
    t = t.reshape(kd, td, kd, td)
    return np.einsum("ajbj->ab", t)


def reduced_density(psi, layout, keep):
    """Reduced density matrix of a pure state, same convention as partial_trace."""
    dims = _dims(layout)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    psi = np.asarray(psi, dtype=np.complex128)
    nsub = len(dims)
    traced = [i for i in range(nsub) if i not in keep]
    t = psi.reshape(dims).transpose(keep + traced)
    kd = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    mat = t.reshape(kd, -1)
    return mat @ mat.conj().T


def fidelity_pure(u, v, tol: float = NORM_TOL) -> float:
    """Overlap ``|<u|v>|**2`` of two normalized pure states."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    for x in (u, v):
        if abs(np.linalg.norm(x) - 1.0) > tol:
            raise ValueError(f"state not normalized (norm={np.linalg.norm(x)!r})")
    return float(min(1.0, abs(np.vdot(u, v)) ** 2))


def fidelity_state_density(psi, rho) -> float:
    """``<psi|rho|psi>``, the fidelity of a pure state with a mixed one."""
    psi = np.asarray(psi, dtype=np.complex128)
    return float(np.real(np.vdot(psi, np.asarray(rho) @ psi)))


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def von_neumann_entropy(rho, cutoff: float = 1e-15) -> float:
    """Base-2 von Neumann entropy."""
    evals = np.linalg.eigvalsh(0.5 * (rho + np.asarray(rho).conj().T))
    evals = evals[evals > cutoff]
    return float(max(0.0, -(evals * np.log2(evals)).sum()))
