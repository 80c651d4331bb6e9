"""Dense complex linear algebra helpers.

Matrices and vectors are plain ``numpy`` complex128 arrays. Subsystem
ordering follows the usual Kronecker convention: the first factor is the
high-order subsystem, so for two spins basis index ``b1 b0`` reads as
``|spin A, spin B>``.
"""

from __future__ import annotations

import numpy as np

# Structural checks (unitarity, Hermiticity) in Frobenius norm.
ATOL = 1e-10
MAX_DIM = 2**12


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise ValueError(f"expected a vector, got shape {a.shape}")
    return a


def dagger(m) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def kron(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the high-order factor."""
    a, b = as_matrix(a), as_matrix(b)
    return np.kron(a, b)


def kron_all(factors) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def apply(u, v) -> np.ndarray:
    u, v = as_matrix(u), as_vector(v)
    if u.shape[0] != v.shape[0]:
        raise ValueError(f"dimension mismatch: matrix {u.shape[0]}, vector {v.shape[0]}")
    return u @ v


def frobenius_norm(m) -> float:
    """sqrt(sum |m_ij|^2). Used as the ||.||_2 of density-matrix comparisons."""
    return float(np.sqrt(np.sum(np.abs(np.asarray(m, dtype=complex)) ** 2)))


def global_phase_fidelity(u, v) -> float:
    """|tr(u^dagger v)| / dim, which is 1 iff v = exp(i a) u for unitary inputs."""
    u, v = as_matrix(u), as_matrix(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    f = abs(np.vdot(u, v)) / u.shape[0]
    return float(min(f, 1.0))


def is_unitary(u, atol: float = ATOL) -> bool:
    u = as_matrix(u)
    return frobenius_norm(dagger(u) @ u - np.eye(u.shape[0])) < atol


def hermiticity_deviation(m) -> float:
    """Largest entry magnitude of m - m^dagger."""
    m = as_matrix(m)
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def is_hermitian(m, atol: float = ATOL) -> bool:
    m = as_matrix(m)
    return frobenius_norm(m - dagger(m)) < atol


def is_power_of_two(d: int) -> bool:
    return d >= 1 and d & (d - 1) == 0


def num_qubits(dim: int) -> int:
    if not is_power_of_two(dim):
        raise ValueError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1
