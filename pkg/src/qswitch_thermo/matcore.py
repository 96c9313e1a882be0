"""Small dense complex linear algebra.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every joint
probe-control operator uses the probe-major convention ``probe ⊗ control``:
the joint index is ``probe_index * control_dim + control_index``, which is
what ``numpy.kron(probe_op, control_op)`` produces.
"""

from typing import NamedTuple

import numpy as np

from .errors import PreconditionError

HERMITIAN_TOL = 1e-10
PSD_TOL = -1e-12


class EigenDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the matching orthonormal eigenvectors.

    ``eigenvectors[:, k]`` belongs to ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise PreconditionError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def max_asymmetry(a: np.ndarray) -> float:
    """Largest entrywise deviation ``|A - A†|``."""
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(a)
    return m.shape[0] == m.shape[1] and max_asymmetry(m) <= tol


def check_density_matrix(rho, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises:
        PreconditionError: if ``rho`` is not square, not Hermitian, not of
            unit trace, or has an eigenvalue below ``PSD_TOL``.
    """
    m = as_matrix(rho)
    if m.shape[0] != m.shape[1]:
        raise PreconditionError(f"density matrix must be square, got {m.shape}")
    asym = max_asymmetry(m)
    if asym > tol:
        raise PreconditionError(f"density matrix is not Hermitian (max asymmetry {asym:.3e})")
    tr = np.trace(m)
    if abs(tr - 1.0) > tol:
        raise PreconditionError(f"density matrix trace is {tr.real:.15g}, expected 1")
    lowest = np.linalg.eigvalsh(m)[0]
    if lowest < PSD_TOL:
        raise PreconditionError(f"density matrix has negative eigenvalue {lowest:.3e}")
    return m


def hermitian_eig(a) -> EigenDecomposition:
    """Eigendecomposition of a small Hermitian matrix.

    Only the lower triangle is read by the LAPACK routine, so the input is
    symmetrised first; this keeps reconstruction errors at round-off level
    for inputs that are Hermitian up to accumulated float error.

    Raises:
        PreconditionError: for non-square input, or when ``|A - A†|``
            exceeds 1e-10 anywhere (the message names the asymmetry).
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise PreconditionError(f"hermitian_eig needs a square matrix, got {m.shape}")
    asym = max_asymmetry(m)
    if asym > HERMITIAN_TOL:
        raise PreconditionError(f"matrix is not Hermitian: max asymmetry {asym:.3e}")
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    return EigenDecomposition(w, u)


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` (first factor major)."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_control(joint, probe_dim: int = 2, control_dim: int = 2) -> np.ndarray:
    """Trace out the control factor of a ``probe ⊗ control`` operator."""
    m = as_matrix(joint)
    n = probe_dim * control_dim
    if m.shape != (n, n):
        raise PreconditionError(
            f"joint operator has shape {m.shape}, expected {(n, n)} "
            f"for probe_dim={probe_dim}, control_dim={control_dim}"
        )
    return np.einsum("icjc->ij", m.reshape(probe_dim, control_dim, probe_dim, control_dim))


def partial_trace_probe(joint, probe_dim: int = 2, control_dim: int = 2) -> np.ndarray:
    """Trace out the probe factor, leaving the control state."""
    m = as_matrix(joint)
    n = probe_dim * control_dim
    if m.shape != (n, n):
        raise PreconditionError(f"joint operator has shape {m.shape}, expected {(n, n)}")
    return np.einsum("aiaj->ij", m.reshape(probe_dim, control_dim, probe_dim, control_dim))
