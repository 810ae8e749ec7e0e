"""Dense linear algebra for one- and two-qubit states.

Basis ordering is |00>, |01>, |10>, |11> with |0> the excited level |e> and
|1> the ground level |g>.  A state is a plain ``numpy`` array; the helpers
below validate and manipulate it.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-8

_PAULI = {
    "identity": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
}


class InvalidArgument(ValueError):
    """Raised when an input violates an operation's precondition."""


def pauli(which: str) -> np.ndarray:
    """Return a 2x2 Pauli-type matrix.

    ``which`` is one of x, y, z, plus, minus, identity; plus/minus are the
    ladder operators (sigma_x +/- i sigma_y)/2.
    """
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise InvalidArgument(
            f"unknown Pauli label {which!r}; expected one of {sorted(_PAULI)}"
        ) from None


def as_matrix(m, dims=(2, 4)) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise InvalidArgument(f"expected a square matrix of dimension {dims}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgument("matrix has non-finite entries")
    return m


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices; row index is 2*i_a + i_b."""
    a = as_matrix(a, dims=(2,))
    b = as_matrix(b, dims=(2,))
    return np.kron(a, b)


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def check_density_matrix(rho, tol: float = DEFAULT_TOL, dims=(2, 4)) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array."""
    rho = as_matrix(rho, dims=dims)
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > tol:
        raise InvalidArgument(f"state is not Hermitian (max |rho - rho^+| = {herm_err:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidArgument(f"state trace is {tr.real:.12g}, expected 1")
    lam_min = hermitian_eigenvalues(rho, tol=tol)[0]
    if lam_min < -tol:
        raise InvalidArgument(f"state is not positive semidefinite (min eigenvalue {lam_min:.3g})")
    return rho


def hermitian_eigenvalues(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian 2x2 or 4x4 matrix."""
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise InvalidArgument("matrix is not Hermitian")
    if m.shape[0] == 2:
        a, d = m[0, 0].real, m[1, 1].real
        tr = a + d
        # tr^2 - 4 det written as a sum of squares so it stays non-negative
        disc = np.sqrt((a - d) ** 2 + 4 * abs(m[0, 1]) ** 2)
        return np.array([(tr - disc) / 2, (tr + disc) / 2])
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduce a two-qubit state to subsystem ``keep`` ('A' or 'B')."""
    rho = as_matrix(rho, dims=(4,))
    r = rho.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ajbj->ab", r)
    if keep == "B":
        return np.einsum("iaib->ab", r)
    raise InvalidArgument(f"keep must be 'A' or 'B', got {keep!r}")


def von_neumann_entropy(rho) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    lam = hermitian_eigenvalues(rho)
    lam = lam[lam > 1e-15]
    s = float(-np.sum(lam * np.log2(lam)))
    return max(s, 0.0)


def ket(label: str) -> np.ndarray:
    """Computational basis ket for a bit string such as '0' or '01'."""
    if not label or any(c not in "01" for c in label) or len(label) > 2:
        raise InvalidArgument(f"bad basis label {label!r}")
    v = np.zeros(2 ** len(label), dtype=complex)
    v[int(label, 2)] = 1.0
    return v


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def qubit_state(x: float, y: float, z: float) -> np.ndarray:
    """Single-qubit state from Bloch components k = Tr(sigma_k rho)."""
    if x * x + y * y + z * z > 1 + DEFAULT_TOL:
        raise InvalidArgument("Bloch vector longer than 1")
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


def bloch_vector(rho) -> np.ndarray:
    rho = as_matrix(rho, dims=(2,))
    return np.array([np.trace(rho @ _PAULI[k]).real for k in "xyz"])


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state from the Ginibre ensemble (pure when rank=1)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def trace_distance(a, b) -> float:
    lam = hermitian_eigenvalues(np.asarray(a) - np.asarray(b))
    return 0.5 * float(np.sum(np.abs(lam)))
