"""Small dense linear algebra for three-qubit operators.

Everything here works on plain ``numpy`` arrays. Basis index ``i`` (0-based)
maps to the bit string ``q1 q2 q3`` of ``i`` with ``q1`` the most significant
bit, i.e. the canonical order ``|000>, |001>, ..., |111>``.

The eigensolver is a cyclic complex Jacobi iteration. It accepts a stack of
matrices of shape ``(..., n, n)`` so that whole Monte Carlo chunks can be
diagonalised with vectorised rotations.
"""

from __future__ import annotations

import functools

import numpy as np

PARTIES = ("A", "B", "C")
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron(*ops) -> np.ndarray:
    """Tensor product of the given operators, left to right."""
    return functools.reduce(np.kron, ops)


def max_asymmetry(m: np.ndarray) -> float:
    """Largest entry of ``|M - M^dagger|`` (over a whole stack if given)."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))), initial=0.0))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return max_asymmetry(m) <= tol


def jacobi_eigenvalues(
    mats: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60
) -> np.ndarray:
    """Eigenvalues of a stack of Hermitian matrices by cyclic Jacobi rotations.

    Each rotation first removes the phase of ``a[p, q]`` and then applies the
    real two-by-two Jacobi rotation with ``|tan(theta)| <= 1``. Sweeps stop once
    the off-diagonal Frobenius norm of every matrix in the stack is below
    ``tol * max(1, ||A||_F)``.

    Args:
        mats: array of shape ``(..., n, n)``; only the Hermitian part is used.
        tol: convergence threshold on the off-diagonal norm.
        max_sweeps: hard cap on the number of cyclic sweeps.

    Returns:
        Real eigenvalues of shape ``(..., n)``, ascending along the last axis.
    """
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim < 2 or mats.shape[-1] != mats.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {mats.shape}")
    batch_shape = mats.shape[:-2]
    n = mats.shape[-1]
    a = mats.reshape((-1, n, n)).copy()
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2))))
    off_mask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, off_mask]) ** 2, axis=1))
        if np.all(off < tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > 0.0
                if not np.any(active):
                    continue
                phase = np.ones_like(apq)
                phase[active] = apq[active] / mag[active]
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                safe = np.where(active, mag, 1.0)
                zeta = (aqq - app) / (2.0 * safe)
                t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                ph = np.conj(phase)
                col_p = a[:, :, p].copy()
                col_q = a[:, :, q]
                a[:, :, p] = c[:, None] * col_p - (s * ph)[:, None] * col_q
                a[:, :, q] = s[:, None] * col_p + (c * ph)[:, None] * col_q
                row_p = a[:, p, :].copy()
                row_q = a[:, q, :]
                a[:, p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
                a[:, q, :] = s[:, None] * row_p + (c * phase)[:, None] * row_q
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
    evals = np.sort(np.real(np.diagonal(a, axis1=1, axis2=2)), axis=-1)
    return evals.reshape(batch_shape + (n,))


def hermitian_eigenvalues(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix of dimension at most 8.

    Raises:
        ValueError: if the matrix is not square, too large, or deviates from
            Hermiticity by more than ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > 8:
        raise ValueError(f"dimension {m.shape[0]} exceeds 8")
    asym = max_asymmetry(m)
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian: max |M - M^dagger| = {asym:.3e} > {tol:g}")
    return jacobi_eigenvalues(m)


def partial_transpose(m: np.ndarray, party: str) -> np.ndarray:
    """Transpose the tensor factor of qubit ``party`` (one of A, B, C).

    Works on a single 8x8 matrix or a stack ``(..., 8, 8)``. Only entries are
    permuted, so trace and Hermiticity are preserved exactly.
    """
    try:
        k = PARTIES.index(party)
    except ValueError:
        raise ValueError(f"party must be one of {PARTIES}, got {party!r}") from None
    m = np.asarray(m)
    if m.shape[-2:] != (8, 8):
        raise ValueError(f"expected 8x8 matrices, got shape {m.shape}")
    lead = m.shape[:-2]
    t = m.reshape(lead + (2, 2, 2, 2, 2, 2))
    nl = len(lead)
    axes = list(range(nl + 6))
    axes[nl + k], axes[nl + 3 + k] = axes[nl + 3 + k], axes[nl + k]
    return t.transpose(axes).reshape(lead + (8, 8))


def min_eigenvalue_after_pt(rho: np.ndarray, party: str) -> float:
    """Smallest eigenvalue of the partial transpose; NPT iff below ``-PSD_TOL``."""
    return float(hermitian_eigenvalues(partial_transpose(rho, party))[0])


def pt_min_eigenvalues(rhos: np.ndarray) -> np.ndarray:
    """Minimal partial-transpose eigenvalue for each party, batched.

    Returns an array of shape ``(..., 3)`` ordered as :data:`PARTIES`.
    """
    rhos = np.asarray(rhos, dtype=complex)
    pts = np.stack([partial_transpose(rhos, p) for p in PARTIES], axis=-3)
    return jacobi_eigenvalues(pts)[..., 0]


@functools.lru_cache(maxsize=None)
def _pauli_word(word: str) -> np.ndarray:
    op = kron(*(_PAULI[ch] for ch in word))
    op.setflags(write=False)
    return op


def pauli_operator(word: str) -> np.ndarray:
    """Matrix of a Pauli word such as ``"XYY"`` (letters from I, X, Y, Z)."""
    word = word.upper()
    bad = [ch for ch in word if ch not in _PAULI]
    if bad or not word:
        raise ValueError(f"invalid Pauli word {word!r}")
    return _pauli_word(word)


def pauli_expectation(rho: np.ndarray, word: str) -> float:
    """``Tr(rho P)`` for a three-letter Pauli word ``P``."""
    if len(word) != 3:
        raise ValueError(f"expected a three-letter Pauli word, got {word!r}")
    op = pauli_operator(word)
    rho = np.asarray(rho)
    # Tr(rho P) = sum_ij rho_ij P_ji
    return float(np.real(np.sum(rho * op.T)))
