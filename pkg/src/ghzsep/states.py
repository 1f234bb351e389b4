"""Three-qubit state families, the GHZ basis and simplex sampling.

Density matrices are plain complex ``numpy`` arrays of shape ``(8, 8)``;
:func:`check_density_matrix` is the single place where their invariants are
enforced.

GHZ basis enumeration used throughout the package::

    k = 2 * j + 1  ->  (|0 x2 x3> + |1 ~x2 ~x3>) / sqrt(2)
    k = 2 * j + 2  ->  (|0 x2 x3> - |1 ~x2 ~x3>) / sqrt(2)

with ``j = 0..3`` indexing ``x2 x3`` in ``00, 01, 10, 11``. For a GHZ-diagonal
state this gives ``rho[j, j] = rho[7-j, 7-j] = (p[2j] + p[2j+1]) / 2`` and
``rho[j, 7-j] = (p[2j] - p[2j+1]) / 2`` (0-based indices).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import HERMITIAN_TOL, PSD_TOL, hermitian_eigenvalues, kron, max_asymmetry, pauli_operator

GHZ_WORDS = ("ZZI", "ZIZ", "IZZ", "XXX", "YYX", "YXY", "XYY")
SIMPLEX_TOL = 1e-12


class NotAStateError(ValueError):
    """Raised when a matrix or parameter set does not describe a quantum state."""


def check_density_matrix(
    m, herm_tol: float = HERMITIAN_TOL, trace_tol: float = 1e-12, psd_tol: float = PSD_TOL
) -> np.ndarray:
    """Validate an 8x8 density matrix and return it as a complex array."""
    m = np.array(m, dtype=complex)
    if m.shape != (8, 8):
        raise NotAStateError(f"expected an 8x8 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotAStateError("matrix has non-finite entries")
    asym = max_asymmetry(m)
    if asym > herm_tol:
        raise NotAStateError(f"not Hermitian: max |M - M^dagger| = {asym:.3e}")
    tr = np.trace(m).real
    if abs(tr - 1.0) > trace_tol:
        raise NotAStateError(f"trace is {tr!r}, expected 1")
    lo = hermitian_eigenvalues(m, tol=herm_tol)[0]
    if lo < -psd_tol:
        raise NotAStateError(f"not a state: minimal eigenvalue {lo:.3e} < 0")
    return m


def kay_state(alpha_hat: float) -> np.ndarray:
    """The one-parameter GHZ-diagonal family, valid for ``alpha_hat >= 2``."""
    alpha_hat = float(alpha_hat)
    if not alpha_hat >= 2.0:
        lo = (alpha_hat - 2.0) / (8.0 + 8.0 * alpha_hat)
        raise NotAStateError(
            f"not a state for alpha_hat = {alpha_hat:g} < 2 (minimal eigenvalue {lo:.3g})"
        )
    m = np.diag([4 + alpha_hat] + [alpha_hat] * 6 + [4 + alpha_hat]).astype(complex)
    for i, v in enumerate((2.0, 2.0, -2.0, 2.0)):
        m[i, 7 - i] = m[7 - i, i] = v
    return m / (8.0 + 8.0 * alpha_hat)


def hyllus_state(eta: float) -> np.ndarray:
    """W-vicinity family: all-ones block on |001>, |010>, |100>, |111> unpopulated."""
    eta = float(eta)
    if not eta > 0.0:
        raise NotAStateError(f"eta must be positive, got {eta!r}")
    m = np.zeros((8, 8), dtype=complex)
    m[0, 0] = 2.0 * eta
    block = [1, 2, 4]
    m[np.ix_(block, block)] = 1.0
    for i in (3, 5, 6):
        m[i, i] = 1.0 / eta
    return m / (3.0 + 2.0 * eta + 3.0 / eta)


def ghz_basis_vector(k: int) -> np.ndarray:
    """The ``k``-th GHZ basis vector, ``k`` in 1..8 (see module docstring)."""
    if k not in range(1, 9):
        raise ValueError(f"k must be in 1..8, got {k!r}")
    j, minus = divmod(k - 1, 2)
    v = np.zeros(8, dtype=complex)
    v[j] = 1.0
    v[7 - j] = -1.0 if minus else 1.0
    return v / math.sqrt(2.0)


@functools.lru_cache(maxsize=None)
def _ghz_sign_table() -> np.ndarray:
    # rows: identity + GHZ_WORDS, columns: basis states; entries are +-1
    vecs = [ghz_basis_vector(k) for k in range(1, 9)]
    ops = [np.eye(8)] + [pauli_operator(w) for w in GHZ_WORDS]
    table = np.array([[np.vdot(v, op @ v).real for v in vecs] for op in ops])
    table = np.rint(table)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class GhzDiagonalState:
    """A GHZ-diagonal state held in both of its linear coordinates.

    ``probs`` are the GHZ-basis weights ``p_1..p_8``; ``lambdas`` the Pauli
    coefficients of ``ZZI, ZIZ, IZZ, XXX, YYX, YXY, XYY`` (``lambda_2..lambda_8``).
    """

    probs: np.ndarray
    lambdas: np.ndarray = field(repr=False)

    @property
    def matrix(self) -> np.ndarray:
        p = self.probs
        m = np.zeros((8, 8))
        for j in range(4):
            m[j, j] = m[7 - j, 7 - j] = 0.5 * (p[2 * j] + p[2 * j + 1])
            m[j, 7 - j] = m[7 - j, j] = 0.5 * (p[2 * j] - p[2 * j + 1])
        return m.astype(complex)

    @property
    def diagonal_part(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.lambdas[:3])

    @property
    def antidiagonal_part(self) -> tuple[float, float, float, float]:
        return tuple(float(v) for v in self.lambdas[3:])


def ghz_diagonal_from_probs(p) -> GhzDiagonalState:
    p = np.array(p, dtype=float)
    if p.shape != (8,):
        raise ValueError(f"expected 8 probabilities, got shape {p.shape}")
    if np.any(p < -SIMPLEX_TOL) or abs(p.sum() - 1.0) > SIMPLEX_TOL:
        raise NotAStateError(f"probabilities are not on the simplex: {p.tolist()}")
    lambdas = _ghz_sign_table()[1:] @ p
    p.setflags(write=False)
    lambdas.setflags(write=False)
    return GhzDiagonalState(p, lambdas)


def ghz_diagonal_from_lambdas(lambdas) -> GhzDiagonalState:
    """Inverse of the probability-to-Pauli map; rejects negative implied weights."""
    lam = np.array(lambdas, dtype=float)
    if lam.shape != (7,):
        raise ValueError(f"expected 7 Pauli coefficients, got shape {lam.shape}")
    full = np.concatenate(([1.0], lam))
    # the sign table is orthogonal up to a factor 8
    p = _ghz_sign_table().T @ full / 8.0
    if np.any(p < -SIMPLEX_TOL):
        raise NotAStateError(f"not a state: implied GHZ weights {p.tolist()}")
    p = np.clip(p, 0.0, None)
    p.setflags(write=False)
    lam.setflags(write=False)
    return GhzDiagonalState(p, lam)


def ghz_diagonal_from_matrix(m, tol: float = 1e-12) -> GhzDiagonalState | None:
    """Read off GHZ weights if ``m`` is GHZ-diagonal within ``tol``, else ``None``."""
    m = np.asarray(m, dtype=complex)
    mask = np.eye(8, dtype=bool) | np.fliplr(np.eye(8, dtype=bool))
    if np.max(np.abs(m[~mask]), initial=0.0) > tol or np.max(np.abs(m.imag)) > tol:
        return None
    d = np.real(np.diag(m))
    if np.max(np.abs(d - d[::-1])) > tol:
        return None
    r = np.real(np.fliplr(m).diagonal())
    p = np.empty(8)
    p[0::2] = d[:4] + r[:4]
    p[1::2] = d[:4] - r[:4]
    p = np.where(np.abs(p) <= tol, np.abs(p), p)
    total = p.sum()
    return ghz_diagonal_from_probs(p / total)


@dataclass(frozen=True)
class ProductStateParams:
    """Amplitudes of a pure three-qubit product state and its derived phases."""

    c: tuple[complex, complex, complex]
    s: tuple[complex, complex, complex]
    phis: tuple[float, float, float]
    kappa: float
    a: float
    b: float
    c_phase: float


def product_state(c, s, tol: float = 1e-12) -> tuple[ProductStateParams, np.ndarray]:
    """Build ``(c1|0>+s1|1>) (x) (c2|0>+s2|1>) (x) (c3|0>+s3|1>)`` and its phases."""
    c = tuple(complex(v) for v in c)
    s = tuple(complex(v) for v in s)
    if len(c) != 3 or len(s) != 3:
        raise ValueError("need three amplitudes c and three amplitudes s")
    for k in range(3):
        norm = abs(c[k]) ** 2 + abs(s[k]) ** 2
        if abs(norm - 1.0) > tol:
            raise NotAStateError(f"qubit {k + 1} is not normalised: |c|^2 + |s|^2 = {norm!r}")
    psi = kron(*(np.array([c[k], s[k]]) for k in range(3)))
    rho = np.outer(psi, psi.conj())
    phis = tuple(float(np.angle(c[k] * s[k].conjugate())) for k in range(3))
    kappa = math.prod(abs(c[k] * s[k]) for k in range(3))
    f1, f2, f3 = phis
    params = ProductStateParams(
        c=c, s=s, phis=phis, kappa=kappa, a=f1 + f2 - f3, b=f1 - f2 + f3, c_phase=-f1 + f2 + f3
    )
    _check_product_identities(params, rho)
    return params, rho


def _check_product_identities(params: ProductStateParams, rho: np.ndarray, tol: float = 1e-12):
    k, a, b, c = params.kappa, params.a, params.b, params.c_phase
    expected = {
        (0, 7): k * np.exp(1j * (a + b + c)),
        (1, 6): k * np.exp(1j * a),
        (2, 5): k * np.exp(1j * b),
        (4, 3): k * np.exp(1j * c),
    }
    d = np.real(np.diag(rho))
    kappas = [math.sqrt(max(d[i] * d[7 - i], 0.0)) for i in range(4)]
    kappas.append((d[0] * d[3] * d[5] * d[6]) ** 0.25)
    kappas.append((d[1] * d[2] * d[4] * d[7]) ** 0.25)
    worst = max(abs(rho[ij] - v) for ij, v in expected.items())
    worst = max(worst, max(abs(v - k) for v in kappas))
    if worst > tol:
        raise ArithmeticError(f"product-state identities violated by {worst:.3e}")


def random_product_state(rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure product state as an 8x8 density matrix."""
    qubits = []
    for _ in range(3):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        qubits.append(v / np.linalg.norm(v))
    psi = kron(*qubits)
    return np.outer(psi, psi.conj())


def sample_simplex(seed, n: int) -> np.ndarray:
    """``n`` points drawn uniformly from the probability simplex in R^8.

    Uses normalised unit-rate exponential variates from a PCG64 generator
    seeded with ``seed`` (an int or a sequence of ints), so a given seed
    yields the same points on every platform.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    e = rng.standard_exponential(size=(n, 8))
    return e / e.sum(axis=1, keepdims=True)


def apply_filter(rho, x: float) -> np.ndarray:
    """Local filter ``diag(1/x, x^2)`` on every qubit, renormalised."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"filter parameter must be positive, got {x!r}")
    f = np.diag([1.0 / x, x * x])
    ftot = kron(f, f, f)
    out = ftot @ np.asarray(rho, dtype=complex) @ ftot
    tr = np.trace(out).real
    if not tr > 0.0:
        raise NotAStateError("filtered matrix has zero trace")
    return out / tr
