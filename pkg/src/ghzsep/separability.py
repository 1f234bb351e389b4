"""Explicit full-separability certificates for GHZ-diagonal states.

A GHZ-diagonal state is written as ``rho = (1 + D + A) / 8`` with the diagonal
part ``D = l2 ZZI + l3 ZIZ + l4 IZZ`` and the anti-diagonal part
``A = l5 XXX + l6 YYX + l7 YXY + l8 XYY``. ``|l_minus| 1 + D`` is a positive
diagonal operator, hence separable. The anti-diagonal part is covered by
operators ``t 1 + P`` with ``P`` a product of traceless local terms, each of
which is separable once ``t`` reaches the spectral radius of ``P``. A state is
certified when the identity budget of all pieces does not exceed one.

Three constructions are tried, cheapest first:

* ``abs_sum``: one term ``|l_j| 1 + l_j P_j`` per Pauli word.
* ``mu_cubed``: the anti-diagonal part equals ``m w(theta)`` where
  ``w(theta) = (c1 c2 c3, s1 s2 c3, s1 c2 s3, c1 s2 s3)`` is the weight of
  ``(A + B)^{(x)3}`` with ``A_i = cos(theta_i) X``, ``B_i = sin(theta_i) Y``
  after removing the terms with an odd number of ``Y``. Budget ``m``.
* ``two_term_search``: ``p (A + B)^{(x)3} + (1 - p) (A' - B')^{(x)3}`` with
  independent angles, found numerically.

Terms with an odd number of ``Y`` factors are removed by the local twirl
``rho -> (rho + XXX rho XXX) / 2``, which keeps separable states separable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .linalg import PSD_TOL, jacobi_eigenvalues, kron, pauli_operator
from .states import GHZ_WORDS, GhzDiagonalState

BUDGET_TOL = 1e-12
WEIGHT_TOL = 1e-9
METHODS = ("abs_sum", "mu_cubed", "two_term_search")

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


class CertificateError(RuntimeError):
    """A certificate failed re-validation by explicit reconstruction."""


def lambda_minus(l2: float, l3: float, l4: float) -> float:
    """Smallest eigenvalue of ``l2 ZZI + l3 ZIZ + l4 IZZ`` (never positive)."""
    return min(l2 + l3 + l4, l2 - l3 - l4, -l2 + l3 - l4, -l2 - l3 + l4)


def mu_cubed(l5: float, l6: float, l7: float, l8: float) -> float | None:
    """Identity budget of the single-angle decomposition, or ``None`` if inapplicable.

    Inapplicable when some coefficient is zero, when an odd number are
    negative, or when the radicand is negative.
    """
    m = _kernels.mu_cubed(float(l5), float(l6), float(l7), float(l8))
    return None if m < 0.0 else float(m)


def weight_vector(theta) -> np.ndarray:
    """``w(theta)``: coefficients of XXX, YYX, YXY, XYY in one twirled product term."""
    c = np.cos(theta)
    s = np.sin(theta)
    return np.array([c[0] * c[1] * c[2], s[0] * s[1] * c[2], s[0] * c[1] * s[2], c[0] * s[1] * s[2]])


def mu_angles(l5: float, l6: float, l7: float, l8: float) -> np.ndarray | None:
    """Angles with ``mu_cubed * w(theta) = (l5, l6, l7, l8)``."""
    if mu_cubed(l5, l6, l7, l8) is None:
        return None
    t1 = math.sqrt(l6 * l7 / (l5 * l8))
    t2 = (l6 / l5) / t1
    t3 = (l7 / l5) / t1
    theta = np.arctan([t1, t2, t3])
    if l5 < 0.0:
        theta[0] += math.pi
    return theta


@dataclass(frozen=True)
class SeparabilityCertificate:
    """Parameters of an explicit separable decomposition.

    For ``mu_cubed`` and ``two_term_search`` the anti-diagonal part is
    ``p r^3 w(theta) + (1 - p) r_hat^3 w(theta_hat)`` with all three local
    radii equal, so ``eta = -r^3`` and ``eta_hat = -r_hat^3``.
    """

    method: str
    lambda_minus: float
    budget: float
    lambdas: np.ndarray = field(repr=False)
    mu: float | None = None
    p: float | None = None
    r: tuple[float, float, float] | None = None
    theta: tuple[float, float, float] | None = None
    r_hat: tuple[float, float, float] | None = None
    theta_hat: tuple[float, float, float] | None = None
    eta: float | None = None
    eta_hat: float | None = None

    @property
    def valid(self) -> bool:
        return self.budget <= 1.0 + BUDGET_TOL

    def reconstructed_weights(self) -> np.ndarray:
        """Coefficients of XXX, YYX, YXY, XYY implied by the parameters."""
        if self.method == "abs_sum":
            return np.array(self.lambdas[3:], dtype=float)
        a = self.p * np.prod(self.r) * weight_vector(np.array(self.theta))
        b = (1.0 - self.p) * np.prod(self.r_hat) * weight_vector(np.array(self.theta_hat))
        return a + b

    def to_dict(self) -> dict:
        out = {"method": self.method, "lambda_minus": self.lambda_minus, "budget": self.budget}
        for name in ("mu", "p", "r", "theta", "r_hat", "theta_hat", "eta", "eta_hat"):
            val = getattr(self, name)
            if val is not None:
                out[name] = list(val) if isinstance(val, tuple) else val
        return out


def _two_atom_certificate(method, s, lm, u, theta, v, theta_hat, mu=None):
    total = u + v
    rad = total ** (1.0 / 3.0)
    return SeparabilityCertificate(
        method=method,
        lambda_minus=lm,
        budget=float(abs(lm) + total),
        lambdas=s.lambdas,
        mu=None if mu is None else float(mu),
        p=float(u / total),
        r=(rad,) * 3,
        theta=tuple(float(t) for t in theta),
        r_hat=(rad,) * 3,
        theta_hat=tuple(float(t) for t in theta_hat),
        eta=-float(total),
        eta_hat=-float(total),
    )


def _lm(s: GhzDiagonalState) -> float:
    return lambda_minus(*s.lambdas[:3])


def abs_sum_certificate(s: GhzDiagonalState) -> SeparabilityCertificate | None:
    lm = _lm(s)
    budget = abs(lm) + float(np.sum(np.abs(s.lambdas[3:])))
    if budget > 1.0 + BUDGET_TOL:
        return None
    return SeparabilityCertificate("abs_sum", lm, budget, s.lambdas)


def mu_certificate(s: GhzDiagonalState) -> SeparabilityCertificate | None:
    lam = s.lambdas[3:]
    mu = mu_cubed(*lam)
    lm = _lm(s)
    if mu is None or abs(lm) + mu > 1.0 + BUDGET_TOL:
        return None
    theta = mu_angles(*lam)
    return _two_atom_certificate("mu_cubed", s, lm, 0.5 * mu, theta, 0.5 * mu, theta, mu=mu)


def two_term_certificate(
    s: GhzDiagonalState,
    budget_target: float = 1.0,
    restarts: int = 20,
    seed=0,
    maxiter: int = 1000,
) -> SeparabilityCertificate | None:
    """Search for an unequal two-term decomposition with total budget <= target.

    The search minimises ``v + mu_cubed(lam - v w(theta_hat))`` over
    ``(sqrt(v), theta_hat)``: one atom is placed explicitly and the remainder
    is covered by the single-angle decomposition, so the weight-matching
    constraints hold by construction. The first start is the single-angle
    solution split in half; random restarts follow. Returns the first
    certificate within target, or ``None``.
    """
    lam = np.ascontiguousarray(s.lambdas[3:], dtype=float)
    if np.prod(lam) < 0.0:
        return None
    lm = _lm(s)
    target = budget_target - abs(lm)
    if target <= 0.0:
        return None
    rng = np.random.Generator(np.random.PCG64(seed))
    mu = mu_cubed(*lam)
    scale = mu if mu is not None else float(np.sum(np.abs(lam)))
    starts = []
    if mu is not None:
        starts.append(np.concatenate(([math.sqrt(0.5 * mu)], mu_angles(*lam))))
    for _ in range(restarts):
        starts.append(np.concatenate(([math.sqrt(rng.uniform(0.0, scale))], rng.uniform(0.0, 2 * math.pi, 3))))

    for x0 in starts:
        if _kernels.two_term_budget(x0, lam) >= _kernels.INFEASIBLE:
            continue
        x, f, _ = _kernels.nelder_mead(_kernels.two_term_budget, x0, lam, 0.3, 1e-14, maxiter)
        x, f, _ = _kernels.nelder_mead(_kernels.two_term_budget, x, lam, 0.05, 1e-14, maxiter)
        if f > target + BUDGET_TOL:
            continue
        v = x[0] * x[0]
        theta_hat = x[1:4]
        rest = lam - v * weight_vector(theta_hat)
        u = mu_cubed(*rest)
        theta = mu_angles(*rest)
        if u is None or theta is None:
            continue
        cert = _two_atom_certificate("two_term_search", s, lm, u, theta, v, theta_hat)
        if np.max(np.abs(cert.reconstructed_weights() - lam)) <= WEIGHT_TOL and cert.valid:
            return cert
    return None


def _local_term(r: float, theta: float, sign: float) -> np.ndarray:
    return r * (math.cos(theta) * _X + sign * math.sin(theta) * _Y)


def witness_matrix(cert: SeparabilityCertificate) -> np.ndarray:
    """The (untwirled) separable matrix that the certificate describes."""
    lam = cert.lambdas
    m = (abs(cert.lambda_minus) + 1.0 - cert.budget) * np.eye(8, dtype=complex)
    for w, l in zip(GHZ_WORDS[:3], lam[:3]):
        m = m + l * pauli_operator(w)
    if cert.method == "abs_sum":
        for w, l in zip(GHZ_WORDS[3:], lam[3:]):
            m = m + abs(l) * np.eye(8) + l * pauli_operator(w)
        return m / 8.0
    for weight, r, theta, sign, eta in (
        (cert.p, cert.r, cert.theta, 1.0, cert.eta),
        (1.0 - cert.p, cert.r_hat, cert.theta_hat, -1.0, cert.eta_hat),
    ):
        prod = kron(*(_local_term(r[i], theta[i], sign) for i in range(3)))
        m = m + weight * (abs(eta) * np.eye(8) + prod)
    return m / 8.0


def _check_witness(cert, s, m, min_eig):
    if not cert.valid:
        raise CertificateError(f"budget {cert.budget!r} exceeds 1")
    if min_eig < -PSD_TOL:
        raise CertificateError(f"witness matrix not PSD: minimal eigenvalue {min_eig:.3e}")
    expect = np.array([np.real(np.sum(m * pauli_operator(w).T)) for w in GHZ_WORDS])
    # odd-Y terms of the witness vanish under the twirl; the seven stabiliser weights must match
    err = float(np.max(np.abs(expect - s.lambdas)))
    if err > WEIGHT_TOL:
        raise CertificateError(f"Pauli weights differ from the state by {err:.3e}")
    if cert.method != "abs_sum":
        werr = float(np.max(np.abs(cert.reconstructed_weights() - s.lambdas[3:])))
        if werr > WEIGHT_TOL:
            raise CertificateError(f"decomposition weights off by {werr:.3e}")


def build_separable_witness_state(cert: SeparabilityCertificate, s: GhzDiagonalState) -> np.ndarray:
    """Materialise and check the separable state behind ``cert``.

    Raises:
        CertificateError: if the matrix is not PSD or its stabiliser
            expectations do not reproduce those of ``s``.
    """
    m = witness_matrix(cert)
    _check_witness(cert, s, m, float(jacobi_eigenvalues(m)[0]))
    return m


def validate_certificates(pairs) -> list[str | None]:
    """Batch version of :func:`build_separable_witness_state`.

    Takes ``(certificate, state)`` pairs and returns ``None`` for each one
    that re-validates, or the error message otherwise.
    """
    pairs = list(pairs)
    if not pairs:
        return []
    mats = np.stack([witness_matrix(c) for c, _ in pairs])
    lows = jacobi_eigenvalues(mats)[:, 0]
    out = []
    for (cert, s), m, lo in zip(pairs, mats, lows):
        try:
            _check_witness(cert, s, m, float(lo))
            out.append(None)
        except CertificateError as exc:
            out.append(str(exc))
    return out


def certify(s: GhzDiagonalState, *, two_term: bool = True, seed=0) -> SeparabilityCertificate | None:
    """Try ``abs_sum``, then ``mu_cubed``, then the two-term search."""
    cert = abs_sum_certificate(s) or mu_certificate(s)
    if cert is None and two_term:
        cert = two_term_certificate(s, seed=seed)
    return cert
