"""Entanglement tests built from the anti-diagonal of the density matrix.

A pure product state has anti-diagonal entries of common modulus ``kappa``
whose four phases depend on only three angles ``a, b, c``. For a coefficient
vector ``X`` the linear functional

    L(rho, X) = Re(X1 rho[1,8] + X2 rho[2,7] + X3 rho[3,6] + X4 rho[5,4])

therefore obeys ``|L| <= C(X) * kappa`` on product states, where ``C(X)`` is
the maximum of ``|F(X; a, b, c)|`` over the angles. Convexity of the left side
and concavity of the diagonal bounds extend this to all fully separable
states; a violation proves entanglement.

Matrix indices in docstrings are 1-based as above; the code is 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

VIOLATION_TOL = 1e-12
KAPPA_LABELS = ("fourth-root-odd", "fourth-root-even", "pair-1", "pair-2", "pair-3", "pair-4")

# (row, col) of rho_18, rho_27, rho_36, rho_54 in 0-based indexing
ANTI_DIAGONAL_INDEX = ((0, 7), (1, 6), (2, 5), (4, 3))
_REAL_TOL = 1e-14


def anti_diagonal(rho) -> np.ndarray:
    """The four entries ``(rho_18, rho_27, rho_36, rho_54)``."""
    rho = np.asarray(rho)
    return np.array([rho[i, j] for i, j in ANTI_DIAGONAL_INDEX], dtype=complex)


def _as_x(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex).reshape(-1)
    if x.shape != (4,):
        raise ValueError(f"X needs exactly four coefficients, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("X has non-finite entries")
    return x


def _normalise(x: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(x))
    if scale == 0.0:
        raise ValueError("X must not be all zero")
    return x / scale


def functional_l(rho, x) -> float:
    return float(np.real(np.dot(_as_x(x), anti_diagonal(rho))))


def f_value(x, a: float, b: float, c: float) -> float:
    """``Re(X1 e^{i(a+b+c)} + X2 e^{ia} + X3 e^{ib} + X4 e^{ic})``."""
    x = _as_x(x)
    phases = (a + b + c, a, b, c)
    return float(
        sum(x[j].real * math.cos(t) - x[j].imag * math.sin(t) for j, t in enumerate(phases))
    )


@dataclass(frozen=True)
class CValueResult:
    """Maximum of ``|F(X; a, b, c)|`` together with where it was attained.

    ``method`` is one of ``closed_form`` (sign argument or stationary radical
    point), ``sign_enumeration`` (best vertex of ``{0, pi}^3``),
    ``grid_refined`` (dense grid plus Newton) or ``reduced`` (one-dimensional
    reduction). ``q`` and ``r`` are the radical intermediates when the
    closed form for one negative coefficient was evaluated.
    """

    c: float
    maximizer: tuple[float, float, float]
    method: str
    q: float | None = None
    r: float | None = None


_VERTICES = tuple(itertools.product((0.0, math.pi), repeat=3))


def _best_vertex(x) -> tuple[float, tuple[float, float, float]]:
    best, arg = -1.0, _VERTICES[0]
    for v in _VERTICES:
        val = abs(f_value(x, *v))
        if val > best:
            best, arg = val, v
    return best, arg


def _radical_candidates(d, al, be, ga):
    """Stationary points from the radical formulas, for real (d, al, be, ga)."""
    q = -(
        (al * be * d + al * be * ga - al * d * ga - be * d * ga)
        * (al * be * d - al * be * ga + al * d * ga - be * d * ga)
        * (al * be * d - al * be * ga - al * d * ga + be * d * ga)
        * (al * be * d + al * be * ga + al * d * ga + be * d * ga)
    )
    r = al * be * ga * d * (al * be - d * ga) * (al * ga - be * d) * (al * d - be * ga)
    points = []
    if r == 0.0 or q / r < 0.0:
        return q, r, points
    k = math.sqrt(q / r) / 2.0
    sines = (k / al, k / be, k / ga)
    if max(abs(s) for s in sines) > 1.0 + 1e-12:
        return q, r, points
    sines = tuple(max(-1.0, min(1.0, s)) for s in sines)
    cos_abs = tuple(math.sqrt(1.0 - s * s) for s in sines)
    scale = max(abs(d), abs(al), abs(be), abs(ga))
    for signs in itertools.product((1.0, -1.0), repeat=3):
        a, b, c = (math.atan2(sines[i], signs[i] * cos_abs[i]) for i in range(3))
        # zero derivative in a; b and c follow from the common value of the sines
        if abs(d * math.sin(a + b + c) + al * math.sin(a)) <= 1e-9 * scale:
            points.append((a, b, c))
    return q, r, points


def c_value_closed_form(x) -> CValueResult:
    """C(X) for real coefficients ``X = (delta, alpha, beta, gamma)``.

    With an even number of negative entries ``C = sum |X_j|``. With an odd
    number the signs are moved onto ``gamma`` and the stationary point given by
    the radicals ``Q`` and ``R`` is compared with the vertices of ``{0, pi}^3``.
    A zero coefficient in the odd case makes the radicals degenerate and the
    computation is delegated to :func:`c_value_numeric`.
    """
    x = _as_x(x)
    if np.any(x.imag != 0.0):
        raise ValueError("closed form requires real coefficients")
    xr = x.real
    scale = float(np.max(np.abs(xr)))
    if scale == 0.0:
        return CValueResult(0.0, (0.0, 0.0, 0.0), "closed_form")
    y = xr / scale
    n_neg = int(np.sum(y < 0.0))
    if n_neg % 2 == 0:
        best, arg = _best_vertex(y)
        return CValueResult(float(np.sum(np.abs(xr))), arg, "closed_form")
    if np.any(y == 0.0):
        return c_value_numeric(xr)
    m = np.abs(y)
    q, r, points = _radical_candidates(m[0], m[1], m[2], -m[3])
    canon = (m[0], m[1], m[2], -m[3])
    best, arg = _best_vertex(y)
    method = "sign_enumeration"
    for pt in points:
        val = abs(f_value(canon, *pt))
        if val > best:
            # shifting angles by pi flips pairs of signs; pick the shift for y
            for shift in _VERTICES:
                cand = tuple(pt[i] + shift[i] for i in range(3))
                if abs(abs(f_value(y, *cand)) - val) <= 1e-12:
                    best, arg, method = val, cand, "closed_form"
                    break
    return CValueResult(best * scale, tuple(float(t) for t in arg), method, q=q, r=r)


def _f_grad_hess(x, t):
    phases = np.array([t[0] + t[1] + t[2], t[0], t[1], t[2]])
    z = x * np.exp(1j * phases)
    g4 = -z.imag
    h4 = -z.real
    jac = np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    return z.real.sum(), jac.T @ g4, jac.T @ (h4[:, None] * jac)


def _newton_ascent(x, t):
    scale = max(1.0, float(np.max(np.abs(x))))
    fval, grad, hess = _f_grad_hess(x, t)
    for _ in range(200):
        evals, evecs = np.linalg.eigh(hess)
        top = evals[-1]
        if np.max(np.abs(grad)) < 1e-12 * scale:
            if top <= 1e-9 * scale:
                break
            # stationary but not a maximum: leave along the ascent direction
            direction = evecs[:, -1]
            for step in (0.1 * direction, -0.1 * direction):
                if _f_grad_hess(x, t + step)[0] > fval:
                    break
        else:
            # shift the Hessian until it is negative definite (damped Newton ascent)
            shift = 0.0 if top < -1e-6 * scale else top + 1e-3 * scale
            step = -np.linalg.solve(hess - shift * np.eye(3), grad)
            nrm = np.max(np.abs(step))
            if nrm > 0.5:
                step *= 0.5 / nrm
        for _ in range(50):
            cand = t + step
            cval, cgrad, chess = _f_grad_hess(x, cand)
            if cval >= fval:
                t, fval, grad, hess = cand, cval, cgrad, chess
                break
            step = 0.5 * step
        else:
            break
    return fval, t


def c_value_numeric(x, resolution: int = 64) -> CValueResult:
    """C(X) by a ``resolution^3`` grid over the angles followed by Newton refinement."""
    x = _as_x(x)
    if np.all(x == 0):
        return CValueResult(0.0, (0.0, 0.0, 0.0), "grid_refined")
    g = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    ea = np.exp(1j * g)
    # F = Re(X1 e^{i(a+b+c)} + X2 e^{ia} + X3 e^{ib} + X4 e^{ic}) on the full grid
    e_abc = ea[:, None, None] * ea[None, :, None] * ea[None, None, :]
    vals = np.real(
        x[0] * e_abc
        + x[1] * ea[:, None, None]
        + x[2] * ea[None, :, None]
        + x[3] * ea[None, None, :]
    )
    # |F| is maximised by maximising F for X or for -X, whichever grid value is larger
    sign = 1.0 if vals.max() >= -vals.min() else -1.0
    idx = np.unravel_index(np.argmax(sign * vals), vals.shape)
    t = np.array([g[idx[0]], g[idx[1]], g[idx[2]]])
    fval, t = _newton_ascent(sign * x, t)
    return CValueResult(float(fval), tuple(float(v) for v in t), "grid_refined")


def c_value_reduced(x) -> CValueResult:
    """C(X) through the exact one-dimensional reduction used by the optimiser."""
    x = _as_x(x)
    if np.all(x == 0):
        return CValueResult(0.0, (0.0, 0.0, 0.0), "reduced")
    if np.all(x.imag == 0.0):
        c = _kernels.c_real(*(float(v) for v in x.real))
    c2, s_shift = _kernels.c_complex(np.ascontiguousarray(x.real), np.ascontiguousarray(x.imag))
    c = c2 if np.any(x.imag != 0.0) else max(c, c2)
    # recover the angles: s = a + b, maximise over a, then over c
    s = s_shift - np.angle(x[1]) - np.angle(x[2])
    a = -np.angle(x[1] + np.conj(x[2]) * np.exp(-1j * s))
    b = s - a
    cc = -np.angle(x[0] * np.exp(1j * s) + x[3])
    arg = (float(a), float(b), float(cc))
    if abs(f_value(x, *arg)) < c - 1e-9 * max(1.0, c):
        # the explicit real maximiser does not go through s; take the best vertex instead
        val, varg = _best_vertex(x)
        if abs(val - c) <= 1e-9 * max(1.0, c):
            arg = varg
    return CValueResult(float(c), arg, "reduced")


def c_value(x) -> float:
    """C(X) as used in verdicts: closed form for real X, the reduction otherwise.

    For real X the closed form and the reduction are both evaluated and the
    larger value is used, which can only make the bound more conservative.
    """
    x = _as_x(x)
    if np.all(x.imag == 0.0):
        return max(c_value_closed_form(x).c, c_value_reduced(x).c)
    return c_value_reduced(x).c


def kappa_terms(rho) -> np.ndarray:
    """The six diagonal expressions that equal ``kappa`` on product states."""
    d = np.clip(np.real(np.diag(np.asarray(rho))), 0.0, None)
    return np.array(
        [
            (d[0] * d[3] * d[5] * d[6]) ** 0.25,
            (d[1] * d[2] * d[4] * d[7]) ** 0.25,
            math.sqrt(d[0] * d[7]),
            math.sqrt(d[1] * d[6]),
            math.sqrt(d[2] * d[5]),
            math.sqrt(d[3] * d[4]),
        ]
    )


def observation_bound(rho) -> tuple[float, str]:
    """Minimum of the kappa expressions and its label (first label on ties)."""
    terms = kappa_terms(rho)
    i = int(np.argmin(terms))
    return float(terms[i]), KAPPA_LABELS[i]


@dataclass(frozen=True)
class CriterionVerdict:
    """Outcome of ``|L(rho, X)| <= C(X) * kappa_min`` for one coefficient vector."""

    l_value: float
    bound: float
    violated: bool
    x_used: np.ndarray
    kappa_term_used: str
    c_value: float
    kappa: float

    @property
    def ratio(self) -> float:
        return self.l_value / self.c_value if self.c_value > 0 else 0.0


def evaluate_observation(rho, x) -> CriterionVerdict:
    """Evaluate the inequality for a given X (rescaled to max-modulus 1)."""
    x = _normalise(_as_x(x))
    lval = abs(functional_l(rho, x))
    c = c_value(x)
    kappa, label = observation_bound(rho)
    bound = c * kappa
    return CriterionVerdict(
        l_value=lval,
        bound=bound,
        violated=bool(lval > bound + VIOLATION_TOL),
        x_used=x,
        kappa_term_used=label,
        c_value=c,
        kappa=kappa,
    )


def _starts(r: np.ndarray, real: bool) -> list[np.ndarray]:
    out = []
    if np.any(r != 0):
        out.append(_normalise(np.conj(r)))
    if real:
        out.extend(np.array(s + (1.0,), dtype=complex) for s in itertools.product((1.0, -1.0), repeat=3))
    else:
        ph = np.exp(-1j * np.angle(r))
        out.extend(np.array(s + (1.0,)) * ph for s in itertools.product((1.0, -1.0), repeat=3))
    out.extend(np.eye(4, dtype=complex))
    return out


def _complex_subset(starts, data) -> list[np.ndarray]:
    # complex searches are costly: keep the Cauchy-Schwarz start, the best
    # phase-aligned sign pattern and the unit vectors
    patterns = starts[1:9]
    scores = [_kernels.neg_ratio_complex(np.concatenate((z.real, z.imag)), data) for z in patterns]
    return [starts[0], patterns[int(np.argmin(scores))]] + starts[9:]


def optimize_x(rho, *, early_exit: bool = False, maxiter: int = 500):
    """Search for the X maximising ``|L(rho, X)| / C(X)``.

    Starts from the conjugated anti-diagonal, the eight sign patterns
    ``(+-1, +-1, +-1, 1)`` and the four unit vectors, and refines each with a
    simplex search of at most ``maxiter`` iterations followed by a short
    polish with a smaller simplex. Real anti-diagonals are searched over real
    X. Complex ones are searched over C^4, with the sign patterns
    phase-aligned to the anti-diagonal and only the best of them refined.

    With ``early_exit`` the search returns as soon as one starting vector
    already violates the inequality; the result then certifies entanglement
    but is not the maximum-ratio vector.

    Returns:
        ``(x, verdict)`` for the best vector found.
    """
    rho = np.asarray(rho, dtype=complex)
    r = anti_diagonal(rho)
    if np.all(r == 0):
        x = np.ones(4, dtype=complex)
        return x, evaluate_observation(rho, x)
    real = bool(np.max(np.abs(r.imag)) <= _REAL_TOL)
    starts = _starts(r, real)

    if early_exit:
        for x0 in starts:
            verdict = evaluate_observation(rho, x0)
            if verdict.violated:
                return verdict.x_used, verdict

    if real:
        data = np.ascontiguousarray(r.real)
        objective = _kernels.neg_ratio_real
        pack = lambda z: np.ascontiguousarray(z.real)
        unpack = lambda v: v.astype(complex)
    else:
        data = np.concatenate((r.real, r.imag))
        objective = _kernels.neg_ratio_complex
        pack = lambda z: np.concatenate((z.real, z.imag))
        unpack = lambda v: v[:4] + 1j * v[4:]
        starts = _complex_subset(starts, data)

    ftol = 1e-10 * VIOLATION_TOL ** 0.25 * float(np.max(np.abs(r)))
    best_x, best_f = None, np.inf
    for x0 in starts:
        v, fv, _ = _kernels.nelder_mead(objective, pack(x0), data, 0.1, ftol, maxiter)
        # one restart with a small simplex polishes a collapsed search
        v, fv, _ = _kernels.nelder_mead(objective, v, data, 0.01, ftol, max(maxiter // 5, 1))
        if fv < best_f:
            best_x, best_f = v, fv
    x = _normalise(unpack(best_x))
    return x, evaluate_observation(rho, x)


@dataclass(frozen=True)
class OldCriterionVerdict:
    lhs: float
    rhs_sixth_root: float
    rhs_fourth_root: float
    violated: bool


def old_criterion(rho) -> OldCriterionVerdict:
    """Single-element test: ``|rho_18|`` against two geometric means of the diagonal."""
    rho = np.asarray(rho)
    d = np.clip(np.real(np.diag(rho)), 0.0, None)
    lhs = float(abs(rho[0, 7]))
    sixth = float(np.prod(d[1:7]) ** (1.0 / 6.0))
    fourth = float((d[1] * d[2] * d[4] * d[7]) ** 0.25)
    violated = lhs > sixth + VIOLATION_TOL or lhs > fourth + VIOLATION_TOL
    return OldCriterionVerdict(lhs, sixth, fourth, bool(violated))


@dataclass(frozen=True)
class WCriterionVerdict:
    lhs: float
    rhs: float
    violated: bool


def w_criterion(rho) -> WCriterionVerdict:
    """``|rho_23| + |rho_35| + |rho_52| <= rho_88^(1/6) + 1/4`` on separable states."""
    rho = np.asarray(rho)
    lhs = float(abs(rho[1, 2]) + abs(rho[2, 4]) + abs(rho[4, 1]))
    rhs = float(max(rho[7, 7].real, 0.0) ** (1.0 / 6.0) + 0.25)
    return WCriterionVerdict(lhs, rhs, bool(lhs > rhs + VIOLATION_TOL))


def w_criterion_filtered(rho, x_range=(0.1, 10.0), n_grid: int = 401) -> tuple[float, WCriterionVerdict]:
    """W-vicinity test after the best local filter ``diag(1/x, x^2)`` on every qubit.

    An invertible local filter cannot create entanglement, so a violation by
    the filtered state proves the original entangled. Returns the filter
    parameter with the largest ``lhs - rhs`` on a log grid, polished by a
    golden-section search, and the verdict there.
    """
    from .states import apply_filter

    def margin(logx):
        v = w_criterion(apply_filter(rho, math.exp(logx)))
        return v.lhs - v.rhs

    grid = np.linspace(math.log(x_range[0]), math.log(x_range[1]), n_grid)
    vals = [margin(g) for g in grid]
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(60):
        m1 = hi - inv_phi * (hi - lo)
        m2 = lo + inv_phi * (hi - lo)
        if margin(m1) >= margin(m2):
            hi = m2
        else:
            lo = m1
    best = 0.5 * (lo + hi)
    if margin(best) < vals[i]:
        best = grid[i]
    x = math.exp(best)
    return x, w_criterion(apply_filter(rho, x))
