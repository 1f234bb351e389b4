"""Compiled inner loops for the two numerical searches.

Both searches spend nearly all of their time evaluating a cheap scalar
objective thousands of times per state, so the objectives and the simplex
search itself are compiled with numba.

The C(X) routines use the reduction

    C(X) = max_s  sqrt(P + 2 p cos s) + sqrt(R + 2 q cos(s + Phi))

with ``p = |X2 X3|``, ``P = |X2|^2 + |X3|^2``, ``q = |X1 X4|``,
``R = |X1|^2 + |X4|^2`` and ``Phi = arg X1 - arg X2 - arg X3 - arg X4``,
obtained by maximising over ``c`` and then over ``a`` at fixed ``a + b``.
For real X the phase is 0 or pi and the maximiser is explicit.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_N_GRID = 24


@njit(cache=True)
def c_real(x0, x1, x2, x3):
    m1 = abs(x0)
    m2 = abs(x1)
    m3 = abs(x2)
    m4 = abs(x3)
    neg = (x0 < 0.0) + (x1 < 0.0) + (x2 < 0.0) + (x3 < 0.0)
    if neg % 2 == 0:
        return m1 + m2 + m3 + m4
    p = m2 * m3
    pp = m2 * m2 + m3 * m3
    q = m1 * m4
    rr = m1 * m1 + m4 * m4
    if p == 0.0 or q == 0.0:
        u = 1.0 if p >= q else -1.0
    else:
        # h(u) = sqrt(pp + 2pu) + sqrt(rr - 2qu) is concave on [-1, 1]
        u = (p * p * rr - q * q * pp) / (2.0 * p * q * (p + q))
    u = min(1.0, max(-1.0, u))
    return math.sqrt(max(pp + 2.0 * p * u, 0.0)) + math.sqrt(max(rr - 2.0 * q * u, 0.0))


@njit(cache=True)
def _h(s, p, pp, q, rr, phi):
    return math.sqrt(max(pp + 2.0 * p * math.cos(s), 0.0)) + math.sqrt(
        max(rr + 2.0 * q * math.cos(s + phi), 0.0)
    )


@njit(cache=True)
def _refine(s, p, pp, q, rr, phi):
    """Safeguarded Newton ascent on the reduced function from ``s``."""
    best = _h(s, p, pp, q, rr, phi)
    for _ in range(30):
        cs = math.cos(s)
        sn = math.sin(s)
        c2 = math.cos(s + phi)
        s2 = math.sin(s + phi)
        a2 = pp + 2.0 * p * cs
        b2 = rr + 2.0 * q * c2
        if a2 <= 1e-24 or b2 <= 1e-24:
            # on a cusp of one square root: step off it towards the larger side
            up = _h(s + 1e-6, p, pp, q, rr, phi)
            down = _h(s - 1e-6, p, pp, q, rr, phi)
            if max(up, down) < best:
                break
            s = s + 1e-6 if up >= down else s - 1e-6
            best = max(up, down)
            continue
        a = math.sqrt(a2)
        b = math.sqrt(b2)
        d1 = -p * sn / a - q * s2 / b
        d2 = -p * cs / a - p * p * sn * sn / (a2 * a) - q * c2 / b - q * q * s2 * s2 / (b2 * b)
        if d2 < 0.0:
            step = -d1 / d2
        else:
            step = 0.1 * d1
        step = max(-0.1, min(0.1, step))
        moved = False
        for _ in range(40):
            trial = s + step
            v = _h(trial, p, pp, q, rr, phi)
            if v >= best:
                best = v
                s = trial
                moved = True
                break
            step *= 0.5
        if not moved or abs(step) < 1e-15:
            break
    return best, s


@njit(cache=True)
def c_complex(xr, xi):
    """Return ``(C, s*)`` for complex X given as real and imaginary parts.

    The reduced function is sampled on a coarse grid and Newton ascent is
    started from every grid local maximum and from both of its neighbours,
    which also reaches twin peaks on either side of a cusp.
    """
    m1 = math.hypot(xr[0], xi[0])
    m2 = math.hypot(xr[1], xi[1])
    m3 = math.hypot(xr[2], xi[2])
    m4 = math.hypot(xr[3], xi[3])
    phi = (
        math.atan2(xi[0], xr[0])
        - math.atan2(xi[1], xr[1])
        - math.atan2(xi[2], xr[2])
        - math.atan2(xi[3], xr[3])
    )
    p = m2 * m3
    pp = m2 * m2 + m3 * m3
    q = m1 * m4
    rr = m1 * m1 + m4 * m4
    vals = np.empty(_N_GRID)
    for i in range(_N_GRID):
        vals[i] = _h(2.0 * math.pi * i / _N_GRID, p, pp, q, rr, phi)
    best = -1.0
    sbest = 0.0
    for i in range(_N_GRID):
        left = vals[(i - 1) % _N_GRID]
        right = vals[(i + 1) % _N_GRID]
        if vals[i] >= left and vals[i] >= right:
            for j in (i - 1, i, i + 1):
                v, s = _refine(2.0 * math.pi * j / _N_GRID, p, pp, q, rr, phi)
                if v > best:
                    best = v
                    sbest = s
    return best, sbest


@njit(cache=True)
def neg_ratio_real(x, r):
    """``-|X.r| / C(X)`` for real X and real anti-diagonal ``r``."""
    s = max(abs(x[0]), abs(x[1]), abs(x[2]), abs(x[3]))
    if s == 0.0:
        return 0.0
    c = c_real(x[0] / s, x[1] / s, x[2] / s, x[3] / s)
    if c <= 0.0:
        return 0.0
    lval = (x[0] * r[0] + x[1] * r[1] + x[2] * r[2] + x[3] * r[3]) / s
    return -abs(lval) / c


@njit(cache=True)
def neg_ratio_complex(x, r):
    """Same as :func:`neg_ratio_real` with ``x = (Re X, Im X)``, ``r = (Re, Im)``."""
    s = 0.0
    for j in range(4):
        s = max(s, math.hypot(x[j], x[4 + j]))
    if s == 0.0:
        return 0.0
    xr = x[:4] / s
    xi = x[4:] / s
    c, _ = c_complex(xr, xi)
    if c <= 0.0:
        return 0.0
    lval = 0.0
    for j in range(4):
        lval += xr[j] * r[j] - xi[j] * r[4 + j]
    return -abs(lval) / c


@njit(cache=True)
def mu_cubed(l5, l6, l7, l8):
    """Single-atom budget for the XXX/YYX/YXY/XYY part; -1 when inapplicable."""
    prod = l5 * l6 * l7 * l8
    if not prod > 0.0:
        return -1.0
    rad = (l5 * l6 + l7 * l8) * (l5 * l7 + l6 * l8) * (l5 * l8 + l6 * l7)
    if rad < 0.0:
        return -1.0
    return math.sqrt(rad) / math.sqrt(prod)


INFEASIBLE = 1.0e3


@njit(cache=True)
def two_term_budget(x, lam):
    """Budget ``v + mu^3(lam - v w(theta))`` of a two-atom decomposition.

    ``x = (sqrt(v), theta1, theta2, theta3)``; ``w(theta)`` is the weight vector
    of one product term on (XXX, YYX, YXY, XYY).
    """
    v = x[0] * x[0]
    c1 = math.cos(x[1])
    s1 = math.sin(x[1])
    c2 = math.cos(x[2])
    s2 = math.sin(x[2])
    c3 = math.cos(x[3])
    s3 = math.sin(x[3])
    r5 = lam[0] - v * c1 * c2 * c3
    r6 = lam[1] - v * s1 * s2 * c3
    r7 = lam[2] - v * s1 * c2 * s3
    r8 = lam[3] - v * c1 * s2 * s3
    m = mu_cubed(r5, r6, r7, r8)
    if m < 0.0:
        return INFEASIBLE
    return v + m


@njit(cache=True)
def nelder_mead(f, x0, data, step, ftol, maxiter):
    """Plain Nelder-Mead minimisation of ``f(x, data)``.

    Stops when the spread of objective values over the simplex drops below
    ``ftol`` or after ``maxiter`` iterations. Returns ``(x, f(x), iterations)``.
    """
    n = x0.size
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += step
    for i in range(n + 1):
        fs[i] = f(sim[i], data)
    it = 0
    while it < maxiter:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        if fs[n] - fs[0] <= ftol:
            break
        cen = sim[:n].sum(axis=0) / n
        xr = cen + (cen - sim[n])
        fr = f(xr, data)
        if fr < fs[0]:
            xe = cen + 2.0 * (cen - sim[n])
            fe = f(xe, data)
            if fe < fr:
                sim[n] = xe
                fs[n] = fe
            else:
                sim[n] = xr
                fs[n] = fr
        elif fr < fs[n - 1]:
            sim[n] = xr
            fs[n] = fr
        else:
            if fr < fs[n]:
                xc = cen + 0.5 * (xr - cen)
            else:
                xc = cen + 0.5 * (sim[n] - cen)
            fc = f(xc, data)
            if fc < min(fr, fs[n]):
                sim[n] = xc
                fs[n] = fc
            else:
                for i in range(1, n + 1):
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fs[i] = f(sim[i], data)
        it += 1
    j = np.argmin(fs)
    return sim[j].copy(), fs[j], it
