import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzsep import criterion as cr
from ghzsep import states
from ghzsep.linalg import pt_min_eigenvalues

from conftest import random_density_matrix

SQRT8 = 2 * math.sqrt(2)


def brute_c(x, n=96):
    # independent oracle: dense grid maximum of |F| (a lower bound within ~1e-3)
    g = np.linspace(0, 2 * np.pi, n, endpoint=False)
    e = np.exp(1j * g)
    v = np.real(
        x[0] * e[:, None, None] * e[None, :, None] * e[None, None, :]
        + x[1] * e[:, None, None]
        + x[2] * e[None, :, None]
        + x[3] * e[None, None, :]
    )
    return float(np.abs(v).max())


def test_functional_l():
    assert cr.functional_l(np.eye(8) / 8, [1, 2, 3, 4j]) == 0
    for a in (2.0, 3.0):
        assert cr.functional_l(states.kay_state(a), [1, 1, -1, 1]) == pytest.approx(1 / (1 + a))


def test_f_value():
    assert cr.f_value([1, 1, 1, 1], 0, 0, 0) == pytest.approx(4)
    assert cr.f_value([1j, 0, 0, 0], -np.pi / 2, 0, 0) == pytest.approx(1)


@pytest.mark.parametrize(
    "x,expected",
    [((1, 1, 1, 1), 4.0), ((1, 1, -1, -1), 4.0), ((1, 1, -1, 1), SQRT8), ((-1, -1, -1, 1), SQRT8)],
)
def test_closed_form_anchors(x, expected):
    res = cr.c_value_closed_form(x)
    assert res.c == pytest.approx(expected, abs=1e-12)
    assert abs(cr.f_value(x, *res.maximizer)) == pytest.approx(res.c, abs=1e-9)


def test_numeric_anchors(rng):
    assert cr.c_value_numeric([1, 1, -1, 1]).c == pytest.approx(SQRT8, abs=1e-8)
    for t in rng.uniform(0, 2 * np.pi, 5):
        assert cr.c_value_numeric([np.exp(1j * t), 0, 0, 0]).c == pytest.approx(1, abs=1e-10)


def test_closed_form_vs_numeric_and_oracle(rng):
    for x in rng.uniform(-1, 1, size=(200, 4)):
        closed = cr.c_value_closed_form(x)
        num = cr.c_value_numeric(x)
        assert closed.c == pytest.approx(num.c, abs=1e-6)
        assert closed.c >= brute_c(x) - 1e-12
        assert closed.c <= np.abs(x).sum() + 1e-12
        assert abs(cr.f_value(x, *closed.maximizer)) == pytest.approx(closed.c, abs=1e-9)
        assert abs(cr.f_value(x, *num.maximizer)) == pytest.approx(num.c, abs=1e-9)


def test_closed_form_zero_coefficient_delegates():
    res = cr.c_value_closed_form([1, -1, 1, 0])
    assert res.method == "grid_refined"
    assert res.c == pytest.approx(brute_c(np.array([1, -1, 1, 0])), abs=1e-3)


def test_complex_routes_agree(rng):
    for _ in range(100):
        x = rng.normal(size=4) + 1j * rng.normal(size=4)
        red = cr.c_value_reduced(x)
        num = cr.c_value_numeric(x)
        assert red.c == pytest.approx(num.c, abs=1e-9)
        assert red.c >= brute_c(x) - 1e-12
        assert abs(cr.f_value(x, *red.maximizer)) == pytest.approx(red.c, abs=1e-9)


def test_observation_bound():
    k, label = cr.observation_bound(states.kay_state(3.0))
    assert k == pytest.approx(3 / 32) and label == "pair-2"
    assert cr.observation_bound(np.eye(8) / 8) == (pytest.approx(1 / 8), "fourth-root-odd")
    m = np.zeros((8, 8))
    m[0, 0] = 1
    assert cr.observation_bound(m)[0] == 0


@pytest.mark.parametrize("alpha", [2.0, 2.2, 2.5, 2.7, 2.8])
def test_kay_violated(alpha):
    assert cr.optimize_x(states.kay_state(alpha))[1].violated


@pytest.mark.parametrize("alpha", [SQRT8, 2.9, 3.0, 3.5])
def test_kay_not_violated(alpha):
    assert not cr.optimize_x(states.kay_state(alpha))[1].violated


def test_maximally_mixed_not_violated():
    x, v = cr.optimize_x(np.eye(8) / 8)
    assert not v.violated and v.l_value == 0


def test_scale_invariance(rng):
    for _ in range(50):
        rho = random_density_matrix(rng)
        x = rng.normal(size=4) + 1j * rng.normal(size=4)
        base = cr.evaluate_observation(rho, x)
        for t in (0.1, 10.0):
            v = cr.evaluate_observation(rho, t * x)
            assert v.violated == base.violated
            assert v.ratio == pytest.approx(base.ratio, abs=1e-10)


def test_pure_product_saturation(rng):
    for _ in range(100):
        t = rng.uniform(0, np.pi / 2, 3)
        ph = rng.uniform(0, 2 * np.pi, (2, 3))
        params, rho = states.product_state(np.cos(t) * np.exp(1j * ph[0]), np.sin(t) * np.exp(1j * ph[1]))
        x = rng.normal(size=4) + 1j * rng.normal(size=4)
        lhs = cr.functional_l(rho, x)
        assert lhs == pytest.approx(params.kappa * cr.f_value(x, params.a, params.b, params.c_phase), abs=1e-12)


def test_old_criterion():
    g = states.ghz_diagonal_from_probs([1, 0, 0, 0, 0, 0, 0, 0]).matrix
    assert cr.old_criterion(g).violated
    for a in (2.0, 2.5, 3.0):
        assert not cr.old_criterion(states.kay_state(a)).violated


def test_old_criterion_equality_on_products(rng):
    for _ in range(1000):
        rho = states.random_product_state(rng)
        v = cr.old_criterion(rho)
        assert v.lhs == pytest.approx(v.rhs_sixth_root, abs=1e-10)


def test_w_criterion():
    v = cr.w_criterion(states.hyllus_state(math.sqrt(1.5)))
    assert v.violated and v.lhs == pytest.approx(0.3798, abs=1e-4) and v.rhs == 0.25
    assert not cr.w_criterion(np.eye(8) / 8).violated
    for eta in (0.5, 3.0):
        assert cr.w_criterion(states.hyllus_state(eta)).violated


def test_w_criterion_after_filter():
    # far from eta = sqrt(3/2) the raw inequality holds, the filtered one fails
    for eta in (0.01, 10.0, 100.0):
        m = states.hyllus_state(eta)
        assert not cr.w_criterion(m).violated
        x, v = cr.w_criterion_filtered(m, x_range=(0.1, 10.0))
        assert v.violated
        assert x**6 == pytest.approx(eta / math.sqrt(1.5), rel=1e-4)
        assert v.lhs == pytest.approx(1 / (1 + math.sqrt(8 / 3)), abs=1e-9)


def test_dominance_on_random_ghz(rng):
    probs = rng.dirichlet(np.ones(8), size=2000)
    for p in probs:
        rho = states.ghz_diagonal_from_probs(p).matrix
        if np.min(pt_min_eigenvalues(rho)) < -1e-10:
            assert cr.optimize_x(rho, early_exit=True)[1].violated


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_subnormal=False), min_size=4, max_size=4))
def test_closed_form_at_least_vertices(x):
    x = np.array(x)
    if np.all(x == 0):
        return
    res = cr.c_value_closed_form(x)
    best_vertex = max(
        abs(cr.f_value(x, a, b, c)) for a in (0, np.pi) for b in (0, np.pi) for c in (0, np.pi)
    )
    assert res.c >= best_vertex - 1e-12
