import math

import numpy as np
import pytest

from ghzsep import separability as sp
from ghzsep import states
from ghzsep.linalg import hermitian_eigenvalues, pauli_expectation, pauli_operator


def lam_state(l):
    return states.ghz_diagonal_from_lambdas(l)


def test_lambda_minus_examples():
    assert sp.lambda_minus(0, 0, 0) == 0
    assert sp.lambda_minus(1, 1, 1) == -1


def test_lambda_minus_oracle(rng):
    ops = [pauli_operator(w) for w in ("ZZI", "ZIZ", "IZZ")]
    for l in rng.uniform(-1, 1, size=(2000, 3)):
        op = sum(c * o for c, o in zip(l, ops))
        assert sp.lambda_minus(*l) == pytest.approx(hermitian_eigenvalues(op)[0], abs=1e-12)
        assert sp.lambda_minus(*l) <= 0


def test_abs_sum():
    assert sp.abs_sum_certificate(lam_state(np.zeros(7))).budget == 0
    assert sp.abs_sum_certificate(states.ghz_diagonal_from_probs([1, 0, 0, 0, 0, 0, 0, 0])) is None
    assert sp.abs_sum_certificate(lam_state([0, 0, 0, 0.6, 0, 0, 0])).budget == pytest.approx(0.6)


def test_mu_cubed_values():
    assert sp.mu_cubed(0.3, 0.3, 0.3, 0.3) == pytest.approx(2 * math.sqrt(2) * 0.3, abs=1e-14)
    assert sp.mu_cubed(1, 1, 1, 1) == pytest.approx(2 * math.sqrt(2))
    assert sp.mu_cubed(1, 1, -1, 1) is None
    assert sp.mu_cubed(0, 1, 1, 1) is None


def test_mu_cubed_symmetry(rng):
    import itertools

    for _ in range(50):
        l = np.abs(rng.uniform(0.05, 1, 4))
        base = sp.mu_cubed(*l)
        for perm in itertools.permutations(l):
            assert sp.mu_cubed(*perm) == pytest.approx(base, rel=1e-12)
        for flip in itertools.combinations(range(4), 2):
            f = l.copy()
            f[list(flip)] *= -1
            assert sp.mu_cubed(*f) == pytest.approx(base, rel=1e-12)
        t = rng.uniform(0.1, 1)
        tl = t * l
        direct = math.sqrt((tl[0] * tl[1] + tl[2] * tl[3]) * (tl[0] * tl[2] + tl[1] * tl[3]) * (tl[0] * tl[3] + tl[1] * tl[2])) / math.sqrt(np.prod(tl))
        assert sp.mu_cubed(*tl) == pytest.approx(direct, abs=1e-12)


def test_mu_angles_reproduce_weights(rng):
    for _ in range(200):
        l = rng.uniform(-1, 1, 4)
        l[3] = abs(l[3]) * np.sign(np.prod(l[:3]))
        th = sp.mu_angles(*l)
        assert np.allclose(sp.mu_cubed(*l) * sp.weight_vector(th), l, atol=1e-12)


def test_weight_vector_is_twirled_product(rng):
    # direct oracle: expectation values of the explicit product operator
    th = rng.uniform(0, 2 * np.pi, 3)
    x = np.array([[0, 1], [1, 0]])
    y = np.array([[0, -1j], [1j, 0]])
    op = np.kron(np.kron(*(np.cos(t) * x + np.sin(t) * y for t in th[:2])), np.cos(th[2]) * x + np.sin(th[2]) * y)
    terms = [np.trace(op @ pauli_operator(w)).real / 8 for w in ("XXX", "YYX", "YXY", "XYY")]
    assert np.allclose(terms, sp.weight_vector(th), atol=1e-14)


def test_mu_certificate_kay():
    s = states.ghz_diagonal_from_matrix(states.kay_state(3.0))
    cert = sp.mu_certificate(s)
    assert cert is not None and cert.valid
    m = sp.build_separable_witness_state(cert, s)
    assert np.allclose([pauli_expectation(m, w) for w in states.GHZ_WORDS], s.lambdas, atol=1e-9)
    assert sp.mu_certificate(states.ghz_diagonal_from_matrix(states.kay_state(2.5))) is None
    assert sp.mu_certificate(lam_state(np.zeros(7))) is None


def test_witness_examples():
    s = lam_state(np.zeros(7))
    assert np.allclose(sp.build_separable_witness_state(sp.abs_sum_certificate(s), s), np.eye(8) / 8)
    s = lam_state([0, 0, 0, 0.3, 0.3, 0.3, 0.3])
    cert = sp.mu_certificate(s)
    m = sp.build_separable_witness_state(cert, s)
    assert pauli_expectation(m, "XXX") == pytest.approx(0.3, abs=1e-12)
    assert hermitian_eigenvalues(m)[0] >= -1e-10


def test_two_term_contains_mu(rng):
    probs = rng.dirichlet(np.ones(8), size=3000)
    hits = 0
    for p in probs:
        s = states.ghz_diagonal_from_probs(p)
        if sp.mu_certificate(s) is not None:
            hits += 1
            cert = sp.two_term_certificate(s, restarts=0)
            assert cert is not None
            sp.build_separable_witness_state(cert, s)
            if hits > 30:
                break
    assert hits > 0


def test_two_term_beyond_mu():
    # PPT, not detected by the criterion, and beyond the abs-sum and single-angle budgets
    p = [0.126616, 0.096771, 0.001574, 0.103007, 0.114747, 0.196023, 0.182011, 0.179251]
    s = states.ghz_diagonal_from_probs(p)
    assert sp.abs_sum_certificate(s) is None
    assert sp.mu_certificate(s) is None
    cert = sp.two_term_certificate(s)
    assert cert is not None and cert.method == "two_term_search"
    assert 0 < cert.p < 1 and cert.budget <= 1
    sp.build_separable_witness_state(cert, s)


def test_two_term_fails_on_entangled():
    s = states.ghz_diagonal_from_matrix(states.kay_state(2.5))
    assert sp.two_term_certificate(s) is None


def test_tampered_certificate_rejected():
    import dataclasses

    s = states.ghz_diagonal_from_matrix(states.kay_state(3.0))
    cert = sp.mu_certificate(s)
    bad = dataclasses.replace(cert, theta=(0.1, 0.2, 0.3))
    with pytest.raises(sp.CertificateError):
        sp.build_separable_witness_state(bad, s)
    assert sp.validate_certificates([(cert, s), (bad, s)])[0] is None


def test_certificate_json():
    s = states.ghz_diagonal_from_matrix(states.kay_state(3.0))
    d = sp.certify(s).to_dict()
    assert list(d)[:3] == ["method", "lambda_minus", "budget"]
    assert d["method"] == "mu_cubed"
