import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import roots_jacobi

from sdc_res.collocation import (euler_preconditioners, interpolate, lu_preconditioner, make_table,
                                 quadrature_matrix, radau_right_nodes)

SQ6 = np.sqrt(6.0)
# three-stage Radau IIA coefficients in closed form
RADAU_IIA = np.array([
    [(88 - 7 * SQ6) / 360, (296 - 169 * SQ6) / 1800, (-2 + 3 * SQ6) / 225],
    [(296 + 169 * SQ6) / 1800, (88 + 7 * SQ6) / 360, (-2 - 3 * SQ6) / 225],
    [(16 - SQ6) / 36, (16 + SQ6) / 36, 1 / 9],
])


def mp_quadrature(nodes, dps=40):
    """Q from exact integration of the Lagrange polynomials in high precision."""
    mpmath.mp.dps = dps
    tau = [mpmath.mpf(float(t)) for t in nodes]
    M = len(tau)
    Q = np.empty((M, M))
    for j in range(M):
        def lj(s, j=j):
            out = mpmath.mpf(1)
            for i in range(M):
                if i != j:
                    out *= (s - tau[i]) / (tau[j] - tau[i])
            return out
        for m in range(M):
            Q[m, j] = float(mpmath.quad(lj, [0, tau[m]]))
    return Q


def test_single_node_is_implicit_euler_node():
    assert radau_right_nodes(1).tolist() == [1.0]


def test_three_nodes_match_radau_abscissae():
    tau = radau_right_nodes(3)
    np.testing.assert_allclose(tau, [(4 - SQ6) / 10, (4 + SQ6) / 10, 1.0], rtol=0, atol=1e-15)
    assert tau[-1] == 1.0


@pytest.mark.parametrize("M", [0, -2])
def test_invalid_node_count(M):
    with pytest.raises(ValueError):
        radau_right_nodes(M)


@given(st.integers(2, 12))
def test_nodes_are_radau_roots(M):
    tau = radau_right_nodes(M)
    assert tau[-1] == 1.0
    assert np.all(np.diff(tau) > 0) and tau[0] > 0
    # interior Radau-right points are the Gauss-Jacobi(1, 0) roots on [-1, 1]
    x, _ = roots_jacobi(M - 1, 1.0, 0.0)
    np.testing.assert_allclose(tau[:-1], np.sort((x + 1) / 2), atol=1e-13)


def test_quadrature_single_node():
    assert quadrature_matrix([1.0]).tolist() == [[1.0]]


def test_quadrature_reproduces_radau_iia():
    np.testing.assert_allclose(quadrature_matrix(radau_right_nodes(3)), RADAU_IIA, atol=1e-15)


@pytest.mark.parametrize("M", [2, 3, 5, 7])
def test_quadrature_against_high_precision_oracle(M):
    tau = radau_right_nodes(M)
    np.testing.assert_allclose(quadrature_matrix(tau), mp_quadrature(tau), rtol=1e-12, atol=1e-14)


@given(st.integers(1, 9))
def test_quadrature_row_sums_are_nodes(M):
    tau = radau_right_nodes(M)
    Q = quadrature_matrix(tau)
    np.testing.assert_allclose(Q.sum(axis=1), tau, atol=1e-14)
    assert abs(Q[-1].sum() - 1.0) < 1e-14


@given(st.integers(1, 8), st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_quadrature_is_exact_for_polynomials(M, coeffs):
    tau = radau_right_nodes(M)
    c = np.array(coeffs[:M])
    p = np.polynomial.Polynomial(c)
    exact = p.integ()(tau) - p.integ()(0.0)
    approx = quadrature_matrix(tau) @ p(tau)
    scale = max(1.0, np.abs(c).sum())
    np.testing.assert_allclose(approx, exact, atol=1e-12 * scale)


def test_quadrature_rejects_duplicates():
    with pytest.raises(ValueError):
        quadrature_matrix([0.5, 0.5, 1.0])


def test_lu_single_node():
    assert lu_preconditioner([[1.0]]).tolist() == [[1.0]]


@pytest.mark.parametrize("M", [2, 3, 4, 5])
def test_lu_factor_shape_and_stiff_limit(M):
    Q = quadrature_matrix(radau_right_nodes(M))
    Qd = lu_preconditioner(Q)
    assert np.all(np.triu(Qd, 1) == 0.0)
    # Q^T = L U with unit lower L, so Q = Qd L^T
    Lt = np.linalg.solve(Qd, Q)
    np.testing.assert_allclose(np.diag(Lt), 1.0, atol=1e-13)
    np.testing.assert_allclose(np.tril(Lt, -1), 0.0, atol=1e-13)
    # stiff-limit iteration matrix I - Qd^{-1} Q is nilpotent: converges in M sweeps
    K = np.eye(M) - Lt
    np.testing.assert_allclose(np.linalg.matrix_power(K, M), 0.0, atol=1e-12)


def test_lu_diagonal_positive_for_three_nodes():
    Qd = lu_preconditioner(quadrature_matrix(radau_right_nodes(3)))
    assert np.all(np.diag(Qd) > 0)


def test_lu_singular_matrix():
    with pytest.raises(np.linalg.LinAlgError):
        lu_preconditioner(np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_euler_single_node():
    QI, QE = euler_preconditioners([1.0])
    assert QI.tolist() == [[1.0]] and QE.tolist() == [[0.0]]


@given(st.integers(1, 9))
def test_euler_structure(M):
    tau = radau_right_nodes(M)
    QI, QE = euler_preconditioners(tau)
    np.testing.assert_allclose(QI.sum(axis=1), tau, atol=1e-15)
    assert np.all(np.triu(QI, 1) == 0) and np.all(np.triu(QE) == 0)


def test_euler_second_row():
    tau = radau_right_nodes(3)
    QI, QE = euler_preconditioners(tau)
    np.testing.assert_allclose(QI[1], [tau[0], tau[1] - tau[0], 0.0], atol=0)
    np.testing.assert_allclose(QE[1], [tau[1] - tau[0], 0.0, 0.0], atol=0)


@given(st.floats(-10, 10), st.floats(0, 1))
def test_interpolate_constant(c, target):
    nodes = np.array([0.0, 0.3, 0.7, 1.0])
    assert interpolate(nodes, np.full(4, c), target) == pytest.approx(c, abs=1e-12 * max(1, abs(c)))


@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.floats(0, 1))
def test_interpolate_reproduces_polynomials(coeffs, target):
    nodes = np.array([0.0, 0.2, 0.65, 1.0])
    p = np.polynomial.Polynomial(coeffs)
    assert interpolate(nodes, p(nodes), target) == pytest.approx(p(target), abs=1e-12)


def test_interpolate_excluded_node_matches_vandermonde():
    tau = np.concatenate(([0.0], radau_right_nodes(3)))
    keep = [0, 1, 3]
    vals = np.sin(tau[keep])
    coef = np.linalg.solve(np.vander(tau[keep], 3), vals)
    assert interpolate(tau[keep], vals, tau[2]) == pytest.approx(np.polyval(coef, tau[2]), abs=1e-13)


def test_interpolate_states_and_duplicates():
    nodes = np.array([0.0, 0.5, 1.0])
    vals = np.stack([np.full((2, 3), v) for v in (1.0, 2.0, 3.0)])
    np.testing.assert_allclose(interpolate(nodes, vals, 0.25), np.full((2, 3), 1.5))
    with pytest.raises(ValueError):
        interpolate([0.0, 0.0, 1.0], [1.0, 2.0, 3.0], 0.5)


def test_table_defaults(table3):
    assert table3.M == 3 and table3.endpoint_rule == "copy-last-node"
    np.testing.assert_allclose(table3.Q_minus_Qd_impl, table3.Q - table3.Qd_impl)
    with pytest.raises(ValueError):
        table3.Q[0, 0] = 1.0
    ie = make_table(3, "IE")
    np.testing.assert_allclose(ie.Qd_impl.sum(axis=1), ie.nodes)
    with pytest.raises(ValueError):
        make_table(3, "MIN")
