"""
Collocation tables for spectral deferred correction on the unit interval.

All tables live on [0, 1] and are scaled by the step size inside the sweep,
so one table serves every step of an adaptive run. Node 0 (the left end,
holding the initial condition) is not part of the tables; matrices are
indexed over the M collocation nodes only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal


def radau_right_nodes(M: int) -> np.ndarray:
    """Gauss-Radau nodes on (0, 1] including the right end point.

    The nodes are the eigenvalues of the Legendre Jacobi matrix whose last
    diagonal entry has been modified (Golub's construction) so that x = 1 is
    an eigenvalue. The returned array is ascending with ``nodes[-1] == 1.0``.
    """
    if not isinstance(M, (int, np.integer)) or M < 1:
        raise ValueError(f"need at least one node, got M={M!r}")
    M = int(M)
    if M == 1:
        return np.array([1.0])

    k = np.arange(1, M)
    beta = k**2 / (4.0 * k**2 - 1.0)  # squared off-diagonals of the Legendre recurrence
    diag = np.zeros(M)
    off = np.sqrt(beta)

    # modify the last diagonal entry so that x = 1 becomes an eigenvalue
    a = 1.0
    J = np.diag(diag[:-1]) + np.diag(off[:-1], 1) + np.diag(off[:-1], -1)
    rhs = np.zeros(M - 1)
    rhs[-1] = beta[-1]
    delta = np.linalg.solve(J - a * np.eye(M - 1), rhs)
    diag[-1] = a + delta[-1]

    x = eigh_tridiagonal(diag, off, eigvals_only=True)
    tau = np.sort((x + 1.0) / 2.0)
    tau[-1] = 1.0
    return tau


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _check_nodes(nodes) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 1 or nodes.size == 0:
        raise ValueError("nodes must be a non-empty 1-d array")
    if np.unique(nodes).size != nodes.size:
        raise ValueError("nodes must be distinct")
    return nodes


def lagrange_basis(nodes, x) -> np.ndarray:
    """Values ``L[i, j] = l_j(x_i)`` of the Lagrange basis on ``nodes``."""
    nodes = _check_nodes(nodes)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    w = _barycentric_weights(nodes)
    diff = x[:, None] - nodes[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        terms = w[None, :] / diff
        L = terms / terms.sum(axis=1, keepdims=True)
    # points coinciding with a node get the unit vector; so do points close
    # enough to one that the barycentric terms overflow
    near = ~np.isfinite(L).all(axis=1)
    if near.any():
        exact[near] = False
        exact[near, np.argmin(np.abs(x[near, None] - nodes[None, :]), axis=1)] = True
    hit = exact.any(axis=1)
    L[hit] = exact[hit].astype(float)
    return L


def quadrature_matrix(nodes) -> np.ndarray:
    """Integration matrix ``Q[m, j] = int_0^{tau_m} l_j(s) ds``.

    The integrands are polynomials of degree M - 1, so a Gauss-Legendre rule
    with M points on each sub-interval [0, tau_m] integrates them exactly.
    """
    nodes = _check_nodes(nodes)
    M = nodes.size
    gx, gw = np.polynomial.legendre.leggauss(max(M, 1))
    Q = np.empty((M, M))
    for m, tm in enumerate(nodes):
        x = 0.5 * tm * (gx + 1.0)
        Q[m] = 0.5 * tm * gw @ lagrange_basis(nodes, x)
    return Q


def lu_preconditioner(Q) -> np.ndarray:
    """Lower-triangular preconditioner from the LU trick.

    With ``Q.T = L U`` (Doolittle, unit-diagonal L, no pivoting) the
    preconditioner is ``U.T``.
    """
    A = np.array(Q, dtype=float).T
    n = A.shape[0]
    U = np.zeros_like(A)
    L = np.eye(n)
    for i in range(n):
        U[i, i:] = A[i, i:] - L[i, :i] @ U[:i, i:]
        if U[i, i] == 0.0 or not np.isfinite(U[i, i]):
            raise np.linalg.LinAlgError("quadrature matrix is singular, no LU factorization")
        L[i + 1 :, i] = (A[i + 1 :, i] - L[i + 1 :, :i] @ U[:i, i]) / U[i, i]
    return U.T.copy()


def euler_preconditioners(nodes) -> tuple[np.ndarray, np.ndarray]:
    """Implicit- and explicit-Euler preconditioners on the given nodes."""
    nodes = _check_nodes(nodes)
    M = nodes.size
    dtau = np.diff(np.concatenate(([0.0], nodes)))
    QI = np.tril(np.tile(dtau, (M, 1)))
    QE = np.zeros((M, M))
    for m in range(M):
        for j in range(m):
            QE[m, j] = nodes[j + 1] - nodes[j]
    return QI, QE


def interpolate(nodes, values, target):
    """Evaluate the interpolating polynomial through ``(nodes, values)``.

    ``values`` has the node index as its leading axis; trailing axes are
    carried along, so whole states can be interpolated at once.
    """
    values = np.asarray(values)
    nodes = _check_nodes(nodes)
    if values.shape[0] != nodes.size:
        raise ValueError("need one value per node")
    weights = lagrange_basis(nodes, target)[0]
    return np.tensordot(weights, values, axes=(0, 0))


@dataclass(frozen=True)
class CollocationTable:
    """Nodes, integration matrix and preconditioners for one SDC step.

    ``endpoint_weights`` is None when the last node is the right end point,
    in which case the step-end value is a copy of the last node.
    """

    M: int
    nodes: np.ndarray
    Q: np.ndarray
    Qd_impl: np.ndarray
    Qd_expl: np.ndarray
    endpoint_weights: np.ndarray | None = None
    # precomputed differences used by every sweep
    Q_minus_Qd_impl: np.ndarray = field(init=False, repr=False)
    Q_minus_Qd_expl: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("nodes", "Q", "Qd_impl", "Qd_expl"):
            getattr(self, name).setflags(write=False)
        object.__setattr__(self, "Q_minus_Qd_impl", self.Q - self.Qd_impl)
        object.__setattr__(self, "Q_minus_Qd_expl", self.Q - self.Qd_expl)

    @property
    def endpoint_rule(self) -> str | np.ndarray:
        return "copy-last-node" if self.endpoint_weights is None else self.endpoint_weights


def make_table(M: int = 3, qd_impl: str = "LU") -> CollocationTable:
    """Radau-right table with the requested implicit preconditioner.

    ``qd_impl`` is ``"LU"`` or ``"IE"`` (implicit Euler); the explicit part
    always uses the explicit-Euler preconditioner.
    """
    nodes = radau_right_nodes(M)
    Q = quadrature_matrix(nodes)
    QI, QE = euler_preconditioners(nodes)
    if qd_impl == "LU":
        Qd = lu_preconditioner(Q)
    elif qd_impl == "IE":
        Qd = QI
    else:
        raise ValueError(f"unknown implicit preconditioner {qd_impl!r}")
    return CollocationTable(M=M, nodes=nodes, Q=Q, Qd_impl=Qd, Qd_expl=QE)
