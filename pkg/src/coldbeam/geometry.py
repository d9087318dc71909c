"""Flat space-time metric machinery and the positive-definite companion metric.

Conventions: signature (+, -, ..., -), c = 1, lab chart is global.  The
companion Riemannian metric built from a unit time-like observer U is

    bar(X, Y) = -eta(X, Y) + 2 eta(X, U) eta(Y, U)

which reduces to the Euclidean metric in the frame where U = (1, 0, ..., 0).
All norms and fiber distances in the package go through it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "minkowski_metric",
    "minkowski_inner",
    "eta_bar_matrix",
    "eta_bar_inner",
    "eta_bar_norm",
    "hyperboloid_lift",
    "hyperboloid_project",
    "fiber_volume_weight",
    "boost_along",
    "boost_to",
    "comoving_frame",
    "NormalCoordinateMap",
    "normal_coordinates",
    "transform_connection",
]

UNIT_TOL = 1e-9


def minkowski_metric(n: int = 4) -> np.ndarray:
    """Metric matrix diag(+1, -1, ..., -1) in dimension n."""
    if n < 2:
        raise ValueError(f"space-time dimension must be >= 2, got {n}")
    eta = -np.eye(n)
    eta[0, 0] = 1.0
    return eta


def minkowski_inner(a, b) -> float | np.ndarray:
    """Inner product a^0 b^0 - sum_k a^k b^k; broadcasts over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    prod = a * b
    return prod[..., 0] - prod[..., 1:].sum(axis=-1)


def _check_unit_timelike(U: np.ndarray, tol: float = UNIT_TOL) -> None:
    nrm = minkowski_inner(U, U)
    if abs(nrm - 1.0) > tol or U[0] <= 0:
        raise ValueError(
            f"observer must be unit time-like future-pointing, "
            f"eta(U,U)={nrm!r}, U0={U[0]!r}"
        )


def eta_bar_matrix(U) -> np.ndarray:
    """Matrix of the companion metric for unit time-like U."""
    U = np.asarray(U, dtype=float)
    _check_unit_timelike(U)
    eta = minkowski_metric(U.shape[-1])
    u_low = eta @ U
    return -eta + 2.0 * np.outer(u_low, u_low)


def eta_bar_inner(U, a, b) -> float:
    """Companion-metric inner product -eta(a,b) + 2 eta(a,U) eta(b,U)."""
    U = np.asarray(U, dtype=float)
    _check_unit_timelike(U)
    return float(-minkowski_inner(a, b)
                 + 2.0 * minkowski_inner(a, U) * minkowski_inner(b, U))


def eta_bar_norm(U, a) -> float | np.ndarray:
    """Companion-metric norm of a (batched over leading axes of a)."""
    U = np.asarray(U, dtype=float)
    _check_unit_timelike(U)
    a = np.asarray(a, dtype=float)
    q = -minkowski_inner(a, a) + 2.0 * minkowski_inner(a, U) ** 2
    return np.sqrt(np.maximum(q, 0.0))


def hyperboloid_lift(spatial) -> np.ndarray:
    """Lift spatial velocity components onto the unit upper hyperboloid.

    y0 = sqrt(1 + |ybar|^2), so eta(y, y) = 1 by construction.  Batched.
    """
    spatial = np.asarray(spatial, dtype=float)
    y0 = np.sqrt(1.0 + np.sum(spatial**2, axis=-1, keepdims=True))
    return np.concatenate([y0, spatial], axis=-1)


def hyperboloid_project(y) -> np.ndarray:
    """Spatial components of a hyperboloid vector (inverse of the lift)."""
    return np.asarray(y, dtype=float)[..., 1:]


def fiber_volume_weight(y) -> float | np.ndarray:
    """Density 1/y0 of the fiber volume form in the spatial chart.

    Flat metric: the induced form is (1/y0) dy^1 ^ ... ^ dy^(n-1).
    """
    y = np.asarray(y, dtype=float)
    return 1.0 / y[..., 0]


def boost_along(direction, rapidity: float, n: int = 4) -> np.ndarray:
    """Pure boost of given rapidity along a unit spatial direction."""
    direction = np.asarray(direction, dtype=float)
    nrm = np.linalg.norm(direction)
    if nrm == 0:
        raise ValueError("boost direction must be nonzero")
    e = direction / nrm
    c, s = np.cosh(rapidity), np.sinh(rapidity)
    L = np.eye(n)
    L[0, 0] = c
    L[0, 1:] = L[1:, 0] = s * e
    L[1:, 1:] += (c - 1.0) * np.outer(e, e)
    return L


def boost_to(U) -> np.ndarray:
    """Pure boost mapping the lab observer e0 to the unit time-like U."""
    U = np.asarray(U, dtype=float)
    _check_unit_timelike(U)
    n = U.shape[0]
    g = U[0]
    b = U[1:]
    L = np.eye(n)
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = b
    L[1:, 1:] += np.outer(b, b) / (1.0 + g)
    return L


def comoving_frame(U) -> tuple[np.ndarray, np.ndarray]:
    """Boost into/out of the rest frame of U: returns (to_lab, to_frame)."""
    L = boost_to(U)
    eta = minkowski_metric(len(L))
    # Lorentz inverse: eta L^T eta
    return L, eta @ L.T @ eta


@dataclass(frozen=True)
class NormalCoordinateMap:
    """Quadratic chart centered at x0 that kills symmetric coefficients there.

    Forward map:  x' = x + 1/2 * gamma0 : (x - x0)(x - x0).
    The Jacobian at x0 is the identity (so is its inverse).
    """

    x0: np.ndarray
    gamma0: np.ndarray

    def forward(self, x) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.x0
        return self.x0 + d + 0.5 * np.einsum("ijk,j,k->i", self.gamma0, d, d)

    def jacobian(self, x) -> np.ndarray:
        """d x'/d x at the lab point x (identity at x0)."""
        d = np.asarray(x, dtype=float) - self.x0
        return np.eye(len(self.x0)) + np.einsum("ijk,k->ij", self.gamma0, d)

    def inverse_jacobian_at_center(self) -> np.ndarray:
        return np.eye(len(self.x0))

    def inverse(self, xp, tol: float = 1e-14, max_iter: int = 50) -> np.ndarray:
        """Lab point mapping to xp, by Newton on the quadratic map."""
        xp = np.asarray(xp, dtype=float)
        x = xp.copy()
        for _ in range(max_iter):
            r = self.forward(x) - xp
            if np.max(np.abs(r)) < tol:
                return x
            x = x - np.linalg.solve(self.jacobian(x), r)
        raise RuntimeError("normal-coordinate inversion did not converge")

    def transform_connection(self, gamma, x) -> np.ndarray:
        """Coefficients in the new chart, at the image of the lab point x.

        gamma holds the lab-chart coefficients at x.  Standard rule with
        J = dx'/dx and the constant quadratic Hessian H = gamma0:

            gamma'^i_jk = J^i_a gamma^a_bc (J^-1)^b_j (J^-1)^c_k
                          - H^i_bc (J^-1)^b_j (J^-1)^c_k
        """
        J = self.jacobian(x)
        Jinv = np.linalg.inv(J)
        g = np.einsum("ia,abc,bj,ck->ijk", J, np.asarray(gamma, float), Jinv, Jinv)
        g -= np.einsum("ibc,bj,ck->ijk", self.gamma0, Jinv, Jinv)
        return g


def normal_coordinates(gamma0, x0=None, sym_tol: float = 1e-10) -> NormalCoordinateMap:
    """Chart in which the given symmetric coefficients vanish at x0."""
    gamma0 = np.asarray(gamma0, dtype=float)
    n = gamma0.shape[0]
    if gamma0.shape != (n, n, n):
        raise ValueError(f"expected (n, n, n) coefficient array, got {gamma0.shape}")
    asym = np.max(np.abs(gamma0 - gamma0.transpose(0, 2, 1)))
    if asym > sym_tol:
        raise ValueError(
            f"coefficients must be symmetric in the lower slots (max dev {asym:.3e})"
        )
    if x0 is None:
        x0 = np.zeros(n)
    return NormalCoordinateMap(x0=np.asarray(x0, dtype=float), gamma0=gamma0)


def transform_connection(gamma, J, Jinv, H) -> np.ndarray:
    """General coefficient transformation for a chart with Jacobian J and
    forward-map Hessian H (used for cross-checks against the map object)."""
    g = np.einsum("ia,abc,bj,ck->ijk", J, np.asarray(gamma, float), Jinv, Jinv)
    g -= np.einsum("ibc,bj,ck->ijk", np.asarray(H, float), Jinv, Jinv)
    return g
