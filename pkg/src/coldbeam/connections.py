"""The velocity-dependent force connection, its spray, and the fiber average.

For flat space-time the Levi-Civita part is identically zero, so the
connection is built from the field tensor alone.  Contracting the full
coefficient array twice with the velocity collapses to

    G^i(x, y) = sqrt(eta(y,y)) F^i_j y^j

because the trace-type third term is transverse to y; geodesics of this
spray are exactly the force orbits.  The averaged coefficients replace the
velocity dependence by first and third fiber moments and define an affine,
symmetric connection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coldbeam.em_fields import FieldTensor
from coldbeam.geometry import minkowski_inner, minkowski_metric

__all__ = [
    "ConnectionCoeffs",
    "lorentz_coeffs",
    "lorentz_spray",
    "averaged_coeffs",
    "averaged_coeffs_arrays",
    "interpolated_coeffs",
    "spray_from_coeffs",
    "covariant_derivative",
]


@dataclass(frozen=True)
class ConnectionCoeffs:
    """Coefficient array Gamma^i_{jk} at a point, symmetric in (j, k)."""

    gamma: np.ndarray
    y_dependent: bool = False
    velocity: np.ndarray | None = None

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        object.__setattr__(self, "gamma", g)
        n = g.shape[0]
        if g.shape != (n, n, n):
            raise ValueError(f"expected (n,n,n) array, got {g.shape}")

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    def contract(self, a, b) -> np.ndarray:
        return np.einsum("ijk,j,k->i", self.gamma, np.asarray(a, float),
                         np.asarray(b, float))


def _require_timelike(y: np.ndarray) -> float:
    s2 = float(minkowski_inner(y, y))
    if s2 <= 0:
        raise ValueError(f"velocity must be time-like, eta(y,y)={s2!r}")
    return np.sqrt(s2)


def lorentz_coeffs(F: FieldTensor, y) -> ConnectionCoeffs:
    """Velocity-dependent coefficients of the force connection (flat metric).

    Two symmetrized field terms weighted by 1/(2 sqrt(eta(y,y))) plus the
    trace-type term with the projector eta_jk - y_j y_k / eta(y,y).
    """
    y = np.asarray(y, dtype=float)
    s = _require_timelike(y)
    eta = minkowski_metric(F.n)
    Fm = F.mixed()
    y_low = eta @ y
    g = (np.einsum("ij,k->ijk", Fm, y_low) + np.einsum("ik,j->ijk", Fm, y_low)) / (2 * s)
    proj = eta - np.outer(y_low, y_low) / s**2
    g += np.einsum("i,jk->ijk", Fm @ y, proj) / (2 * s)
    return ConnectionCoeffs(g, y_dependent=True, velocity=y.copy())


def lorentz_spray(F: FieldTensor, y) -> np.ndarray:
    """Spray G^i = sqrt(eta(y,y)) F^i_j y^j; batched over leading axes."""
    y = np.asarray(y, dtype=float)
    s2 = minkowski_inner(y, y)
    if np.any(s2 <= 0):
        raise ValueError("velocity must be time-like")
    return np.sqrt(s2)[..., None] * np.einsum("ij,...j->...i", F.mixed(), y)


def averaged_coeffs_arrays(F: FieldTensor, first, third) -> ConnectionCoeffs:
    """Fiber-averaged coefficients from normalized first/third raw moments.

    Moments are taken on the unit hyperboloid, where every 1/sqrt(eta(y,y))
    weight inside the averages equals one.
    """
    first = np.asarray(first, dtype=float)
    third = np.asarray(third, dtype=float)
    eta = minkowski_metric(F.n)
    Fm = F.mixed()
    m_low = eta @ first
    g = 0.5 * (np.einsum("ij,k->ijk", Fm, m_low) + np.einsum("ik,j->ijk", Fm, m_low))
    g += 0.5 * np.einsum("i,jk->ijk", Fm @ first, eta)
    # symmetrize the third-moment term explicitly: the moment array is
    # symmetric only up to summation order, and the coefficients must be
    # exactly symmetric in the lower slots
    T = np.einsum("im,js,kl,msl->ijk", Fm, eta, eta, third)
    g -= 0.25 * (T + T.transpose(0, 2, 1))
    return ConnectionCoeffs(g, y_dependent=False)


def averaged_coeffs(F: FieldTensor, moments) -> ConnectionCoeffs:
    """Averaged coefficients from a moment set (normalized moments)."""
    if getattr(moments, "volume", 1.0) <= 0:
        raise ValueError("moment set has nonpositive support volume")
    return averaged_coeffs_arrays(F, moments.first, moments.third)


def interpolated_coeffs(eps: float, F: FieldTensor, y, moments) -> ConnectionCoeffs:
    """Convex combination (1-eps) * velocity-dependent + eps * averaged."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"interpolation parameter must be in [0, 1], got {eps}")
    lor = lorentz_coeffs(F, y)
    avg = averaged_coeffs(F, moments)
    return ConnectionCoeffs((1.0 - eps) * lor.gamma + eps * avg.gamma,
                            y_dependent=True, velocity=np.asarray(y, float))


def spray_from_coeffs(coeffs: ConnectionCoeffs, y) -> np.ndarray:
    return coeffs.contract(y, y)


def covariant_derivative(gamma_field, V_field, W_field, x, h: float) -> np.ndarray:
    """(nabla_V W)^k = V^j d_j W^k + Gamma^k_{jl} V^j W^l at x.

    gamma_field, V_field, W_field are callables of the space-time point;
    partial derivatives use central differences of step h.
    """
    if h <= 0:
        raise ValueError("stencil step must be positive")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    V = np.asarray(V_field(x), dtype=float)
    W = np.asarray(W_field(x), dtype=float)
    dW = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        dW[j] = (np.asarray(W_field(x + e), float)
                 - np.asarray(W_field(x - e), float)) / (2 * h)
    gamma = gamma_field(x)
    g = gamma.gamma if isinstance(gamma, ConnectionCoeffs) else np.asarray(gamma, float)
    return V @ dW + np.einsum("kjl,j,l->k", g, V, W)
