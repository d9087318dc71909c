"""External electromagnetic fields: potentials, field tensors, scenarios.

Scenarios carry both a potential A and the analytic tensor F = dA.  Dynamics
always consumes the analytic tensor; the potential exists so closedness and
the finite-difference curl can be cross-checked against it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from coldbeam.geometry import boost_to, minkowski_metric

__all__ = [
    "FieldTensor",
    "FieldScenario",
    "field_from_potential",
    "check_closed",
    "field_operator_norm",
    "make_scenario",
    "scenario_names",
]

ANTISYM_TOL = 1e-12


@dataclass(frozen=True)
class FieldTensor:
    """Antisymmetric field 2-form at a point, covariant components F_ij."""

    F: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F, dtype=float)
        object.__setattr__(self, "F", F)
        if F.ndim != 2 or F.shape[0] != F.shape[1]:
            raise ValueError(f"field tensor must be square, got {F.shape}")
        dev = np.max(np.abs(F + F.T))
        if dev > ANTISYM_TOL:
            raise ValueError(f"field tensor not antisymmetric (max dev {dev:.3e})")

    @property
    def n(self) -> int:
        return self.F.shape[0]

    def mixed(self) -> np.ndarray:
        """Mixed components F^i_j = eta^{ik} F_kj."""
        return minkowski_metric(self.n) @ self.F


def field_from_potential(A: Callable, x, h: float = 1e-5) -> FieldTensor:
    """Central-difference exterior derivative F_ij = d_i A_j - d_j A_i.

    The result is antisymmetrized exactly, F <- (F - F^T)/2.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    dA = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        dA[i] = (np.asarray(A(x + e), float) - np.asarray(A(x - e), float)) / (2 * h)
    F = dA - dA.T
    return FieldTensor(0.5 * (F - F.T))


def check_closed(F_field: Callable, x, h: float = 1e-4) -> float:
    """Max-abs cyclic derivative d_i F_jk + d_j F_ki + d_k F_ij over triples."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]

    def dF(i):
        e = np.zeros(n)
        e[i] = h
        Fp = np.asarray(F_field(x + e), float)
        Fm = np.asarray(F_field(x - e), float)
        return (Fp - Fm) / (2 * h)

    grads = [dF(i) for i in range(n)]
    worst = 0.0
    for i, j, k in itertools.combinations(range(n), 3):
        val = grads[i][j, k] + grads[j][k, i] + grads[k][i, j]
        worst = max(worst, abs(val))
    return worst


def field_operator_norm(F: FieldTensor, U) -> float:
    """Operator norm of y -> F^i_j y^j in the companion metric of U.

    Computed as the largest singular value of the mixed tensor expressed in
    the orthonormal frame carried by the boost taking e0 to U.
    """
    L = boost_to(U)
    eta = minkowski_metric(F.n)
    Linv = eta @ L.T @ eta
    M = Linv @ F.mixed() @ L
    return float(np.linalg.svd(M, compute_uv=False)[0])


@dataclass(frozen=True)
class FieldScenario:
    """Named external-field configuration on a box-shaped domain."""

    name: str
    potential: Callable
    tensor: Callable
    strength: float
    domain: np.ndarray | None = None
    x_uniform: bool = True
    n: int = 4

    def __post_init__(self):
        if self.domain is None:
            box = np.array([[-1e3, 1e3]] * self.n)
            box[0] = (-1e6, 1e6)    # the time axis is effectively unbounded
            object.__setattr__(self, "domain", box)

    def F(self, x) -> FieldTensor:
        return FieldTensor(np.asarray(self.tensor(np.asarray(x, float)), float))

    def mixed(self, x) -> np.ndarray:
        return self.F(x).mixed()

    def in_domain(self, x) -> bool:
        x = np.asarray(x, float)
        return bool(np.all(x >= self.domain[:, 0]) and np.all(x <= self.domain[:, 1]))


def _uniform_b(strength: float, n: int) -> FieldScenario:
    if n != 4:
        raise ValueError("uniform_b is a 4-dimensional scenario")
    B = strength

    def potential(x):
        return np.array([0.0, 0.0, B * x[1], 0.0])

    Fmat = np.zeros((4, 4))
    Fmat[1, 2], Fmat[2, 1] = B, -B

    return FieldScenario("uniform_b", potential, lambda x: Fmat, strength=B)


def _uniform_e(strength: float, n: int) -> FieldScenario:
    E = strength

    def potential(x):
        A = np.zeros(n)
        A[0] = -E * x[1]
        return A

    Fmat = np.zeros((n, n))
    Fmat[0, 1], Fmat[1, 0] = E, -E

    return FieldScenario("uniform_e", potential, lambda x: Fmat, strength=E, n=n)


def _gradient_b(strength: float, n: int, grad: float = 0.1) -> FieldScenario:
    if n != 4:
        raise ValueError("gradient_b is a 4-dimensional scenario")
    B0 = strength

    def potential(x):
        return np.array([0.0, 0.0, B0 * (x[1] + 0.5 * grad * x[1] ** 2), 0.0])

    def tensor(x):
        F = np.zeros((4, 4))
        F[1, 2] = B0 * (1.0 + grad * x[1])
        F[2, 1] = -F[1, 2]
        return F

    return FieldScenario("gradient_b", potential, tensor, strength=B0, x_uniform=False)


def _zero(strength: float, n: int) -> FieldScenario:
    Fmat = np.zeros((n, n))
    return FieldScenario("zero", lambda x: np.zeros(n), lambda x: Fmat,
                         strength=0.0, n=n)


_SCENARIOS = {
    "uniform_b": _uniform_b,
    "uniform_e": _uniform_e,
    "gradient_b": _gradient_b,
    "zero": _zero,
}


def scenario_names() -> list[str]:
    return sorted(_SCENARIOS)


def make_scenario(name: str, strength: float = 0.1, n: int = 4, **kwargs) -> FieldScenario:
    """Build a named scenario; unknown names raise with the valid list."""
    try:
        builder = _SCENARIOS[name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; available: {', '.join(scenario_names())}"
        ) from None
    return builder(strength, n, **kwargs)
