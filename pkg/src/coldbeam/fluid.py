"""Mean-velocity fields of the transport solutions and cold-fluid residuals.

The central objects are time series of the normalized fiber moments along
the slab (the scenarios are x-uniform, so the mean field depends on lab
time only and all spatial derivatives vanish identically).  From the
series the module evaluates, by central differences of step h:

  * the auto-parallel defect of the mean field under the averaged
    connection (with a normal-coordinate cross-check),
  * the same defect for the normalized field, and the exact decomposition
    identity relating the two through the log of the squared norm,
  * the metric-compatibility defect, both the stated third-moment formula
    and the exact contraction,
  * the residual of the force connection evaluated at the normalized mean
    of the true kinetic solution, with the integral-curve endpoint gap.

Bound factors (support volumes, the W11-style density norm, the floored
log-deviation norm) are evaluated on the initial-slice distribution; the
evaluation time is of the order of the support size, so their drift along
the flow is subleading in every reported scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from coldbeam.connections import averaged_coeffs_arrays, lorentz_coeffs, lorentz_spray
from coldbeam.distribution import (
    MomentSet,
    PhaseDistribution,
    compute_moments,
    moments_from_nodes,
    sobolev_norms,
    support_diameter,
    support_stats,
)
from coldbeam.em_fields import FieldScenario, FieldTensor
from coldbeam.geometry import (
    boost_to,
    hyperboloid_lift,
    minkowski_inner,
    minkowski_metric,
    normal_coordinates,
)
from coldbeam.kinetic import (
    EnsembleState,
    _ensemble_rhs,
    _require_uniform,
    transport_ensemble,
)

__all__ = [
    "MeanFieldSeries",
    "build_mean_field",
    "fluid_residual",
    "normalized_residual",
    "decomposition_identity",
    "incompatibility_terms",
    "bound_rhs",
    "mean_residual_cell",
    "cold_closure_cell",
    "mean_frame_norm",
]


@dataclass(frozen=True)
class MeanFieldSeries:
    """Mean velocity and fiber moments at a set of lab times (x-uniform)."""

    times: np.ndarray
    values: np.ndarray          # (nt, n) mean velocity per time
    rho: np.ndarray             # (nt,) unnormalized density integral
    moments: list[MomentSet]
    alphas: np.ndarray
    energies: np.ndarray
    flow: str

    def index(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 1e-12 * max(1.0, abs(t)):
            raise KeyError(f"time {t} not in the series")
        return k

    def V(self, t: float) -> np.ndarray:
        return self.values[self.index(t)]

    def M(self, t: float) -> MomentSet:
        return self.moments[self.index(t)]


def mean_frame_norm(U, v) -> float:
    """Companion-metric norm of v in the frame of the unit time-like U."""
    eta = minkowski_metric(len(U))
    to_frame = eta @ boost_to(U).T @ eta
    return float(np.linalg.norm(to_frame @ np.asarray(v, float)))


def build_mean_field(scenario: FieldScenario, f0: PhaseDistribution, flow: str,
                     times, tol: float = 1e-10,
                     fiber_nodes: int | None = None) -> MeanFieldSeries:
    """Mean-velocity series of the chosen transport solution.

    flow "lorentz": moments of the node ensemble carried by the force flow.
    flow "averaged": at each time a fresh fiber grid is laid over the
    advected support and the transported density is pulled back along the
    averaged characteristics (co-integrated with the force-flow ensemble
    that feeds the averaged connection).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("series times must be nonnegative")
    order = np.argsort(times)
    sorted_times = times[order]
    if f0.is_dirac:
        flow = "lorentz"   # point support: the two transport flows coincide
    if flow == "lorentz":
        ens_list = _ensembles_at(scenario, f0, sorted_times, tol)
        moms, Vs, rhos, alphas, energies = [], [], [], [], []
        for ens in ens_list:
            mom = ens.moments()
            moms.append(mom)
            Vs.append(mom.first)
            rhos.append(mom.volume)
            nodes = ens.nodes
            alphas.append(support_diameter(nodes, ens.weights))
            energies.append(float(nodes[:, 0].min()))
    elif flow == "averaged":
        moms, Vs, rhos, alphas, energies = _averaged_series(
            scenario, f0, sorted_times, tol, fiber_nodes)
    else:
        raise ValueError(f"unknown flow tag {flow!r}")

    inv = np.empty_like(order)
    inv[order] = np.arange(len(order))
    return MeanFieldSeries(
        times=times,
        values=np.array(Vs)[inv],
        rho=np.array(rhos)[inv],
        moments=[moms[k] for k in inv],
        alphas=np.array(alphas)[inv],
        energies=np.array(energies)[inv],
        flow=flow,
    )


def _ensembles_at(scenario, f0, sorted_times, tol) -> list[EnsembleState]:
    if sorted_times[0] == 0.0:
        rest = sorted_times[1:]
        out = [EnsembleState(f0.nodes[:, 1:].copy(), np.zeros(f0.nodes.shape[0]),
                             f0.weights, f0.cell_weights)]
        if len(rest):
            out += transport_ensemble(scenario, f0, rest, tol=tol)
        return out
    return transport_ensemble(scenario, f0, sorted_times, tol=tol)


def _averaged_series(scenario, f0, sorted_times, tol, fiber_nodes):
    """Backward-characteristic quadrature of the averaged-flow solution."""
    n = scenario.n
    m = fiber_nodes or f0.nodes_per_axis
    Fmix = _require_uniform(scenario)
    F = FieldTensor(minkowski_metric(n) @ Fmix)
    nq = f0.nodes.shape[0]
    ens_len = nq * (n - 1) + nq
    ens_list = _ensembles_at(scenario, f0, sorted_times, tol)

    moms, Vs, rhos, alphas, energies = [], [], [], [], []
    for t_k, ens in zip(sorted_times, ens_list):
        spatial = ens.spatial
        lo = spatial.min(axis=0)
        hi = spatial.max(axis=0)
        pad = 0.25 * (hi - lo) + 1e-12
        lo, hi = lo - pad, hi + pad
        axes = [(np.arange(m) + 0.5) / m * (hi[d] - lo[d]) + lo[d]
                for d in range(n - 1)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n - 1)
        cell = np.prod((hi - lo) / m)
        ynode = hyperboloid_lift(grid)
        if t_k == 0.0:
            vals = f0.value(None, ynode)
        else:
            vals = _pull_back_values(scenario, f0, ens, ynode, t_k, tol,
                                     Fmix, F, ens_len, nq, n)
        keep = vals > 0.0
        if not np.any(keep):
            raise ValueError(f"empty averaged-flow support at t={t_k}")
        ynode, vals = ynode[keep], vals[keep]
        cellw = cell / ynode[:, 0]
        w = vals * cellw
        mom = moments_from_nodes(ynode, w, cellw)
        moms.append(mom)
        Vs.append(mom.first)
        rhos.append(mom.volume)
        alphas.append(support_diameter(ynode, w))
        energies.append(float(ynode[:, 0].min()))
    return moms, Vs, rhos, alphas, energies


def _pull_back_values(scenario, f0, ens, ynode, t_k, tol, Fmix, F, ens_len,
                      nq, n):
    """f0 pulled back along averaged characteristics from time t_k to 0."""
    nb = ynode.shape[0]

    def rhs_back(t, s):
        ds = np.empty_like(s)
        ds[:ens_len] = _ensemble_rhs(Fmix, s[:ens_len], nq, n)
        spatial = s[: nq * (n - 1)].reshape(nq, n - 1)
        lj = s[nq * (n - 1): ens_len]
        nodes = hyperboloid_lift(spatial)
        weights = f0.weights * np.exp(lj)
        vol = weights.sum()
        first = weights @ nodes / vol
        third = np.einsum("q,qi,qj,qk->ijk", weights, nodes, nodes, nodes) / vol
        gbar = averaged_coeffs_arrays(F, first, third).gamma
        Y = s[ens_len:].reshape(nb, n)
        GY = np.einsum("ijk,qj,qk->qi", gbar, Y, Y)
        dY = -GY / Y[:, [0]]
        ds[ens_len:] = dY.ravel()
        return ds

    s0 = np.concatenate([ens.spatial.ravel(), ens.log_jacobian, ynode.ravel()])
    back = solve_ivp(rhs_back, (float(t_k), 0.0), s0, method="DOP853",
                     rtol=tol, atol=tol * 1e-2)
    if not back.success:
        raise RuntimeError(f"averaged pull-back failed: {back.message}")
    landed = back.y[ens_len:, -1].reshape(nb, n)
    s2 = minkowski_inner(landed, landed)
    vals = np.zeros(nb)
    ok = s2 > 0
    vals[ok] = f0.value(None, landed[ok])
    return vals


# --- covariant residuals from a time series ----------------------------------


def _dV_dt(series: MeanFieldSeries, t: float, h: float,
           normalize: bool = False) -> tuple[np.ndarray, np.ndarray]:
    def val(tt):
        V = series.V(tt)
        if normalize:
            return V / np.sqrt(minkowski_inner(V, V))
        return V

    Vp, Vm = val(t + h), val(t - h)
    return val(t), (Vp - Vm) / (2.0 * h)


def fluid_residual(series: MeanFieldSeries, scenario: FieldScenario, t: float,
                   h: float, gamma_moments: MomentSet | None = None) -> np.ndarray:
    """Auto-parallel defect of the mean field under the averaged connection.

    r^k = V^j d_j V^k + Gamma^k_{jl} V^j V^l with the time derivative from
    central differences of the series (spatial derivatives vanish on the
    x-uniform slab).  The connection is rebuilt from the moments at t
    unless an explicit moment set is given.
    """
    V, dV = _dV_dt(series, t, h)
    mom = gamma_moments if gamma_moments is not None else series.M(t)
    g = averaged_coeffs_arrays(scenario.F(np.zeros(scenario.n)), mom.first,
                               mom.third).gamma
    return V[0] * dV + np.einsum("kjl,j,l->k", g, V, V)


def normalized_residual(series: MeanFieldSeries, scenario: FieldScenario,
                        t: float, h: float,
                        gamma_moments: MomentSet | None = None) -> np.ndarray:
    """Auto-parallel defect of the unit-normalized mean field."""
    u, du = _dV_dt(series, t, h, normalize=True)
    mom = gamma_moments if gamma_moments is not None else series.M(t)
    g = averaged_coeffs_arrays(scenario.F(np.zeros(scenario.n)), mom.first,
                               mom.third).gamma
    return u[0] * du + np.einsum("kjl,j,l->k", g, u, u)


def decomposition_identity(series: MeanFieldSeries, scenario: FieldScenario,
                           t: float, h: float) -> dict:
    """Exact relation between the normalized and raw residuals.

    With s2 = eta(V, V):  nabla_u u = nabla_V V / s2 - (V . log s2) V / (2 s2).
    Both sides use the same central-difference operator; the identity
    residual is O(h^2).  Reported in the mean-frame companion norm.
    """
    V = series.V(t)
    s2 = float(minkowski_inner(V, V))
    r_V = fluid_residual(series, scenario, t, h)
    r_u = normalized_residual(series, scenario, t, h)

    def log_s2(tt):
        Vt = series.V(tt)
        return np.log(minkowski_inner(Vt, Vt))

    dlog = V[0] * (log_s2(t + h) - log_s2(t - h)) / (2.0 * h)
    rhs = r_V / s2 - 0.5 * dlog * V / s2
    U = V / np.sqrt(s2)
    return {
        "r_u": r_u,
        "r_V": r_V,
        "log_norm_rate": dlog,
        "identity_residual": mean_frame_norm(U, r_u - rhs),
        "r_u_norm": mean_frame_norm(U, r_u),
        "r_V_norm": mean_frame_norm(U, r_V),
    }


def incompatibility_terms(series: MeanFieldSeries, scenario: FieldScenario,
                          t: float, h: float) -> dict:
    """Metric-compatibility defect of the averaged connection along V.

    "stated": s2 * F_{am} <d^m d^s d^l> V^a V_s V_l (third-moment formula).
    "exact": -2 eta_{ib} V^b Gamma^i_{jk} V^j V^k, the full contraction.
    Also checks the rate identity
        V . eta(V, V) = 2 eta(r_V, V) + (D_V eta)(V, V)
    with the left side from central differences.
    """
    n = scenario.n
    eta = minkowski_metric(n)
    V = series.V(t)
    mom = series.M(t)
    Fcov = scenario.F(np.zeros(n)).F
    s2 = float(minkowski_inner(V, V))
    V_low = eta @ V
    vec = np.einsum("msl,s,l->m", mom.delta_third, V_low, V_low)
    stated = s2 * float((V @ Fcov) @ vec)
    g = averaged_coeffs_arrays(scenario.F(np.zeros(n)), mom.first, mom.third).gamma
    exact = -2.0 * float(V_low @ np.einsum("ijk,j,k->i", g, V, V))

    def s2_of(tt):
        Vt = series.V(tt)
        return float(minkowski_inner(Vt, Vt))

    lhs_rate = V[0] * (s2_of(t + h) - s2_of(t - h)) / (2.0 * h)
    r_V = fluid_residual(series, scenario, t, h)
    rate_residual = abs(lhs_rate - (2.0 * float(V_low @ r_V) + exact))
    return {
        "incompatibility_stated": stated,
        "incompatibility_exact": exact,
        "rate_identity_residual": rate_residual,
        "delta3_max_comoving": float(np.abs(mom.delta_third_comoving).max()),
    }


def chart_scale(gamma0) -> float:
    """Stencil scale on which the quadratic normal chart is well-conditioned.

    The chart Jacobian is I + gamma0 . (x - x0); steps must stay well below
    1 / |gamma0| or the chart (and finite differences across it) degrade.
    In the lab chart of a fast beam the coefficients carry the cubed energy,
    so this is much smaller than the support-sized stencil.
    """
    g = float(np.max(np.abs(gamma0)))
    return 0.02 / max(g, 1e-12)


def normal_coordinate_residual(series: MeanFieldSeries, scenario: FieldScenario,
                               t: float, h: float,
                               gamma0: np.ndarray | None = None) -> np.ndarray:
    """Mean-field defect evaluated in normal coordinates of the averaged
    connection centered at the evaluation event.

    The chart kills the coefficients at the center, so there the defect is
    the bare directional derivative of the transformed field; it must agree
    with the lab-chart covariant expression to O(h^2).  Needs the series to
    contain the preimage times of the chart stencil.
    """
    n = scenario.n
    if gamma0 is None:
        mom = series.M(t)
        gamma0 = averaged_coeffs_arrays(scenario.F(np.zeros(n)), mom.first,
                                        mom.third).gamma
    x0 = np.zeros(n)
    x0[0] = t
    chart = normal_coordinates(gamma0, x0=x0)

    def field_prime(xp):
        x = chart.inverse(xp)
        V = series.V(x[0])
        return chart.jacobian(x) @ V

    Vp0 = field_prime(x0)     # chart.forward(x0) = x0
    dV = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        dV[j] = (field_prime(x0 + e) - field_prime(x0 - e)) / (2.0 * h)
    return Vp0 @ dV


def normal_chart_stencil_times(series_times, t: float, steps,
                               gamma0, n: int) -> np.ndarray:
    """Lab times needed by the normal-chart stencils around t."""
    x0 = np.zeros(n)
    x0[0] = t
    chart = normal_coordinates(np.asarray(gamma0, float), x0=x0)
    need = []
    for h in np.atleast_1d(steps):
        for j in range(n):
            for sgn in (+1.0, -1.0):
                e = np.zeros(n)
                e[j] = sgn * h
                need.append(chart.inverse(x0 + e)[0])
    return np.array(sorted(set(np.round(need, 15)) - set(np.round(series_times, 15))))


def bound_rhs(f0: PhaseDistribution, mean_accel, alpha: float | None = None,
              delta_floor_factor: float = 1e-8) -> dict:
    """Envelope of the mean-field defect from the support geometry.

    (vol_E^{1/2} / vol) * (sum_k |d0 log delta^k|_{L2}) * |f|_{W11} * alpha^2,
    evaluated on the initial-slice profile with the floored log-deviation
    norm.  A point support returns zero.
    """
    if f0.is_dirac:
        return {"rhs": 0.0, "norm_11": 0.0, "log_dev_norm": 0.0,
                "vol": f0.dirac_weight, "vol_E": 0.0, "alpha": 0.0}
    mom = compute_moments(f0)
    a = alpha if alpha is not None else support_stats(f0).alpha
    n11, s02 = sobolev_norms(f0, mean_accel=mean_accel,
                             delta_floor_factor=delta_floor_factor)
    rhs = np.sqrt(mom.volume_E) / mom.volume * s02 * n11 * a**2
    return {"rhs": float(rhs), "norm_11": n11, "log_dev_norm": s02,
            "vol": mom.volume, "vol_E": mom.volume_E, "alpha": a}


# --- per-cell drivers ---------------------------------------------------------


def mean_residual_cell(scenario: FieldScenario, f0: PhaseDistribution,
                       t_eval: float | None = None, h: float | None = None,
                       tol: float = 1e-10, flow: str = "averaged",
                       fiber_nodes: int | None = None) -> dict:
    """All mean-field residual diagnostics for one distribution and field.

    Default evaluation time and stencil follow the support size: h is a
    quarter of the diameter and the evaluation sits at 2h so the centered
    stencils (h and h/2, plus the normal-chart preimages) stay causal.
    """
    alpha0 = f0.alpha_nominal if not f0.is_dirac else 0.0
    if h is None:
        h = max(alpha0 / 4.0, 1e-3)
    if t_eval is None:
        t_eval = 2.0 * h
    # the normal-chart stencil must stay inside the chart's conditioning
    # radius, which is set by the coefficient magnitude, not the support
    probe = build_mean_field(scenario, f0, "lorentz", [t_eval], tol=tol)
    mom_eval = probe.M(t_eval)
    g0 = averaged_coeffs_arrays(scenario.F(np.zeros(scenario.n)),
                                mom_eval.first, mom_eval.third).gamma
    h_nc = min(h, chart_scale(g0))
    base_times = [t_eval, t_eval + h, t_eval - h,
                  t_eval + h / 2.0, t_eval - h / 2.0,
                  t_eval + h_nc, t_eval - h_nc,
                  t_eval + h_nc / 2.0, t_eval - h_nc / 2.0]
    extra = normal_chart_stencil_times(base_times, t_eval,
                                       [h_nc, h_nc / 2.0], g0, scenario.n)
    times = np.concatenate([base_times, extra])
    series = build_mean_field(scenario, f0, flow, times, tol=tol,
                              fiber_nodes=fiber_nodes)

    V = series.V(t_eval)
    U = V / np.sqrt(minkowski_inner(V, V))
    r_V = fluid_residual(series, scenario, t_eval, h)
    r_half = fluid_residual(series, scenario, t_eval, h / 2.0)
    dec = decomposition_identity(series, scenario, t_eval, h)
    dec_half = decomposition_identity(series, scenario, t_eval, h / 2.0)
    inc = incompatibility_terms(series, scenario, t_eval, h)
    r_norm = normal_coordinate_residual(series, scenario, t_eval, h_nc, gamma0=g0)
    r_norm_half = normal_coordinate_residual(series, scenario, t_eval,
                                             h_nc / 2.0, gamma0=g0)

    accel = (series.V(t_eval + h) - series.V(t_eval - h)) / (2 * h)
    fb = bound_rhs(f0.with_mean_accel(accel),
                   mean_accel=accel,
                   alpha=None if f0.is_dirac else support_stats(f0).alpha)

    # deviation bound over the support at the evaluation time
    mom = series.M(t_eval)
    dev_ratio = 0.0
    if not f0.is_dirac:
        ensA = series.alphas[series.index(t_eval)]
        eta = minkowski_metric(scenario.n)
        to_frame = eta @ boost_to(mom.unit_mean).T @ eta
        ens = _ensembles_at(scenario, f0, np.array([t_eval]), tol)[-1]
        delta = (mom.first[None, :] - ens.nodes) @ to_frame.T
        dev_ratio = float(np.linalg.norm(delta, axis=1).max() / ensA)

    return {
        "t_eval": t_eval,
        "h": h,
        "alpha_measured": float(series.alphas[series.index(t_eval)]),
        "energy": float(series.energies[series.index(t_eval)]),
        "r_V": r_V,
        "r_V_norm": mean_frame_norm(U, r_V),
        "r_V_norm_half_h": mean_frame_norm(U, r_half),
        "r_u_norm": dec["r_u_norm"],
        "identity_residual": dec["identity_residual"],
        "identity_residual_half_h": dec_half["identity_residual"],
        "identity_order": float(np.log2(max(dec["identity_residual"], 1e-300)
                                        / max(dec_half["identity_residual"], 1e-300))),
        "normal_chart_gap": mean_frame_norm(
            U, fluid_residual(series, scenario, t_eval, h_nc) - r_norm),
        "normal_chart_gap_half": mean_frame_norm(
            U, fluid_residual(series, scenario, t_eval, h_nc / 2.0) - r_norm_half),
        "normal_chart_step": h_nc,
        "incompatibility_stated": inc["incompatibility_stated"],
        "incompatibility_exact": inc["incompatibility_exact"],
        "rate_identity_residual": inc["rate_identity_residual"],
        "delta3_max_comoving": inc["delta3_max_comoving"],
        "bound_rhs": fb["rhs"],
        "norm_11": fb["norm_11"],
        "log_dev_norm": fb["log_dev_norm"],
        "deviation_ratio": dev_ratio,
        "rho": float(series.rho[series.index(t_eval)]),
    }


def cold_closure_cell(scenario: FieldScenario, f0: PhaseDistribution,
                      t_end: float = 2.0, h: float | None = None,
                      tol: float = 1e-10) -> dict:
    """Force-connection residual of the normalized mean of the kinetic
    solution, plus the endpoint gap between the integral curve of that
    field and the bundled force orbit from the mean initial velocity."""
    n = scenario.n
    alpha0 = f0.alpha_nominal if not f0.is_dirac else 0.0
    if h is None:
        h = max(alpha0 / 4.0, 1e-3)
    t_eval = 2.0 * h
    series = build_mean_field(scenario, f0, "lorentz",
                              [t_eval, t_eval + h, t_eval - h], tol=tol)
    u, du = _dV_dt(series, t_eval, h, normalize=True)
    F = scenario.F(np.zeros(n))
    g = lorentz_coeffs(F, u).gamma
    r_L = u[0] * du + np.einsum("kjl,j,l->k", g, u, u)

    # integral curve of the normalized mean field vs bundled force orbit
    Fmix = _require_uniform(scenario)
    nq = f0.nodes.shape[0]
    ens_len = nq * (n - 1) + nq

    def rhs(t, s):
        # state: [ensemble, x of the integral curve, (x, y) of the orbit]
        ds = np.empty_like(s)
        ds[:ens_len] = _ensemble_rhs(Fmix, s[:ens_len], nq, n)
        spatial = s[: nq * (n - 1)].reshape(nq, n - 1)
        lj = s[nq * (n - 1): ens_len]
        nodes = hyperboloid_lift(spatial)
        weights = f0.weights * np.exp(lj)
        vol = weights.sum()
        first = weights @ nodes / vol
        uu = first / np.sqrt(minkowski_inner(first, first))
        ds[ens_len: ens_len + n] = uu / uu[0]
        yb = s[ens_len + 2 * n:]
        ds[ens_len + n: ens_len + 2 * n] = yb / yb[0]
        ds[ens_len + 2 * n:] = -lorentz_spray(F, yb) / yb[0]
        return ds

    mom0 = compute_moments(f0)
    u0 = mom0.unit_mean
    s0 = np.concatenate([f0.nodes[:, 1:].ravel(), np.zeros(nq),
                         np.zeros(n), np.zeros(n), u0])
    sol = solve_ivp(rhs, (0.0, t_end), s0, method="DOP853",
                    rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise RuntimeError(f"integral-curve comparison failed: {sol.message}")
    x_int = sol.y[ens_len: ens_len + n, -1]
    x_lor = sol.y[ens_len + n: ens_len + 2 * n, -1]
    U = series.V(t_eval) / np.sqrt(minkowski_inner(series.V(t_eval),
                                                   series.V(t_eval)))
    return {
        "t_eval": t_eval,
        "r_L": r_L,
        "r_L_norm": mean_frame_norm(U, r_L),
        "endpoint_gap": float(np.linalg.norm(x_int - x_lor)),
        "endpoint_gap_mean_frame": mean_frame_norm(U, x_int - x_lor),
        "alpha_measured": float(series.alphas[0]),
    }
