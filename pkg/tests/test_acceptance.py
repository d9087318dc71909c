"""Acceptance criteria, one test per criterion, with a printed verdict line.

The scan-based criteria read one shared full-ladder run (executed once per
session); the remaining criteria drive the library directly.  Run with
`pytest tests/test_acceptance.py -v -s` to see the verdict lines inline.
"""

import json
import time

import numpy as np
import pytest

from coldbeam.config import default_config_text, load_config
from coldbeam.connections import averaged_coeffs, lorentz_coeffs
from coldbeam.distribution import (
    compute_moments,
    dirac_limit_distribution,
    make_beam_distribution,
    support_stats,
)
from coldbeam.em_fields import FieldTensor, make_scenario
from coldbeam.fluid import mean_residual_cell
from coldbeam.geometry import (
    boost_along,
    eta_bar_norm,
    hyperboloid_lift,
    minkowski_inner,
    normal_coordinates,
)
from coldbeam.harness import run_scan
from coldbeam.kinetic import PhaseState, integrate_lorentz


def verdict(ok: bool, name: str, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="session")
def full_run(tmp_path_factory):
    base = tmp_path_factory.mktemp("acceptance")
    cfg_path = base / "full.ini"
    cfg_path.write_text(default_config_text())
    cfg = load_config(cfg_path)
    t0 = time.time()
    manifest = run_scan(cfg, out_dir=base / "run")
    manifest["_wall_seconds"] = time.time() - t0
    manifest["_run_dir"] = str(base / "run")
    return manifest


@pytest.fixture(scope="session")
def smoke_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("determinism")
    cfg_path = base / "smoke.ini"
    cfg_path.write_text(default_config_text(smoke=True))
    t0 = time.time()
    run_scan(load_config(cfg_path), out_dir=base / "a")
    wall = time.time() - t0
    run_scan(load_config(cfg_path), out_dir=base / "b")
    return base, wall


def test_unit_norm_conservation_four_periods():
    B = 1.0
    sc = make_scenario("uniform_b", strength=B)
    y0 = np.array([np.cosh(3.0), np.sinh(3.0), 0.0, 0.0])
    period = 2 * np.pi * y0[0] / B
    grid = np.linspace(0.25, 4.0, 16) * period
    t0 = time.time()
    traj = integrate_lorentz(sc, PhaseState(np.zeros(4), y0), grid, tol=1e-10)
    wall = time.time() - t0
    verdict(traj.norm_drift < 1e-8 and wall < 5.0,
            "unit-norm conservation",
            f"max |eta(v,v)-1| = {traj.norm_drift:.3e} over 4 periods "
            f"({wall:.1f}s)")


def test_analytic_orbit_oracles():
    t0 = time.time()
    B = 1.0
    sc = make_scenario("uniform_b", strength=B)
    y0 = np.array([np.cosh(3.0), np.sinh(3.0), 0.0, 0.0])
    period = 2 * np.pi * y0[0] / B
    grid = np.array([0.25, 0.5, 0.75, 1.0]) * period
    traj = integrate_lorentz(sc, PhaseState(np.zeros(4), y0), grid, tol=1e-10)
    worst_b = 0.0
    for k, t in enumerate(grid):
        tau = t / y0[0]
        w = (y0[1] + 1j * y0[2]) * np.exp(-1j * B * tau)
        xw = (y0[1] + 1j * y0[2]) * (1 - np.exp(-1j * B * tau)) / (1j * B)
        ref = np.array([t, xw.real, xw.imag, 0.0])
        worst_b = max(worst_b, float(np.max(np.abs(traj.state(k).x - ref))))

    E = 0.8
    sce = make_scenario("uniform_e", strength=E)
    tre = integrate_lorentz(sce, PhaseState(np.zeros(4),
                                            np.array([1.0, 0, 0, 0.0])),
                            np.array([0.5, 1.0, 2.0, 4.0]), tol=1e-10)
    worst_e = 0.0
    for k, t in enumerate((0.5, 1.0, 2.0, 4.0)):
        tau = np.arcsinh(E * t) / E
        ref = np.array([t, -(np.cosh(E * tau) - 1) / E, 0.0, 0.0])
        worst_e = max(worst_e, float(np.max(np.abs(tre.state(k).x - ref))))
    wall = time.time() - t0
    verdict(worst_b < 1e-7 and worst_e < 1e-7 and wall < 5.0,
            "closed-form orbit oracles",
            f"circular dev {worst_b:.2e}, hyperbolic dev {worst_e:.2e} "
            f"({wall:.1f}s)")


def test_spray_contraction_identity():
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(1000):
        M = rng.normal(size=(4, 4))
        F = FieldTensor(M - M.T)
        y = hyperboloid_lift(rng.normal(scale=0.8, size=3)) * rng.uniform(0.5, 1.5)
        lhs = lorentz_coeffs(F, y).contract(y, y)
        rhs = np.sqrt(minkowski_inner(y, y)) * (F.mixed() @ y)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    verdict(worst < 1e-12, "spray contraction identity",
            f"worst deviation {worst:.3e} over 1000 draws")


def _fit(manifest, check, key):
    return manifest["checks"][check]["fits"][key]


def test_position_gap_exponents(full_run):
    ok_scan = full_run["_wall_seconds"] < 600.0
    fa = _fit(full_run, "position_gap", "alpha")
    ft = _fit(full_run, "position_gap", "time")
    fe = _fit(full_run, "position_gap", "energy")
    ok = all(f["passed"] for f in (fa, ft, fe)) and ok_scan
    verdict(ok, "position-gap exponents",
            f"alpha {fa['exponent']:+.3f} (2±0.3), t {ft['exponent']:+.3f} "
            f"(2±0.2), E {fe['exponent']:+.3f} (-2±0.3); "
            f"scan {full_run['_wall_seconds']:.0f}s < 600s")


def test_velocity_gap_exponents(full_run):
    fa = _fit(full_run, "velocity_gap", "alpha")
    ft = _fit(full_run, "velocity_gap", "time")
    fe = _fit(full_run, "velocity_gap", "energy")
    ok = all(f["passed"] for f in (fa, ft, fe))
    verdict(ok, "velocity-gap exponents",
            f"alpha {fa['exponent']:+.3f} (2±0.3), t {ft['exponent']:+.3f} "
            f"(1±0.2), E {fe['exponent']:+.3f} (-1±0.3)")


def test_distribution_gap_exponent(full_run):
    fa = _fit(full_run, "distribution_gap", "alpha")
    verdict(fa["passed"], "distribution-value gap exponent",
            f"alpha {fa['exponent']:+.3f} (2±0.3)")


def test_mean_residual_exponent_and_envelope(full_run):
    entry = full_run["checks"]["mean_residual"]
    fa = entry["fits"]["alpha"]
    ok = fa["passed"] and entry["envelope_holds_everywhere"]
    verdict(ok, "mean-field residual",
            f"alpha {fa['exponent']:+.3f} (2±0.3); envelope C = "
            f"{entry['envelope_constant']:.3e} holds at every in-regime cell")


def test_residual_decomposition(full_run):
    entry = full_run["checks"]["residual_decomposition"]
    f3 = entry["fits"]["delta3_alpha"]
    ok = (f3["passed"] and entry["identity_holds"]
          and entry["identity_order_ok"])
    verdict(ok, "deviation-moment and decomposition identity",
            f"third-moment alpha {f3['exponent']:+.3f} (3±0.3); identity "
            f"residual {entry['identity_residual']:.2e} < 1e-6 at h=alpha/4, "
            f"order {entry['identity_order']:.2f} (2±0.3)")


def test_cold_closure_exponent(full_run):
    fa = _fit(full_run, "cold_closure", "alpha")
    verdict(fa["passed"], "kinetic-mean closure residual",
            f"alpha {fa['exponent']:+.3f} (2±0.3)")


def test_cold_limit_exact(full_run):
    entry = full_run["checks"]["cold_limit"]
    verdict(entry["passed"], "point-support cold limit",
            f"relative coefficient gap {entry['coefficient_gap_relative']:.2e}, "
            f"residual {entry['r_V_norm']:.2e}, envelope {entry['bound_rhs']:.1f}")


def test_cold_limit_two_dimensional():
    # the 1+1-dimensional toy: point support solves both transport equations
    sc = make_scenario("uniform_e", strength=0.5, n=2)
    V = hyperboloid_lift(np.array([np.sinh(1.0)]))
    d = dirac_limit_distribution(1.0, V, n=2)
    mom = compute_moments(d)
    g_avg = averaged_coeffs(sc.F(np.zeros(2)), mom).gamma
    g_lor = lorentz_coeffs(sc.F(np.zeros(2)), V).gamma
    gap = float(np.max(np.abs(g_avg - g_lor)))
    verdict(gap < 1e-13 and support_stats(d).alpha == 0.0,
            "cold limit in 1+1 dimensions",
            f"coefficient gap {gap:.2e}, width 0")


def test_deviation_bound_everywhere(full_run):
    entry = full_run["checks"]["deviation_bound"]
    # also check the initial-slice distributions directly at every ladder width
    worst = entry["max_ratio"]
    for a in (0.4, 0.2, 0.1, 0.05):
        for kind in ("ball", "two_lobe"):
            f0 = make_beam_distribution(3.0, alpha=a, profile_kind=kind,
                                        nodes_per_axis=13)
            mom = compute_moments(f0)
            st = support_stats(f0)
            dev = eta_bar_norm(mom.unit_mean, mom.first[None, :] - f0.nodes)
            worst = max(worst, float(dev.max() / st.alpha))
    verdict(worst <= 1.5, "deviation bound",
            f"max |<y> - y| / alpha = {worst:.3f} <= 1.5 at all nodes")


def test_normal_coordinates_criteria(full_run):
    entry = full_run["checks"]["normal_coordinates"]
    rng = np.random.default_rng(7)
    g = rng.normal(scale=0.4, size=(4, 4, 4))
    g = 0.5 * (g + g.transpose(0, 2, 1))
    chart = normal_coordinates(g, x0=np.zeros(4))
    killed = float(np.max(np.abs(chart.transform_connection(g, chart.x0))))
    ok = (killed < 1e-10 and entry["coefficients_at_center"] < 1e-10
          and entry["passed"])
    verdict(ok, "normal coordinates",
            f"coefficients at center {max(killed, entry['coefficients_at_center']):.2e}"
            f" < 1e-10; residual cross-check order "
            f"{entry['cross_check_order']:.3f} (2±0.3)")


def test_determinism_byte_identical(smoke_runs):
    base, wall = smoke_runs
    same = True
    for name in ("manifest.json", "gaps.csv", "fluid.csv", "closure.csv",
                 "trajectories.csv", "summary.txt"):
        same = same and ((base / "a" / name).read_bytes()
                         == (base / "b" / name).read_bytes())
    verdict(same and wall < 60.0, "determinism",
            f"repeated smoke scan byte-identical ({wall:.1f}s < 60s)")


def test_full_run_overall(full_run):
    verdict(full_run["all_passed"], "full scan roll-up",
            "manifest reports every check green"
            if full_run["all_passed"]
            else f"failures: {full_run['failures']}")
