"""End-to-end invariant suite behind the `verify` subcommand.

Each check measures one contract of the package (scaling calculus, discrete
operators, ground-state identities, sharp inequality, conservation, virial
consistency) and reports the measured residual against its tolerance.  The
suite is deterministic for a given seed.
"""

from __future__ import annotations

import math

import numpy as np

from .dichotomy import thresholds
from .evolution import (
    CutoffProfile,
    EvolveConfig,
    evolve,
    localized_virial_rhs,
    step,
    virial_rhs,
)
from .functionals import (
    charge,
    energy,
    evaluate,
    gauge_rotate,
    interaction,
    kinetic,
    kinetic_via_laplacian,
    rearrange,
    scale,
    weinstein,
)
from .grid import FieldPair, RadialField, RadialGrid, gaussian_pair, pair_from_samples
from .ground_state import (
    alpha1_from_charge,
    regrid,
    solve,
    weinstein_gradient,
)


def random_admissible_pair(grid: RadialGrid, rng: np.random.Generator) -> FieldPair:
    """Random smooth pair in the cone P > 0: Gaussian bumps, v >= 0."""
    r = grid.nodes
    span = grid.r_max / 4.0

    def bumps(signed: bool) -> np.ndarray:
        out = np.zeros_like(r)
        for _ in range(rng.integers(1, 4)):
            amp = rng.uniform(0.2, 2.0)
            if signed and rng.random() < 0.3:
                amp = -amp
            center = rng.uniform(0.0, span)
            width = rng.uniform(0.5, 3.0)
            out += amp * np.exp(-(((r - center) / width) ** 2))
        return out

    u = bumps(signed=True)
    v = np.abs(bumps(signed=False)) + 1e-3 * np.exp(-(r**2))
    return pair_from_samples(grid, u, v)


class _Suite:
    def __init__(self):
        self.checks = []

    def add(self, name: str, value: float, tol: float):
        self.checks.append(
            {"invariant": name, "measured": float(value), "tolerance": float(tol),
             "passed": bool(value <= tol)}
        )

    @property
    def ok(self) -> bool:
        return all(c["passed"] for c in self.checks)


def verify_suite(
    n: int = 5,
    kappa: float = 0.5,
    num_nodes: int = 2048,
    r_max: float = 32.0,
    seed: int = 0,
    evolve_r_max: float = 16.0,
    evolve_num_nodes: int = 4096,
    dt: float = 1e-3,
) -> tuple[list, bool]:
    rng = np.random.default_rng(seed)
    suite = _Suite()
    grid = RadialGrid(n, r_max, num_nodes)

    # quadrature and operator contracts
    vol = grid.integrate(np.ones(num_nodes))
    exact = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0) * r_max**n / n
    suite.add("quadrature_ball_volume", abs(vol - exact) / exact,
              10.0 * (grid.h / r_max) ** 2)

    f = rng.standard_normal(num_nodes)
    g = rng.standard_normal(num_nodes)
    lf, lg = grid.apply_laplacian(f), grid.apply_laplacian(g)
    sym = abs(grid.inner(lf, g) - grid.inner(f, lg)) / max(abs(grid.inner(lf, g)), 1e-300)
    suite.add("laplacian_self_adjoint", sym, 1e-12)

    pair = random_admissible_pair(grid, rng)
    k1 = kinetic(pair, kappa)
    k2 = kinetic_via_laplacian(pair, kappa)
    suite.add("kinetic_two_routes", abs(k1 - k2) / k1, 1e-10)

    # scaling calculus
    base = evaluate(pair, kappa)
    j_base = weinstein(pair, kappa)
    worst_scale = 0.0
    worst_j = 0.0
    for _ in range(100):
        a = rng.uniform(0.1, 10.0)
        l = rng.uniform(0.1, 10.0)
        s = scale(pair, a, l)
        vals = evaluate(s, kappa)
        worst_scale = max(
            worst_scale,
            abs(vals.Q - a**2 * l**n * base.Q) / (a**2 * l**n * base.Q),
            abs(vals.K - a**2 * l ** (n - 2) * base.K) / (a**2 * l ** (n - 2) * base.K),
            abs(vals.P - a**3 * l**n * base.P) / abs(a**3 * l**n * base.P),
        )
        worst_j = max(worst_j, abs(weinstein(s, kappa) - j_base) / j_base)
    suite.add("scaling_identities", worst_scale, 1e-12)
    suite.add("weinstein_scale_invariance", worst_j, 1e-12)

    rot = gauge_rotate(pair, 0.7363)
    gauge_err = max(
        abs(charge(rot) - base.Q) / base.Q,
        abs(kinetic(rot, kappa) - base.K) / base.K,
        abs(interaction(rot) - base.P) / abs(base.P),
        abs(energy(rot, kappa) - base.E) / max(abs(base.E), 1e-300),
    )
    suite.add("gauge_invariance", gauge_err, 1e-12)

    mat = scale(pair, 1.7, 0.9)
    vals_lazy = evaluate(mat, kappa)
    vals_mat = evaluate(mat.materialized(), kappa)
    suite.add("materialize_invariance",
              abs(vals_lazy.Q - vals_mat.Q) / vals_mat.Q, 1e-13)

    bump = np.exp(-((grid.nodes - grid.r_max / 6.0) ** 2))
    bp = pair_from_samples(grid, bump, bump)
    rb = rearrange(bp)
    suite.add("rearrange_charge", abs(charge(rb) - charge(bp)) / charge(bp), 1e-3)
    suite.add("rearrange_kinetic", kinetic(rb, kappa) / kinetic(bp, kappa) - 1.0, 1e-2)

    # gradient of the quotient vs central differences
    init = gaussian_pair(grid)
    g_u, g_v = weinstein_gradient(init, kappa)
    worst_fd = 0.0
    for _ in range(10):
        du = rng.standard_normal(num_nodes) * np.exp(-grid.nodes)
        dv = rng.standard_normal(num_nodes) * np.exp(-grid.nodes)
        predicted = float(np.dot(grid.weights, g_u * du) + np.dot(grid.weights, g_v * dv))
        eps = 1e-6
        up = FieldPair(RadialField(grid, np.real(init.u.samples) + eps * du),
                       RadialField(grid, np.real(init.v.samples) + eps * dv))
        dn = FieldPair(RadialField(grid, np.real(init.u.samples) - eps * du),
                       RadialField(grid, np.real(init.v.samples) - eps * dv))
        fd = (weinstein(up, kappa) - weinstein(dn, kappa)) / (2 * eps)
        worst_fd = max(worst_fd, abs(fd - predicted) / max(abs(fd), 1e-300))
    suite.add("weinstein_gradient_fd", worst_fd, 1e-5)

    # ground state identities
    gs = solve(n, kappa, num_nodes=num_nodes, r_max=r_max)
    suite.add("ground_state_converged", 0.0 if gs.converged else 1.0, 0.5)
    suite.add("pohozaev_residual_max", max(gs.pohozaev_residuals), 1e-4)
    suite.add("elliptic_residual", gs.elliptic_residual, 1e-3)
    a_formula = alpha1_from_charge(n, gs.values.Q)
    suite.add("alpha1_formula", abs(gs.alpha1 - a_formula) / a_formula, 1e-4)
    suite.add("sharp_constant_reciprocal", abs(gs.C_op * gs.alpha1 - 1.0), 1e-6)
    ji = (n ** (n / 4.0) / 2.0) * (6.0 - n) ** (1.5 - n / 4.0) * math.sqrt(gs.values.I_omega)
    suite.add("weinstein_action_relation", abs(gs.alpha1 - ji) / ji, 1e-4)
    upticks = np.diff(gs.j_history) / gs.j_history[:-1]
    suite.add("monotone_descent", max(float(np.max(upticks, initial=-1.0)), 0.0), 1e-12)

    min_rand = math.inf
    for _ in range(50):
        min_rand = min(min_rand, weinstein(random_admissible_pair(grid, rng), kappa))
    suite.add("minimality", max(0.0, 1.0 - min_rand / gs.alpha1), 1e-6)

    # sharp inequality and dynamics are statements about n = 5 at resonance
    gs5 = gs if (n, kappa) == (5, 0.5) else solve(5, 0.5, num_nodes=num_nodes, r_max=r_max)
    grid5 = RadialGrid(5, r_max, num_nodes)
    worst_gn = 0.0
    for _ in range(200):
        p5 = random_admissible_pair(grid5, rng)
        v5 = evaluate(p5, 0.5)
        bound = gs5.C_op * v5.Q**0.25 * v5.K**1.25
        worst_gn = max(worst_gn, v5.P / bound - 1.0)
    suite.add("gagliardo_nirenberg_no_violation", worst_gn, 1e-9)
    attained = gs5.values.P / (gs5.C_op * gs5.values.Q**0.25 * gs5.values.K**1.25)
    suite.add("gagliardo_nirenberg_attained", abs(1.0 - attained), 1e-3)

    for q0 in (0.5, 1.0, 7.0):
        _, _, gamma, _ = thresholds(gs5, q0)
        b = 2.0 * gs5.C_op * q0**0.25
        gamma_dict = (1.25 * b) ** (-4.0)
        suite.add(f"gamma_route_consistency_Q0_{q0:g}",
                  abs(gamma_dict - gamma) / gamma, 1e-6)

    gs_ev = regrid(gs5, evolve_r_max, evolve_num_nodes)
    data = scale(gs_ev.pair(), 0.9, 1.0).materialized()
    cfg = EvolveConfig(kappa=0.5, dt=dt, t_max=0.25)
    rec = evolve(data, cfg)
    suite.add("charge_drift",
              float(np.max(np.abs(rec.Q_series - rec.Q_series[0])) / rec.Q_series[0]),
              1e-8)
    suite.add("energy_drift",
              float(np.max(np.abs(rec.E_series - rec.E_series[0])) / abs(rec.E_series[0])),
              1e-6)

    V = rec.V_series
    d2 = (-V[:-4] + 16 * V[1:-3] - 30 * V[2:-2] + 16 * V[3:-1] - V[4:]) / (12 * dt**2)
    rhs = 10.0 * rec.E_series[2:-2] - 2.0 * rec.K_series[2:-2]
    mask = np.abs(rhs) > 1e-6 * rec.K_series[0]
    worst_vir = float(np.max(np.abs(d2[mask] - rhs[mask]) / np.abs(rhs[mask])))
    suite.add("virial_second_difference", worst_vir, 2e-2)

    cut = CutoffProfile(R=evolve_r_max, grid=rec.final_state.grid)
    lv = localized_virial_rhs(rec.final_state, cut, 0.5)
    fv = virial_rhs(rec.final_state, 0.5)
    suite.add("localized_virial_quadratic_regime", abs(lv - fv) / abs(fv), 1e-6)

    fwd = step(data, cfg)
    back = step(fwd, cfg, dt=-cfg.dt)
    gev = data.grid
    rev = (gev.norm(back.u.samples - data.u.samples)
           + gev.norm(back.v.samples - data.v.samples)) / math.sqrt(charge(data))
    suite.add("time_reversal", rev, 10.0 * cfg.solver_tol)

    return suite.checks, suite.ok
