"""Conserved and variational quantities of the quadratic-interaction system.

For a state (u, v) on a radial grid in R^n with coupling ratio kappa:

    Q = |u|_2^2 + 2 |v|_2^2                     (charge)
    K = |grad u|_2^2 + kappa |grad v|_2^2        (kinetic)
    P = Re int u^2 conj(v) dx                    (interaction)
    E = K - 2 P                                  (energy)
    I_omega = (E + omega Q) / 2                  (action)
    J = Q^{3/2 - n/4} K^{n/4} / P                (Weinstein quotient)

J is invariant under u -> a u(x/l), defined on the cone P > 0, and its
infimum over that cone is the reciprocal of the sharp constant in
P <= C Q^{3/2 - n/4} K^{n/4}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .grid import FieldPair, RadialField


@dataclass(frozen=True)
class SystemParams:
    """Coupling data: kappa = m/M, optionally with the raw constants.

    When the raw constants are present they must satisfy lambda = c * conj(mu)
    with real nonzero c, the compatibility condition that makes the charge and
    energy conserved.
    """

    kappa: float
    m: float | None = None
    M: float | None = None
    lam: complex | None = None
    mu: complex | None = None
    c: float | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        raw = (self.m, self.M, self.lam, self.mu, self.c)
        if any(x is not None for x in raw):
            if any(x is None for x in raw):
                raise ValueError("raw constants m, M, lambda, mu, c must all be given")
            if not (self.m > 0 and self.M > 0):
                raise ValueError("masses m, M must be positive")
            if self.c == 0:
                raise ValueError("c must be nonzero")
            if self.lam != self.c * complex(self.mu).conjugate():
                raise ValueError(
                    "raw constants violate lambda = c * conj(mu); "
                    "charge/energy would not be conserved"
                )
            if self.kappa != self.m / self.M:
                raise ValueError(
                    f"kappa={self.kappa} inconsistent with m/M={self.m / self.M}"
                )


@dataclass(frozen=True)
class FunctionalValues:
    """Snapshot of all functionals for one state (J only where P > 0)."""

    Q: float
    E: float
    K: float
    P: float
    I_omega: float | None = None
    J: float | None = None


def _check_pair(state: FieldPair) -> FieldPair:
    return state.materialized()


def charge(state: FieldPair) -> float:
    """Q = int |u|^2 + 2 int |v|^2."""
    s = _check_pair(state)
    w = s.grid.weights
    return float(
        np.dot(w, np.abs(s.u.samples) ** 2) + 2.0 * np.dot(w, np.abs(s.v.samples) ** 2)
    )


def kinetic(state: FieldPair, kappa: float) -> float:
    """K = |grad u|^2 + kappa |grad v|^2 by face-based gradient quadrature."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    s = _check_pair(state)
    g = s.grid
    return g.gradient_energy(s.u.samples) + kappa * g.gradient_energy(s.v.samples)


def kinetic_via_laplacian(state: FieldPair, kappa: float) -> float:
    """Second route to K: -<Lap u, u> - kappa <Lap v, v>."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    s = _check_pair(state)
    g = s.grid
    ku = -g.inner(g.apply_laplacian(s.u.samples), s.u.samples).real
    kv = -g.inner(g.apply_laplacian(s.v.samples), s.v.samples).real
    return ku + kappa * kv


def interaction(state: FieldPair) -> float:
    """P = Re int u^2 conj(v) dx; equals int phi^2 psi for real fields."""
    s = _check_pair(state)
    w = s.grid.weights
    return float(np.dot(w, (s.u.samples**2 * np.conj(s.v.samples)).real))


def energy(state: FieldPair, kappa: float) -> float:
    """Conserved energy E = K - 2 P."""
    return kinetic(state, kappa) - 2.0 * interaction(state)


def action(state: FieldPair, kappa: float, omega: float) -> float:
    """I_omega = (E + omega Q) / 2."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    return 0.5 * (energy(state, kappa) + omega * charge(state))


def weinstein(state: FieldPair, kappa: float) -> float:
    """J = Q^{3/2-n/4} K^{n/4} / P on the cone P > 0."""
    P = interaction(state)
    if not P > 0:
        raise ValueError(
            f"state outside the admissible cone P > 0 (constraint set P): P = {P}"
        )
    n = state.n
    Q = charge(state)
    K = kinetic(state, kappa)
    return Q ** (1.5 - n / 4.0) * K ** (n / 4.0) / P


def evaluate(state: FieldPair, kappa: float, omega: float | None = None) -> FunctionalValues:
    """All functional values of one state in a single pass."""
    Q = charge(state)
    K = kinetic(state, kappa)
    P = interaction(state)
    E = K - 2.0 * P
    I_omega = None if omega is None else 0.5 * (E + omega * Q)
    J = None
    if P > 0:
        n = state.n
        J = Q ** (1.5 - n / 4.0) * K ** (n / 4.0) / P
    return FunctionalValues(Q=Q, E=E, K=K, P=P, I_omega=I_omega, J=J)


def scale(state: FieldPair, a: float, l: float) -> FieldPair:
    """Apply a * delta_l to both components (lazily, via metadata).

    The exact transformation laws Q -> a^2 l^n Q, K -> a^2 l^{n-2} K and
    P -> a^3 l^n P then hold to machine precision.
    """
    return FieldPair(state.u.scaled(a, l), state.v.scaled(a, l))


def normalize_system(params: SystemParams, state: FieldPair) -> FieldPair:
    """Map raw-parameter initial data onto the normalized system.

    Returns (sqrt(c/2) |mu| u(sqrt(1/2m) x), -(lambda/2) v(sqrt(1/2m) x)); the
    evolution of the result is governed by the normalized equations with
    kappa = m/M.  The spatial part is a dilation by sqrt(2m), the amplitudes
    are complex prefactors folded into the samples.
    """
    if params.m is None:
        raise ValueError("normalize_system needs the raw constants m, M, lambda, mu, c")
    if params.c <= 0:
        raise ValueError(
            f"c = {params.c} <= 0: sqrt(c/2) is not real, the normalization map "
            "is only defined for c > 0"
        )
    amp_u = math.sqrt(params.c / 2.0) * abs(params.mu)
    amp_v = -complex(params.lam) / 2.0
    l = math.sqrt(2.0 * params.m)
    u = RadialField(state.u.grid, amp_u * state.u.amp * state.u.samples,
                    1.0, state.u.dilation * l)
    v = RadialField(state.v.grid, amp_v * state.v.amp * state.v.samples,
                    1.0, state.v.dilation * l)
    return FieldPair(u, v)


def rearrange(state: FieldPair) -> FieldPair:
    """Symmetric-decreasing rearrangement of both components.

    Equimeasurable with respect to the weighted grid measure: each component
    is replaced by f*_j = sup{t : mu(t) > V_j} where mu(t) is the weighted
    measure of {f > t} and V_j the cumulative weight up to node j (up to the
    cell center, consistent with cell-centered sampling; the leading-edge
    convention would bias Q at first order in h).  Output is nonincreasing
    in r; Q is preserved up to quadrature error; monotone fields are exact
    fixed points.
    """
    s = state.materialized()
    for f in (s.u.samples, s.v.samples):
        if np.iscomplexobj(f) and np.any(f.imag != 0):
            raise ValueError("rearrangement needs real non-negative fields; "
                             "apply the modulus first")
        if np.any(np.real(f) < 0):
            raise ValueError("rearrangement needs non-negative fields; "
                             "apply the modulus first")
    w = s.grid.weights
    V = np.concatenate(([0.0], np.cumsum(w)[:-1])) + 0.5 * w

    def _rearranged(f: np.ndarray) -> np.ndarray:
        f = np.real(f)
        order = np.argsort(-f, kind="stable")
        sorted_vals = f[order]
        cum = np.cumsum(w[order])
        idx = np.searchsorted(cum, V, side="right")
        return sorted_vals[np.minimum(idx, len(f) - 1)]

    g = s.grid
    return FieldPair(
        RadialField(g, _rearranged(s.u.samples)),
        RadialField(g, _rearranged(s.v.samples)),
    )


def gauge_rotate(state: FieldPair, theta: float) -> FieldPair:
    """(u, v) -> (e^{i theta} u, e^{2 i theta} v); leaves Q, K, P, E fixed."""
    s = state
    pu = cmath.exp(1j * theta)
    pv = cmath.exp(2j * theta)
    return FieldPair(
        RadialField(s.u.grid, pu * s.u.samples.astype(complex), s.u.amp, s.u.dilation),
        RadialField(s.v.grid, pv * s.v.samples.astype(complex), s.v.amp, s.v.dilation),
    )
