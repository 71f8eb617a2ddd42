"""Uniform radial grids on R^n (1 <= n <= 5) with weighted quadrature.

Radially symmetric functions are sampled at cell centers r_j = (j+1/2)h,
which keeps every formula away from the coordinate singularity at r = 0.
Integrals over R^n reduce to

    int f dx = omega_{n-1} * int_0^inf f(r) r^{n-1} dr,

realized by midpoint quadrature with weights w_j = omega_{n-1} r_j^{n-1} h.
For n = 1 we use the full-line convention for even functions, omega_0 = 2.

The discrete Laplacian is assembled in flux form (divided differences of
r^{n-1} u' over cell faces) so that it is exactly self-adjoint with respect
to the weighted inner product <f, g> = sum_j w_j f_j conj(g_j).  The lower
face of cell 0 carries zero flux (regularity at the origin); beyond r_max a
homogeneous Dirichlet value is assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


def gamma_half_integer(n: int) -> float:
    """Gamma(n/2) for integer n >= 1 via the half-integer recurrence."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x = n / 2.0
    out = math.sqrt(math.pi) if n % 2 == 1 else 1.0
    while x > 1.0:
        x -= 1.0
        out *= x
    return out


def unit_sphere_area(n: int) -> float:
    """Surface measure omega_{n-1} = 2 pi^{n/2} / Gamma(n/2) of S^{n-1}."""
    return 2.0 * math.pi ** (n / 2.0) / gamma_half_integer(n)


@dataclass(frozen=True)
class RadialGrid:
    """Cell-centered uniform radial grid.

    Attributes
    ----------
    n : int
        Spatial dimension, 1..5.
    r_max : float
        Truncation radius; fields are treated as zero beyond it.
    num_nodes : int
        Number of cells.
    """

    n: int
    r_max: float
    num_nodes: int
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (1 <= self.n <= 5):
            raise ValueError(f"dimension n must be in 1..5, got {self.n}")
        if self.num_nodes < 1:
            raise ValueError("num_nodes must be positive")
        if not (self.r_max > 0 and math.isfinite(self.r_max)):
            raise ValueError(f"r_max must be positive and finite, got {self.r_max}")
        h = self.r_max / self.num_nodes
        nodes = (np.arange(self.num_nodes) + 0.5) * h
        weights = unit_sphere_area(self.n) * nodes ** (self.n - 1) * h
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return (
            self.n == other.n
            and self.num_nodes == other.num_nodes
            and self.r_max == other.r_max
        )

    def __hash__(self):
        return hash((self.n, self.num_nodes, self.r_max))

    def dilated(self, l: float) -> "RadialGrid":
        """Grid for x -> x/l dilated samples: spacing and radius scale by l."""
        if not l > 0:
            raise ValueError(f"dilation factor must be positive, got {l}")
        return RadialGrid(self.n, self.r_max * l, self.num_nodes)

    @property
    def face_radii(self) -> np.ndarray:
        """Radii of the upper cell faces, k*h for k = 1..num_nodes."""
        return np.arange(1, self.num_nodes + 1) * self.h

    def face_areas(self) -> np.ndarray:
        """omega_{n-1} r^{n-1} evaluated on the upper faces."""
        return unit_sphere_area(self.n) * self.face_radii ** (self.n - 1)

    def integrate(self, values) -> float:
        """Weighted quadrature sum_j w_j values_j (midpoint rule on R^n)."""
        values = np.asarray(values)
        if values.shape != (self.num_nodes,):
            raise ValueError(
                f"expected {self.num_nodes} nodal values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("integrand contains non-finite values")
        return float(np.real(np.dot(self.weights, values)))

    def inner(self, f, g) -> complex:
        """Weighted inner product <f, g> = sum_j w_j f_j conj(g_j)."""
        return complex(np.dot(self.weights, np.asarray(f) * np.conj(g)))

    def norm(self, f) -> float:
        """Weighted L^2 norm."""
        f = np.asarray(f)
        return math.sqrt(float(np.dot(self.weights, (f * np.conj(f)).real)))

    def laplacian_diagonals(self):
        """Tridiagonal flux-form Laplacian (lower, diag, upper) bands.

        Row j of the operator is
            (A_j (u_{j-1} - u_j) + A_{j+1} (u_{j+1} - u_j)) / (r_j^{n-1} h^2)
        with face factor A_k = (k h)^{n-1}, zero flux through the r = 0 face
        and a Dirichlet ghost value beyond r_max.
        """
        if self.num_nodes < 3:
            raise ValueError("laplacian needs at least 3 nodes")
        N = self.num_nodes
        h = self.h
        area = np.arange(0, N + 1, dtype=float) ** (self.n - 1)  # (k h)^{n-1} / h^{n-1}
        area[0] = 0.0  # zero flux at the origin face (also covers n = 1)
        rpow = (np.arange(N) + 0.5) ** (self.n - 1)
        lower = np.zeros(N)
        upper = np.zeros(N)
        diag = -(area[:-1] + area[1:]) / (rpow * h * h)
        lower[1:] = area[1:-1] / (rpow[1:] * h * h)
        upper[:-1] = area[1:-1] / (rpow[:-1] * h * h)
        return lower, diag, upper

    def apply_laplacian(self, values: np.ndarray) -> np.ndarray:
        lower, diag, upper = self.laplacian_diagonals()
        out = diag * values
        out[1:] += lower[1:] * values[:-1]
        out[:-1] += upper[:-1] * values[1:]
        return out

    def gradient_energy(self, values: np.ndarray) -> float:
        """Face-based quadrature of int |grad u|^2 dx (Dirichlet beyond r_max).

        Identical, by construction, to -<Lap u, u> in the weighted product.
        """
        area = self.face_areas()
        diffs = np.empty(self.num_nodes, dtype=values.dtype)
        diffs[:-1] = values[1:] - values[:-1]
        diffs[-1] = -values[-1]
        return float(np.dot(area, (diffs * np.conj(diffs)).real)) / self.h


def integrate(grid: RadialGrid, values) -> float:
    """Module-level alias for RadialGrid.integrate."""
    return grid.integrate(values)


@dataclass
class RadialField:
    """Complex samples on a radial grid with a lazy (amp, dilation) pair.

    The field represents amp * f(x / dilation) where f is given by the raw
    samples on the undilated grid.  Keeping the pair symbolic makes the
    scaling identities for the charge/kinetic/interaction functionals hold to
    machine precision; `materialized` folds the pair into samples and grid.
    """

    grid: RadialGrid
    samples: np.ndarray
    amp: float = 1.0
    dilation: float = 1.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.shape != (self.grid.num_nodes,):
            raise ValueError(
                f"samples shape {self.samples.shape} does not match grid "
                f"({self.grid.num_nodes} nodes)"
            )
        if self.amp == 0 or not math.isfinite(self.amp):
            raise ValueError(f"amp must be real, nonzero and finite, got {self.amp}")
        if not (self.dilation > 0 and math.isfinite(self.dilation)):
            raise ValueError(f"dilation must be positive, got {self.dilation}")

    @property
    def is_materialized(self) -> bool:
        return self.amp == 1.0 and self.dilation == 1.0

    def materialized(self) -> "RadialField":
        """Fold (amp, dilation) into samples/grid; resets the pair to (1, 1)."""
        if self.is_materialized:
            return self
        return RadialField(
            self.grid.dilated(self.dilation), self.amp * self.samples, 1.0, 1.0
        )

    def scaled(self, a: float, l: float) -> "RadialField":
        """a * delta_l applied lazily: (delta_l f)(x) = f(x/l)."""
        if a == 0:
            raise ValueError("amplitude factor a must be nonzero")
        if not l > 0:
            raise ValueError(f"dilation factor l must be positive, got {l}")
        return RadialField(self.grid, self.samples, self.amp * a, self.dilation * l)

    def copy(self) -> "RadialField":
        return replace(self, samples=self.samples.copy())


def laplacian(field: RadialField) -> RadialField:
    """Discrete radial Laplacian u'' + (n-1)/r u' of a materialized field."""
    if not field.is_materialized:
        raise ValueError("laplacian expects a materialized field (amp=dilation=1)")
    return RadialField(field.grid, field.grid.apply_laplacian(field.samples))


@dataclass
class FieldPair:
    """State (u, v) of the coupled system; both components share one grid."""

    u: RadialField
    v: RadialField

    def __post_init__(self):
        gu = self.u.grid.dilated(self.u.dilation)
        gv = self.v.grid.dilated(self.v.dilation)
        if gu != gv:
            raise ValueError(
                "u and v live on different effective grids: "
                f"{gu.n}d/{gu.num_nodes}/{gu.r_max:g} vs {gv.n}d/{gv.num_nodes}/{gv.r_max:g}"
            )

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid.dilated(self.u.dilation)

    @property
    def n(self) -> int:
        return self.u.grid.n

    def materialized(self) -> "FieldPair":
        return FieldPair(self.u.materialized(), self.v.materialized())

    def copy(self) -> "FieldPair":
        return FieldPair(self.u.copy(), self.v.copy())


def pair_from_samples(grid: RadialGrid, u_samples, v_samples) -> FieldPair:
    return FieldPair(
        RadialField(grid, np.asarray(u_samples)),
        RadialField(grid, np.asarray(v_samples)),
    )


def gaussian_pair(grid: RadialGrid, amp_u=1.0, amp_v=1.0, width=1.0) -> FieldPair:
    """The stock positive radial pair amp * exp(-(r/width)^2)."""
    prof = np.exp(-((grid.nodes / width) ** 2))
    return pair_from_samples(grid, amp_u * prof, amp_v * prof)
