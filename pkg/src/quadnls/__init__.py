"""Numerical laboratory for the quadratic-interaction Schrodinger system

    i u_t + Lap u = -2 v conj(u),   i v_t + kappa Lap v = -u^2

on radially symmetric R^n, 1 <= n <= 5: ground states by constrained descent
on the Weinstein quotient, the sharp Gagliardo-Nirenberg constant, charge- and
energy-conserving time integration, virial diagnostics, and the sharp
global-existence / blow-up classification of initial data.
"""

from ._kernels import BACKEND as kernel_backend
from .grid import FieldPair, RadialField, RadialGrid, gaussian_pair, integrate, laplacian
from .functionals import (
    FunctionalValues,
    SystemParams,
    action,
    charge,
    energy,
    evaluate,
    gauge_rotate,
    interaction,
    kinetic,
    kinetic_via_laplacian,
    normalize_system,
    rearrange,
    scale,
    weinstein,
)
from .ground_state import (
    GroundStateResult,
    elliptic_residual,
    load_ground_state,
    regrid,
    rescale_omega,
    save_ground_state,
    sharp_constant,
    solve,
    verify_pohozaev,
)
from .evolution import (
    CutoffProfile,
    EvolveConfig,
    StepFailure,
    TrajectoryRecord,
    detect_blowup,
    evolve,
    localized_virial_rhs,
    step,
    virial_rhs,
    virial_weight,
)
from .dichotomy import (
    ComparisonSetup,
    DichotomyReport,
    classify_data,
    comparison_classify,
    run_experiment,
    thresholds,
)

__version__ = "0.1.0"
