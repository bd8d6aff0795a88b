"""Numerical laboratory for the two-component Camassa-Holm shallow water system.

Pseudo-spectral periodic discretization of the coupled system

    u_t + 3 u u_x - u_txx - 2 u_x u_xx - u u_xxx +/- H H_x = 0
    H_t + (H u)_x = 0

together with its neighbours (classical shallow water, the linearized wave
system, the single-component reduction at H = 0), conserved-quantity
diagnostics, and a discrete variational module that checks stationarity of
the transported Lagrangian/metric actions against the Euler-Lagrange
residual on flow paths in the circle diffeomorphism group.
"""

from .grid import (
    Field,
    Grid,
    NonFiniteError,
    boundary_support,
    dealias,
    diff,
    helmholtz_inverse,
    interp,
    make_grid,
    quadrature,
    trig_interp,
)
from .models import (
    CavitationError,
    MomentumState,
    Sign,
    State,
    ch_reduction_check,
    from_momentum,
    linear_rhs,
    reconstruct_diagnostics,
    sw1_rhs,
    swe_rhs,
    to_momentum,
    twoch_rhs,
    twoch_rhs_momentum,
)
from .functionals import (
    DiagnosticsRecord,
    Drift,
    compute_record,
    conserved_quantities,
    drift_report,
    kinetic_approx,
    kinetic_exact,
    potential,
)
from .integrators import (
    ConvergenceStudy,
    Model,
    SimConfig,
    Status,
    Trajectory,
    convergence_study,
    model_rhs,
    rk4_step,
    simulate,
    suggest_dt,
)
from .variational import (
    FlowPath,
    MonotonicityError,
    StationarityReport,
    TestPath,
    discrete_action,
    el_residual,
    eulerian_from_flow,
    first_variation,
    flow_from_velocity,
    max_admissible_epsilon,
    perturb_path,
    random_flow_path,
    random_test_path,
    residual_pairing,
    stationarity_test,
    subgroup_invariance_check,
)
from .scaling import PhysicalScales, nondim_to_phys, params, phys_to_nondim

__version__ = "0.1.0"
