"""Life-span laboratory for the 1-D Schrodinger equation with power damping/growth."""

from .bounds import BoundReport, lifespan_bound
from .grids import (
    ComplexField,
    Grid1D,
    NormReport,
    apply_galilei,
    apply_quadratic_phase,
    field_norms,
    fourier_transform,
    free_propagate,
    inverse_fourier,
    scaled_grid,
    spectral_derivative,
)
from .matching import (
    ApproxState,
    approximate_solution,
    approximation_gap,
    blend_cutoff,
    blend_cutoff_deriv,
    matching_gap,
    profile_solution,
    residual,
    residual_budget,
)
from .mollify import Kernel, bump_kernel, mollification_error, mollify
from .profile import (
    ModelParams,
    ProfileData,
    ProfileEval,
    eval_profile,
    matching_horizon,
    physical_time,
    prepare_profile,
    profile_blowup_time,
    profile_residual,
    profile_time,
    rk4_profile_oracle,
)
from .solver import (
    LifespanEstimate,
    SolverConfig,
    Trajectory,
    estimate_lifespan,
    evolve,
    initial_field,
    nonlinear_substep,
    strang_step,
)
from .sweep import LifespanRecord, SweepResult, measure_lifespan, sweep_lifespan

__version__ = "0.1.0"
