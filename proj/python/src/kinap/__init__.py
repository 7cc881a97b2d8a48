"""Python interface to the kinap asymptotic-preserving kinetic solver."""

from ._core import (
    Collision,
    DiscreteMaxwellian,
    ExperimentConfig,
    Formulation,
    HeatScheme,
    InitialKind,
    InvariantViolation,
    MicroMacroState,
    SchemeConfig,
    SchemeSystem,
    SpatialMesh,
    VelocityMesh,
    compute_eta_admissible,
    decompose,
    density,
    estimate_oscillation_period,
    fit_decay_rate,
    gaussian_bgk,
    gaussian_fp,
    gaussian_poincare_suite,
    generate_initial,
    heat_step,
    init_state,
    nongaussian_bgk,
    poisson_solve,
    reconstruct,
    run,
    simulate,
    state_norms,
    step_direct,
    torus_poincare_constant,
    torus_poincare_suite,
    total_mass,
    verify_gaussian_poincare,
    verify_torus_poincare,
    weighted_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
