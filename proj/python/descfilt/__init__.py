"""Minimax state estimation for linear descriptor systems."""

from ._descfilt import (
    BatchProblem,
    BatchSolution,
    DescriptorModel,
    Error,
    EstimateReport,
    FilterState,
    InformationalSet,
    KalmanState,
    assemble,
    augment_ode,
    budget,
    check_regularity,
    decomposition_check,
    direction_bounds,
    ell_error,
    estimate,
    init,
    kalman_init,
    kalman_step,
    load_model_spec,
    membership,
    oscillator_inputs,
    oscillator_model,
    parse_model_spec,
    pinv,
    range_projector,
    run,
    simulate,
    solve,
    step,
    sym_rank,
    validate,
    value_function,
)

__all__ = [name for name in dir() if not name.startswith("_")]
