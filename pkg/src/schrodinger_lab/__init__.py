"""Finite-difference schemes for the 1-D periodic Schrodinger equation.

Library plus CLI harness for studying space-time L4 integrability of the
semidiscrete conservative and viscous schemes: exact spectral propagators,
mixed norms computed both by closed-form resonance sums and by quadrature,
and desk-scale experiments for norm blow-up, spectral filtering, and
numerical viscosity.
"""

from .spectral_core import (
    GridSpec,
    GridVector,
    SpectralVector,
    Quadruple,
    make_grid,
    dft,
    idft,
    lp_norm,
    laplacian_symbol,
    laplacian_symbol_values,
    phase_mismatch,
    phase_mismatch_factored,
    dissipation_sum,
    pair_phase_sequence,
    pair_phase_gap,
    pair_phase_difference,
)
from .schemes import (
    CONSERVATIVE,
    VISCOUS,
    SchemeConfig,
    EvolutionState,
    propagate,
    solution_at_nodes,
    ode_integrate,
    split_low_high,
)
from .spacetime_norms import (
    PhaseIntegralParams,
    MixedNormResult,
    damped_phase_integral,
    l4_mixed_analytic,
    l4_mixed_quadrature,
    resonant_quadruple_count,
    max_resonant_mismatch,
)
from .experiments import (
    PAIR_BOUND_FLOOR,
    SpectralWindow,
    spectral_window,
    window_initial_data,
    mixed_norm_ratio,
    PowerLawFit,
    fit_power_law,
    BlowupReport,
    run_blowup,
    blowup_mechanism,
    blowup_contrast,
    UniformityReport,
    run_filter,
    run_viscous,
    GapReport,
    gap_report,
    pair_bound_report,
)

__version__ = "0.1.0"
