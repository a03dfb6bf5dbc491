"""Dephasing dynamics of a two-site polaron qubit in a collective bosonic
bath, with an exact truncated-bath reference and bang-bang pulse protection.

Units: the Gaussian cutoff of the Ohmic spectral density is the unit of
energy and its inverse the unit of time.
"""

from .bath import (
    BathModel,
    KernelTable,
    build_kernel_table,
    effective_hopping_ratio,
    kernel_cos,
    kernel_sin,
    kernel_table_from_modes,
)
from .dynamics import (
    DensityMatrixST,
    Trajectory,
    coherence,
    evolve_closed_form,
    evolve_ode,
    lamb_shift_vanishes,
    population_difference,
)
from .errors import (
    ConfigError,
    InvariantError,
    NumericalError,
    PolaronDecoError,
    PositivityError,
    QuadratureError,
    ZeroCoherenceError,
)
from .numerics import (
    QuadratureSpec,
    TimeGrid,
    cumulative_trapezoid,
    dawson,
    dawson_sine,
    integrate_semiinf,
    ode_step_rk4,
)
from .oracle import (
    FullState,
    PulseSchedule,
    TruncatedBathConfig,
    apply_pulse,
    build_hamiltonian,
    compare_with_master_equation,
    evolve_exact,
    exact_decoherence_reference,
    lang_firsov_check,
    ohmic_mode_config,
    run_bangbang,
    trace_distance,
)
from .rates import RateTable, build_rate_table, build_rate_table_from_kernels, rate_at

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
