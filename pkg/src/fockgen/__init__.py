"""Fock-state preparation by resonant atom-cavity interactions.

N excited two-level atoms cross a Gaussian cavity mode one after another;
each one is held resonant for a Stark-switched window whose pulse area makes
it deposit exactly one photon. This package compiles those windows, runs the
ideal protocol, and quantifies how Gaussian interaction-time jitter degrades
the fidelity of the final |N> state.
"""

from fockgen.errors import (
    FockgenError,
    InfeasibleTargetError,
    QuadratureError,
    SlotOverflowError,
    TruncationError,
)
from fockgen.hilbert import (
    FieldDensityMatrix,
    JointState,
    emission_channel,
    fock_fidelity,
    jc_propagate,
    success_branch,
)
from fockgen.mode_profile import (
    CavityParams,
    PulseWindow,
    coupling_at,
    pulse_area_closed,
    pulse_area_numeric,
    solve_symmetric_window,
)
from fockgen.noise import (
    NoiseModel,
    SimResult,
    analytic_fidelity,
    monte_carlo_fidelity,
    per_step_probability,
    quadrature_fidelity,
    timing_pdf,
)
from fockgen.protocol import (
    BudgetReport,
    Schedule,
    compile_schedule,
    decoherence_budget,
    run_ideal,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetReport",
    "CavityParams",
    "FieldDensityMatrix",
    "FockgenError",
    "InfeasibleTargetError",
    "JointState",
    "NoiseModel",
    "PulseWindow",
    "QuadratureError",
    "Schedule",
    "SimResult",
    "SlotOverflowError",
    "TruncationError",
    "analytic_fidelity",
    "compile_schedule",
    "coupling_at",
    "decoherence_budget",
    "emission_channel",
    "fock_fidelity",
    "jc_propagate",
    "monte_carlo_fidelity",
    "per_step_probability",
    "pulse_area_closed",
    "pulse_area_numeric",
    "quadrature_fidelity",
    "run_ideal",
    "solve_symmetric_window",
    "success_branch",
    "timing_pdf",
]
