"""Simulator and design toolkit for a circulant-protected two-qubit gate.

The package builds the driven two-spin Hamiltonians, integrates the
time-dependent Schrödinger equation along adiabatic ramp schedules, tunes
detunings so the accumulated branch phases quantize, applies
counterdiabatic acceleration, and computes the trapped-ion effective
spin-spin coupling that realizes the model.
"""

from .core import (
    BASIS_LABELS,
    eigh,
    expm_i,
    from_khz,
    normalize,
    tensor,
    to_khz,
    unitarity_defect,
)
from .dynamics import (
    EvolutionResult,
    RampSchedule,
    adiabatic_phases,
    coefficients_at,
    hamiltonian_at,
    propagate,
    rotating_basis_state,
)
from .errors import (
    ChainInstabilityError,
    CirculantGateError,
    ConfigError,
    ConvergenceError,
    DegeneracyError,
    NonHermitianError,
    NonUnitaryError,
    ResonanceError,
)
from .gatecheck import (
    TargetGate,
    entangled_fidelity,
    entangled_phases,
    gate_fidelity,
    target_gate,
    transition_map,
)
from .hamiltonian import (
    CirculantSpec,
    DetuningPair,
    GeneralParams,
    build_case1,
    build_case2,
    build_detuning,
    build_general,
    build_rabi_controlled,
    fourier_state,
    is_circulant,
)
from .iontrap import (
    DriveParams,
    IonChain,
    build_chain,
    dispersive_margin,
    effective_J,
    equilibrium_positions,
    lamb_dicke,
    transverse_modes,
)
from .spectral import (
    BranchValues,
    SpectralPath,
    Spectrum,
    adiabaticity_margin,
    analytic_case1,
    analytic_case2,
    final_case2,
    track,
)
from .sta import (
    H3Eigenbasis,
    branch_phases,
    build_hcd,
    cd_rate,
    h3_eigenbasis,
    propagate_with_cd,
)
from .tuner import TuneResult, TuneTarget, decoupled_guess, phase_residual, tune

__version__ = "0.1.0"
