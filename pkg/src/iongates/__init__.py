"""Numerical simulator for trapped-ion two-qubit gates.

Implements a lightshift-based gate (double resonance of a strongly driven
carrier with a motional sideband) next to sideband-based reference schemes,
with exact full-Hamiltonian propagation on truncated Fock spaces, pulse
scheduling for complete C-NOT sequences, fidelity sweeps and the
usable-mode bookkeeping for longer ion chains.
"""

from .statespace import (BasisDescriptor, StateVector, basis_state,
                         build_ladder, build_pauli, dressed_rotation,
                         state_index)
from .hamiltonians import (SystemConfig, full_hamiltonian,
                           lamb_dicke_hamiltonian, dressed_picture_hamiltonian,
                           effective_jc_hamiltonian, cz_effective_hamiltonian,
                           leakage_estimate, single_ion_config,
                           two_ion_chain_config)
from .propagator import (AutonomousPropagator, FrameTransform,
                         PropagationError, PropagationSettings,
                         analytic_jc_oracle, evolve, evolve_series)
from .gates import (Pulse, PulseSchedule, cz_cnot_schedule, lb_cnot_schedule,
                    run_schedule, schedule_basis, schedule_unitary,
                    truth_table)
from .metrics import (FidelitySpec, SweepResult, intensity_stability_band,
                      swap_fidelity, sweep, switching_rate)
from .modespectrum import ModeTable, eta_max, max_rate, mode_table

__version__ = "0.1.0"

__all__ = [
    "AutonomousPropagator", "BasisDescriptor", "FidelitySpec",
    "FrameTransform", "ModeTable", "PropagationError", "PropagationSettings",
    "Pulse", "PulseSchedule", "StateVector", "SweepResult", "SystemConfig",
    "analytic_jc_oracle", "basis_state", "build_ladder", "build_pauli",
    "cz_cnot_schedule", "cz_effective_hamiltonian",
    "dressed_picture_hamiltonian", "dressed_rotation",
    "effective_jc_hamiltonian", "eta_max", "evolve", "evolve_series",
    "full_hamiltonian", "intensity_stability_band", "lamb_dicke_hamiltonian",
    "lb_cnot_schedule", "leakage_estimate", "max_rate", "mode_table",
    "run_schedule", "schedule_basis", "schedule_unitary", "single_ion_config",
    "state_index", "swap_fidelity", "sweep", "switching_rate",
    "truth_table", "two_ion_chain_config",
]
