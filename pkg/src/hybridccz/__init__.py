"""Simulator for a hybrid controlled-controlled-Z gate: two parity-encoded
photonic qubits in microwave cavities controlling a superconducting
four-level target, from the ideal diagonal-phase picture down to the full
lossy master-equation model."""

from .spaces import CompositeSpace
from .operators import (Operator, annihilation, creation, number, identity,
                        level_transition, level_projector, lift, commutator,
                        expectation, outer)
from .states import StateVector, DensityMatrix
from .encodings import (CatSpec, ParityState, cat_pair, fock_pair,
                        parity_operator, validate_parity)
from .device import (CouplingSet, DecoherenceRates, Detunings, DeviceFrequencies,
                     DeviceModel, DerivedCouplings, detunings, derived_couplings,
                     dipole_scaled_couplings, required_g2)
from .hamiltonians import (TermSum, h_ideal, h_full, h_dispersive_exchange,
                           h_dispersive_diagonal, h_gate_phase)
from .lindblad import (CollapseChannel, EvolutionResult, IntegratorConfig,
                       LindbladModel, evolve_master, evolve_schrodinger,
                       fidelity, liouvillian_apply, standard_channels)
from .gate import (GateSchedule, PhaseTable, average_gate_fidelity,
                   ideal_gate_unitary, phase_factor, schedule_from_model,
                   truth_table)
from .experiments import (SweepSpec, ghz_input_state, ghz_target_state,
                          run_ghz, run_sweep, validate_effective)
from .config import RunConfig

__version__ = "0.1.0"
