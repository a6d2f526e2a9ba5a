"""qstsim: exact simulator for qudit state transfer through an XXZ spin chain.

Library layout:

- spin_model: chain parameters, spin operators, engineered field, local terms
- sectors: fixed-magnon bases and block Hamiltonian assembly
- propagator: spectral time evolution and the receiver reduction
- effective: analytic free-boson track (mode spectrum, optimal time, swap phase)
- fidelity: qudit sampling, transfer channels, average fidelity (MC and exact)
- thermal: Gibbs bus states and finite-temperature transfer
- cli: experiment runner behind the `qst` command
"""

from .spin_model import (
    ChainParams,
    FieldProfile,
    SpinOperators,
    spin_operators,
    field_profile,
    build_hamiltonian_terms,
)
from .sectors import (
    SectorBasis,
    OperatorMatrix,
    SectorState,
    enumerate_sector,
    assemble_sector_hamiltonian,
    dense_hamiltonian,
    total_magnon_operator,
    embed_state,
)
from .propagator import (
    EigenSystem,
    DensityMatrix,
    eigendecompose,
    evolve_pure,
    evolve_density,
    reduce_to_receiver,
)
from .effective import (
    EffectiveSpectrum,
    sine_transform,
    effective_spectrum,
    bosonized_hamiltonian,
    effective_three_level,
    effective_dynamics_prediction,
    resonance_check,
)
from .fidelity import (
    QuditState,
    HurwitzAngles,
    TransferChannel,
    hurwitz_state,
    sample_hurwitz_angles,
    sample_fubini_study,
    state_fidelity,
    run_transfer,
    reconstruct_channel,
    average_fidelity_exact,
    average_fidelity_mc,
)
from .thermal import (
    ThermalConfig,
    thermal_bus_state,
    thermal_branches,
    thermal_transfer,
    temperature_sweep,
)

__version__ = "0.1.0"
