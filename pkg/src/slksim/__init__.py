"""Dissipative quantum annealing on 1-D grids and site chains.

A norm-preserving nonlinear friction term (proportional to the wavefunction's
phase) damps quantum motion toward the ground state of the encoded cost
Hamiltonian.  The package provides the grid and chain propagators, the
potential constructors, an exact-diagonalization oracle, figure-style
experiment presets and a CLI.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .continuous import SlkParams, energy, reconstruct_w, run_continuous, slk_step
from .discrete import (
    AMP_FLOOR,
    DiscreteSlkParams,
    SinePacket,
    discrete_step,
    dissipation_rate,
    kostin_field,
    lattice_energy,
    run_discrete,
    sine_packet,
)
from .errors import (
    ConfigError,
    DegenerateStateError,
    DomainMismatchError,
    PotentialConstructionError,
    SimulationDivergedError,
    SlkSimError,
    SpectralError,
    StabilityError,
)
from .experiments import (
    PRESETS,
    EnsembleResult,
    ExperimentConfig,
    ExperimentResult,
    disorder_ensemble,
    execute,
    g0_for,
    preset_config,
    resolve_config,
    run_experiment,
    sigma0_for,
)
from .observables import (
    ObservableSeries,
    RunResult,
    Snapshot,
    arrival_probability,
    vacuum_overlap,
)
from .potentials import (
    TOY1_REFERENCE,
    DisorderSpec,
    DoubleWellParams,
    PotentialField,
    TripleGaussianGroundState,
    anderson_disorder,
    double_well,
    linear_tilt,
    tabulated,
    toy1_ground_state,
    toy1_potential,
)
from .spectral import (
    CHAIN_HOPPING,
    MAX_DENSE_SIZE,
    SpectrumResult,
    TridiagonalMatrix,
    build_hamiltonian_matrix,
    ground_state,
    propagate_linear,
)
from .state import (
    DensityPhase,
    Grid1D,
    Lattice,
    WaveFunction,
    inner,
    normalize,
    to_density_phase,
)
