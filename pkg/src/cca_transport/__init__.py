"""Photon transport in one-dimensional coupled-cavity arrays.

Exact sector-by-sector evolution under the nearest-neighbour hopping
Hamiltonian, W/NOON event detection, entangled-pair transfer, and photon loss
through a Lindblad master equation.
"""
from .errors import DimensionCapError, NumericalGuardError, PeriodUnavailableError
from .fock_space import FockBasis, enumerate_sector, ladder_matrix, number_operator
from .spectral import (
    ModelParams,
    SpectralData,
    build_spectral,
    evolution_period,
    mode_weights,
    single_particle_propagator,
)
from .states import (
    EntangledPairSpec,
    PureState,
    concurrence,
    entangled_pair_state,
    fock_product_state,
    weak_coherent_product,
)
from .evolution import (
    ProbabilitySeries,
    SectorEvolver,
    assemble_sector_hamiltonian,
    closed_form_survival,
    evolve,
    multinomial_amplitude_oracle,
    probability_series,
    survival_probability,
)
from .detection import (
    DetectionReport,
    TransferResult,
    find_noon_times,
    find_w_times,
    peak_transfer_search,
    transfer_probability_closed_form,
    transfer_probability_numeric,
)
from .lindblad import (
    DensityMatrix,
    LossParams,
    dissipative_transfer_probability,
    initial_density,
    integrate,
    lindblad_rhs,
)

__version__ = "0.1.0"
