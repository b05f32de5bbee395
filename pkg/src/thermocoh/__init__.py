"""Coherence-aware thermodynamic resource theory: Renyi free energies, free
coherences, sampled thermal operations and the checks built on them."""
__version__ = "0.1.0"

from .errors import InputError, NumericError, ThermocohError
from .linops import HermitianOperator, hermitian_eig, partial_trace, tensor_product, trace_distance
from .states import (
    DensityMatrix,
    Hamiltonian,
    ThermalPair,
    clock_hamiltonian,
    coherent_thermal_state,
    dephase,
    gibbs_state,
    joint_hamiltonian,
    work_bit,
)
from .divergences import (
    DEFAULT_ALPHAS,
    classical_renyi,
    free_coherence,
    free_energy,
    free_energy_split,
    relative_entropy,
    renyi_divergence,
)
from .thermalops import (
    BathSpec,
    QuantumChannel,
    activation_demo,
    counterexample_search,
    covariance_defect,
    equilibrium_work_bound,
    ladder_bath,
    monotone_report,
    sample_thermal_operation,
    second_law_sweep,
    work_bit_transform_check,
    work_locking_check,
)
from .purity import embedding_map, majorizes, rationalize_gibbs, trumping_necessary_check
from .tensorpower import PureQubit, bound_report, free_coherence_pure_power, locking_ratio
