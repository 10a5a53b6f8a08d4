"""Photon statistics of a qubit ultrastrongly coupled to a single-mode resonator."""

from ._core import (
    DegenerateKernelError,
    DressedBasis,
    Error,
    IntegrationError,
    InvalidArgument,
    LabelAmbiguityError,
    NoCrossingError,
    NumericalError,
    SystemParams,
    diagonalize,
    driven_g2_tau,
    find_crossing,
    g2_zero_eigenstate,
    g2_zero_superposition,
    hamiltonian,
    parity_operator,
    positive_frequency,
    run_config,
    run_scenario,
    scenarios,
    sweep_g2_drive,
    sweep_g2_zero,
    sweep_labeled,
)

__version__ = "0.1.0"
