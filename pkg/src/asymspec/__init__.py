"""Spectral asymmetry toolkit for -u'' + q(x) u = lam u on [0, 1]."""

__version__ = "0.1.0"

from .asymmetry import asym_eval, asym_leading, dtn, dtn_commutator_norm, odd_identity_residual, symmetry_test
from .errors import (
    AsymspecError,
    ConvergenceError,
    DomainError,
    FormatError,
    InconsistencyError,
    PoleError,
    PreconditionError,
)
from .inverse import ReconstructionReport, ReconstructionTarget, initial_guess, isospectral_partner, reconstruct, verify_roundtrip
from .potential import Potential, evaluate, even_part, l2_distance, l2_norm, odd_part, reflect, shift
from .propagator import FundamentalData, fundamental, prufer_count, transfer
from .sampling import (
    SampledEntireFunction,
    a_form,
    e_function,
    interpolate,
    k_bound_check,
    k_kernel,
    k_kernel_product_oracle,
    kernel_one,
    resample,
    resolvent_identity_residual,
)
from .spectrum import SpectralTriple, dirichlet_eigenvalues, estimate_mean, norming_constants, spectral_triple

__all__ = [
    "asym_eval",
    "asym_leading",
    "dtn",
    "dtn_commutator_norm",
    "odd_identity_residual",
    "symmetry_test",
    "AsymspecError",
    "ConvergenceError",
    "DomainError",
    "FormatError",
    "InconsistencyError",
    "PoleError",
    "PreconditionError",
    "ReconstructionReport",
    "ReconstructionTarget",
    "initial_guess",
    "isospectral_partner",
    "reconstruct",
    "verify_roundtrip",
    "Potential",
    "evaluate",
    "even_part",
    "l2_distance",
    "l2_norm",
    "odd_part",
    "reflect",
    "shift",
    "FundamentalData",
    "fundamental",
    "prufer_count",
    "transfer",
    "SampledEntireFunction",
    "a_form",
    "e_function",
    "interpolate",
    "k_bound_check",
    "k_kernel",
    "k_kernel_product_oracle",
    "kernel_one",
    "resample",
    "resolvent_identity_residual",
    "SpectralTriple",
    "dirichlet_eigenvalues",
    "estimate_mean",
    "norming_constants",
    "spectral_triple",
]
