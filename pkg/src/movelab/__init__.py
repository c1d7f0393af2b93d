"""Stochastic domination, noise channels and extraction for measures on {0,1}^n."""

__version__ = "0.1.0"

from .determinantal import (
    KernelFunction,
    WindowSpec,
    fourier_coefficient,
    geometric_mean,
    harmonic_mean,
    ones_probability,
    window_measure,
)
from .domination import (
    AnalysisResult,
    DominationCertificate,
    UpSet,
    dominates,
    dominates_bruteforce,
    dominates_symmetric,
    enumerate_up_sets,
    p_max,
    rigidity,
    sup_eps_down,
    sup_eps_up,
)
from .errors import *  # noqa: F401,F403
from .extraction import (
    composite_channel,
    corollary_check,
    delta_bound,
    extract_both,
    extract_down,
    extract_up,
    max_extract_eps,
    rigidity_sufficient_condition,
)
from .families import (
    block_product,
    conditioned_binomial,
    hajek_block,
    mixture_example,
    nonrigid_block,
    paired_doubling,
    parity_after_noise,
)
from .io import dumps_measure, loads_measure, read_measure, write_measure
from .measure import (
    EXACT,
    FLOAT,
    CountDistribution,
    GroundSet,
    Measure,
    NoiseChannel,
    SignedVector,
    apply_channel,
    complement,
    compose_channels,
    condition,
    count_distribution,
    delta_ones,
    delta_zero,
    from_entries,
    ground,
    mixture,
    point_mass,
    product_measure,
    support_is_up_set,
    thicken,
    thin,
)
from .tolerance import (
    ToleranceReport,
    downwards_fkg_check,
    holley_lower_bound_check,
    insertion_tolerance,
    lemma_fkg_amplification_check,
)
