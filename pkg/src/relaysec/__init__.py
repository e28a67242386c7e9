"""Secrecy-rate bounds for relay channels with orthogonal components and a passive eavesdropper."""

__version__ = "0.1.0"

from ._accel import backend
from .dmc import (
    AuxiliaryScheme,
    EavesdropperCase,
    FullDuplexDmc,
    OrthogonalDmc,
    split_decoding_gap,
    example_channel,
    maximize_inner_bound,
    outer_bound_expression,
    pdf_inner_bound,
    randomized_pdf_inner_bound,
    validate_factorization,
)
from .errors import (
    ArgumentError,
    CapacityGuardError,
    ConfigError,
    DegenerateGeometryError,
    InfeasibleParamsError,
    NumericDomainError,
    PreconditionError,
    RelaySecError,
)
from .gaussian import (
    GaussianOrthogonalChannel,
    InputCovariance,
    MimomeInstance,
    deaf_relay_capacity,
    genie_outer_rate,
    joint_output_covariance,
    mimome_secrecy,
    nf_inner_rate,
    pdf_inner_rate,
    wiretap_baseline,
)
from .optimizer import CovarianceParams, optimize_bound, to_covariance
from .probability import (
    FiniteAlphabet,
    GaussianJoint,
    JointPmf,
    entropy,
    gaussian_capacity,
    gaussian_mutual_information,
    mutual_information,
)
from .search import SearchConfig, maximize
from .sweep import Geometry, emit_table, gains_from_geometry, sweep_relay_position
