"""Artificial noise alignment for wireless X networks with confidential messages."""

from .bounds import (
    achieved_sdof_finite_n,
    bound_set,
    sdof_lower_xncm,
    sdof_upper_xncm,
    sdof_upper_xncm_ee,
)
from .linalg import PreconditionError, noise_dominance, numeric_rank, span_contained
from .metrics import (
    equivocation_fraction,
    gaussian_mi,
    leakage,
    rate_report,
    receiver_rate,
    sdof_slope,
)
from .network import (
    EVE,
    ExtendedChannelSet,
    NetworkSpec,
    SwitchPattern,
    Variant,
    blind_switch_pattern,
    build_switching_channels,
    draw_varying_channels,
)
from .schemes import (
    BeamformingPlan,
    Scheme,
    StreamGroup,
    build_asymptotic_ana,
    build_blind_ana,
    build_mx2_ana,
    effective_channels,
)
from .verify import AlignmentReport, check_alignment

__version__ = "0.1.0"
