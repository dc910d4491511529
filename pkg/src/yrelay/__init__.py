"""Zero-forcing transceiver chain and degrees-of-freedom tools for the
K-user MIMO multi-way relay channel.

Layering, bottom up: `linalg` (normalized pseudo-inverses), `channel`
(seeded fading and noise), `alignment` (exact stream bookkeeping),
`transceiver` (one end-to-end round), `dofregion` + `simplex` (exact
rational region computations), `harness` (sweeps and reports).
"""

from .alignment import DofVector, StreamPlan, build_stream_plan, minimal_extension
from .channel import ChannelSet, SystemConfig, sample_channels
from .dofregion import (
    RegionSpec,
    construction_feasible,
    find_construction_gap,
    is_member,
    sum_dof_max,
    vertices_k3,
)
from .errors import (
    DimensionError,
    GenerationFailed,
    Infeasible,
    LpError,
    ModeUnavailable,
    NonIntegral,
    RankDeficient,
    ScalarUnderflow,
    TooLarge,
    Underdetermined,
    YRelayError,
)
from .harness import ExperimentConfig, SweepReport, derive_seed, fit_slope, run_sweep
from .linalg import normalized_left_mppi, normalized_right_mppi
from .transceiver import GENIE, RAW, RoundResult, effective_snr, run_round

__version__ = "0.1.0"

__all__ = [
    "ChannelSet",
    "DimensionError",
    "DofVector",
    "ExperimentConfig",
    "GENIE",
    "GenerationFailed",
    "Infeasible",
    "LpError",
    "ModeUnavailable",
    "NonIntegral",
    "RAW",
    "RankDeficient",
    "RegionSpec",
    "RoundResult",
    "ScalarUnderflow",
    "StreamPlan",
    "SweepReport",
    "SystemConfig",
    "TooLarge",
    "Underdetermined",
    "YRelayError",
    "build_stream_plan",
    "construction_feasible",
    "derive_seed",
    "effective_snr",
    "find_construction_gap",
    "fit_slope",
    "is_member",
    "minimal_extension",
    "normalized_left_mppi",
    "normalized_right_mppi",
    "run_round",
    "run_sweep",
    "sample_channels",
    "sum_dof_max",
    "vertices_k3",
    "__version__",
]
