"""mmWave NOMA downlink toolkit.

Building blocks: uniform-linear-array steering and patterns (arrays), the
flat-top beam abstraction (ideal_beams), constant-modulus beam synthesis
(beam_design), SIC rate computation (rates), power and beam-gain allocation
(allocation), user pairing (pairing), and hybrid SDMA+NOMA evaluation
(hybrid). The cli module reproduces the comparison sweeps as CSV files.
"""

from .arrays import (
    ArrayGeometry,
    Awv,
    ChannelState,
    UserSpec,
    average_gain,
    beam_gain,
    beam_gains,
    pattern,
    sample_channel,
    steering_vector,
)
from .ideal_beams import BeamSpec, IdealMultibeam, ideal_gain, ideal_gain_at, required_width
from .beam_design import (
    BeamTarget,
    DesignResult,
    cm_optimize_multibeam,
    exhaustive_cm_oracle,
    steer_single,
    subarray_multibeam,
    wide_beam,
)
from .rates import GroupMember, NomaGroup, RateReport, mui_rates, noma_rates, tdma_rates
from .allocation import (
    AllocationProblem,
    AllocationSolution,
    alternating_optimize,
    brute_force_alloc_oracle,
    fixed_split,
    joint_power_gain_2user,
    max_sum_rate_2user,
)
from .pairing import (
    PairingInstance,
    PairingPlan,
    angle_merge,
    evaluate_plan,
    exhaustive_pairing,
    strong_weak_heuristic,
)
from .hybrid import (
    HybridConfig,
    RfChainPlan,
    design_chain,
    mode1_evaluate,
    mode1_interference,
    mode2_evaluate,
    mode2_interference,
    mode2_precoder,
)
from .config import ScenarioConfig, SweepSpec, UserConfig, load_config
from .errors import (
    ConfigError,
    DegenerateChannelError,
    InfeasibleScenarioError,
    InfeasibleTargetsError,
    SearchSpaceError,
)

__version__ = "0.1.0"
