"""Value-of-information arbitration between depth-limited planning and Q-learning on tabular MDPs."""

from .agents import (
    ArbiterConfig,
    EpisodeRecord,
    ReplayBuffer,
    StepTrace,
    arbiter_decide,
    q_update,
    run_episode_arbiter,
    run_episode_qlearning,
    run_episode_replay,
    voi,
)
from .environment import ContractViolation, TabularMDP, TaxiEnv, TaxiState, Transition, decode, encode
from .harness import ExperimentSummary, compare, run_experiment, run_single, summarize
from .value_store import QStore, SoftmaxParams
from .world_model import PlanConfig, WorldModel

__all__ = [
    "ArbiterConfig", "EpisodeRecord", "ReplayBuffer", "StepTrace", "arbiter_decide", "q_update",
    "run_episode_arbiter", "run_episode_qlearning", "run_episode_replay", "voi",
    "ContractViolation", "TabularMDP", "TaxiEnv", "TaxiState", "Transition", "decode", "encode",
    "ExperimentSummary", "compare", "run_experiment", "run_single", "summarize",
    "QStore", "SoftmaxParams", "PlanConfig", "WorldModel",
]
