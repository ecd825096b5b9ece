from .distributions import (Bernoulli, Beta, Categorical, Discrete, Distribution,
                            DistributionError, Flip, Gamma, Normal, UniformContinuous,
                            UniformDiscrete, categorical, discrete, make_distribution,
                            observe_star, sample_star)
from .processes import BetaBernoulli, RandomProcess, absorb, produce
from .rng import Rng
from .state import (State, add_log_weight, get_mem, in_mem, initial_state, retrieve,
                    set_mem, set_result, store)
from .values import HashMap, PList, equals, pr_str, to_json, truthy

__all__ = [
    "Bernoulli", "Beta", "BetaBernoulli", "Categorical", "Discrete", "Distribution",
    "DistributionError", "Flip", "Gamma", "HashMap", "Normal", "PList", "RandomProcess",
    "Rng", "State", "UniformContinuous", "UniformDiscrete", "absorb", "add_log_weight",
    "categorical", "discrete", "equals", "get_mem", "in_mem", "initial_state",
    "make_distribution", "observe_star", "pr_str", "produce", "retrieve", "sample_star",
    "set_mem", "set_result", "store", "to_json", "truthy",
]
