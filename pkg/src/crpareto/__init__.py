"""Pareto fronts for multi-objective cognitive-radio channel allocation."""

from .bip import LinearObjective, SideConstraint, SolveResult, Status, solve, solve_lexicographic
from .errors import BudgetExceeded, ConfigError
from .network import (ChannelModel, Point, PrimaryUser, Topology, build_channel_model,
                      compute_interference_radius, distance, generate_topology)
from .pareto import (GridSpec, ParetoPoint, ParetoSet, PayoffTable, brute_force_front,
                     build_subproblem, dominates, epsilon_constraint_solve, grid_points,
                     nondominated_filter, payoff_table)
from .problem import Allocation, AllocationProblem, build_problem, is_feasible, reward_vector

__version__ = "0.1.0"
