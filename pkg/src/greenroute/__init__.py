"""Fuel- and emission-aware vehicle routing with time windows and
time-of-day speed limits: model, annealer, exact oracle, MILP export."""

from .encoding import SolutionParseError, decode, encode
from .exact import ExactResult, big_m, export_milp, solve_exact, usable_edges
from .files import (FileFormatError, load_instance, read_solution,
                    write_instance, write_solution)
from .instgen import GenerationError, GenSpec, generate
from .model import (Instance, ModelError, Node, ObjectiveBreakdown,
                    FeasibilityReport, RouteTiming, Solution, SpeedLevel,
                    Violation, Visit, broadcast_alpha, check_feasibility,
                    edge_cost, euclidean_distances, evaluate,
                    route_from_nodes, simulate_route, solution_from_routes,
                    verify_route_timing)
from .sa import (AnnealResult, AnnealTrace, NeighborMove, SAConfig, anneal,
                 initial_solution, neighbor)

__version__ = "0.1.0"
