"""Generalized-planning program synthesis, analysis and compilation."""

from ._engine import COMPILED
from .model import (Domain, GPProblem, Instance, State, goal_distance,
                    goals_hold, initial_state, parse_domain, parse_instance,
                    print_domain, print_instance)
from .program import (PartialProgram, ProgramLimits, candidate_instructions,
                      loop_abstraction, parse_program, print_program,
                      program_line, structural_validate)

__all__ = [
    "COMPILED", "Domain", "GPProblem", "Instance", "State",
    "goal_distance", "goals_hold", "initial_state", "parse_domain",
    "parse_instance", "print_domain", "print_instance", "PartialProgram",
    "ProgramLimits", "candidate_instructions", "loop_abstraction",
    "parse_program", "print_program", "program_line", "structural_validate",
]
