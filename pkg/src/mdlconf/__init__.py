"""Configure service interfaces written as MDL terms.

Interfaces are choice/record terms with Boolean-guarded elements and tail
variables.  Wiring services together yields seniority constraints, and a
solution to those constraints fixes which functionality stays enabled and how
extra message fields flow through each service.
"""

from .constraints import Constraint, ConstraintSet, Origin, Topology, generate, load_topology, parse_bundle
from .derivation import DerivedService, ServiceStub, apply_shell, derive_interfaces, parse_shell, parse_stub
from .emit import ServiceConfig, emit_config, render_cfg
from .errors import MdlError
from .seniority import join, leq, meet
from .solver import Diverged, Sat, Solution, SolverConfig, Unsat, solve, verify
from .syntax import parse_term, render_term
from .terms import Choice, Element, Record, Symbol, Var

__all__ = [
    "Choice", "Constraint", "ConstraintSet", "DerivedService", "Diverged", "Element", "MdlError",
    "Origin", "Record", "Sat", "ServiceConfig", "ServiceStub", "Solution", "SolverConfig", "Symbol",
    "Topology", "Unsat", "Var", "apply_shell", "derive_interfaces", "emit_config", "generate", "join",
    "leq", "load_topology", "meet", "parse_bundle", "parse_shell", "parse_stub", "parse_term",
    "render_cfg", "render_term", "solve", "verify",
]
