"""Data-aware workflow nets: reachability, trace completion, and encodings into BC/ASP, PDDL and SMV."""

from .core_net import Marking, PetriNet, check_bounded, check_wf, fire, is_enabled, postset, preset
from .data_model import Assignment, DataModel, bind, unbind, validate_order
from .guard_lang import evaluate, parse as parse_guard, to_ground_dnf, to_text
from .model import DawNet, ReachGraph, State, build_rg, enabled, fire_data, restrict_finite, successors
from .modelfile import format_model, load_bundled, load_model, parse_model, save_model
from .solver import Goal, ReachResult, brute_force_oracle, solve
from .trace import Event, Trace, check_compliance, complete, inject, normalize_endpoints, project
from .tracefile import format_trace, load_trace, load_xes, parse_trace

__all__ = [
    "Assignment", "DataModel", "DawNet", "Event", "Goal", "Marking", "PetriNet", "ReachGraph", "ReachResult",
    "State", "Trace", "bind", "brute_force_oracle", "build_rg", "check_bounded", "check_compliance", "check_wf",
    "complete", "enabled", "evaluate", "fire", "fire_data", "format_model", "format_trace", "inject",
    "is_enabled", "load_bundled", "load_model", "load_trace", "load_xes", "normalize_endpoints", "parse_guard",
    "parse_model", "parse_trace", "postset", "preset", "project", "restrict_finite", "save_model", "solve",
    "successors", "to_ground_dnf", "to_text", "unbind", "validate_order",
]
