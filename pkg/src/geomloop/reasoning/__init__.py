"""Pluggable reasoners: scripted replay, the rule prover, and wire clients."""

from .base import (
    Reasoner,
    ReasonerInput,
    StepOutput,
    parse_step_output,
    serialize_step_output,
    step_output_to_dict,
)
from .facts import (
    EPSILON_FACT,
    Fact,
    FactSet,
    derive_facts,
    seed_facts,
    segment_ratio,
    validate_provenance,
)
from .prover import Goal, RuleProver, parse_goal, propose_construction, try_answer
from .remote import HttpReasoner, PipeReasoner, reasoner_input_to_wire, step_timeout
from .scripted import ScriptedReasoner

__all__ = [
    "EPSILON_FACT",
    "Fact",
    "FactSet",
    "Goal",
    "HttpReasoner",
    "PipeReasoner",
    "Reasoner",
    "ReasonerInput",
    "RuleProver",
    "ScriptedReasoner",
    "StepOutput",
    "derive_facts",
    "parse_goal",
    "parse_step_output",
    "propose_construction",
    "reasoner_input_to_wire",
    "seed_facts",
    "segment_ratio",
    "serialize_step_output",
    "step_output_to_dict",
    "step_timeout",
    "try_answer",
    "validate_provenance",
]
