"""Reasoner protocol: the pluggable brain of the episode loop.

A reasoner maps (problem text, current form, history) to one step: a natural
language justification plus one executable action. Step outputs serialize to
a strict two-field JSON schema:

    {"reasoning": "<nonempty text>", "action": {<action command>}}

Any extra or missing key, empty reasoning, or malformed action is a schema
failure (this is what format scoring checks).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from ..actions import Action, action_to_dict, parse_action, serialize_action
from ..errors import ActionSchemaError
from ..logic_form import LogicForm


@dataclass(frozen=True)
class StepOutput:
    reasoning: str
    action: Action


@dataclass(frozen=True)
class ReasonerInput:
    problem_text: str
    current_form: LogicForm
    history: tuple[StepOutput, ...]
    step_index: int

    def __post_init__(self):
        if self.step_index != len(self.history):
            raise ValueError("step_index must equal the history length")


@runtime_checkable
class Reasoner(Protocol):
    name: str

    def next_step(self, inp: ReasonerInput) -> StepOutput: ...


def parse_step_output(payload: str | dict) -> StepOutput:
    """Strict two-field parse; raises ActionSchemaError on any deviation."""
    if isinstance(payload, str):
        try:
            data = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise ActionSchemaError(f"step output is not valid JSON: {exc}") from exc
    else:
        data = payload
    if not isinstance(data, dict):
        raise ActionSchemaError("step output must be a JSON object")
    if set(data) != {"reasoning", "action"}:
        raise ActionSchemaError(
            f"step output must have exactly the keys 'reasoning' and 'action', got {sorted(data)}"
        )
    reasoning = data["reasoning"]
    if not isinstance(reasoning, str) or not reasoning.strip():
        raise ActionSchemaError("'reasoning' must be nonempty text")
    return StepOutput(reasoning=reasoning, action=parse_action(data["action"]))


def step_output_to_dict(step: StepOutput) -> dict:
    return {"reasoning": step.reasoning, "action": action_to_dict(step.action)}


def serialize_step_output(step: StepOutput) -> str:
    """Canonical one-line JSON for a step output."""
    action_json = serialize_action(step.action)
    reasoning_json = json.dumps(step.reasoning, ensure_ascii=False)
    return f'{{"reasoning":{reasoning_json},"action":{action_json}}}'
