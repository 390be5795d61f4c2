"""Trajectory replay: emits a fixed step sequence verbatim."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ReasonerExhausted
from .base import ReasonerInput, StepOutput, parse_step_output


class ScriptedReasoner:
    """Replays a prerecorded trajectory step by step."""

    def __init__(self, steps: list[StepOutput] | tuple[StepOutput, ...]):
        self.steps = tuple(steps)
        self.name = "scripted"

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedReasoner":
        """Load a JSON array of two-field step objects."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, list):
            raise ValueError("script file must hold a JSON array of steps")
        return cls([parse_step_output(item) for item in data])

    def next_step(self, inp: ReasonerInput) -> StepOutput:
        if inp.step_index >= len(self.steps):
            raise ReasonerExhausted(
                f"script has {len(self.steps)} steps, asked for step {inp.step_index}"
            )
        return self.steps[inp.step_index]
