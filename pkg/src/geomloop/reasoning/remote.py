"""External reasoners over a wire protocol.

One stateless request per step; the history travels with the request, so any
agent can be plugged in. Two transports:

  HTTP   POST <endpoint> with the JSON body below; the response body is one
         two-field step object.
  pipe   a child process reading one JSON request per line on stdin and
         writing one two-field step object per line on stdout.

Request body:

    {
      "problem_text": "...",
      "logic_form": { ...canonical logic form... },
      "svg": "<svg ...>",
      "history": [{"reasoning": "...", "action": {...}}, ...],
      "step_index": 2
    }

Response body: {"reasoning": "...", "action": {...}} exactly. Anything else
is a protocol failure carrying the raw text (scored as a format failure).

The per-step deadline defaults to 120 seconds and can be overridden with the
GEOMLOOP_STEP_TIMEOUT environment variable (seconds).
"""

from __future__ import annotations

import json
import os
import subprocess
import threading
import urllib.error
import urllib.request

from ..errors import ProtocolError, ReasonerTimeout
from ..logic_form import serialize_logic_form
from ..render import DEFAULT_STYLE, RenderStyle, render_svg
from .base import ReasonerInput, StepOutput, parse_step_output, step_output_to_dict

DEFAULT_TIMEOUT_S = 120.0
TIMEOUT_ENV_VAR = "GEOMLOOP_STEP_TIMEOUT"


def step_timeout() -> float:
    raw = os.environ.get(TIMEOUT_ENV_VAR)
    if not raw:
        return DEFAULT_TIMEOUT_S
    try:
        value = float(raw)
    except ValueError:
        return DEFAULT_TIMEOUT_S
    return value if value > 0 else DEFAULT_TIMEOUT_S


def reasoner_input_to_wire(inp: ReasonerInput, svg: str) -> dict:
    return {
        "problem_text": inp.problem_text,
        "logic_form": json.loads(serialize_logic_form(inp.current_form)),
        "svg": svg,
        "history": [step_output_to_dict(s) for s in inp.history],
        "step_index": inp.step_index,
    }


def _parse_response(raw: str) -> StepOutput:
    try:
        return parse_step_output(raw)
    except Exception as exc:
        raise ProtocolError(f"unusable reasoner response: {exc}", raw=raw) from exc


class HttpReasoner:
    """Blocking HTTP client for a remote reasoner endpoint."""

    def __init__(
        self,
        endpoint: str,
        timeout: float | None = None,
        style: RenderStyle = DEFAULT_STYLE,
    ):
        self.endpoint = endpoint
        self.timeout = timeout if timeout is not None else step_timeout()
        self.style = style
        self.name = f"http:{endpoint}"

    def next_step(self, inp: ReasonerInput) -> StepOutput:
        body = json.dumps(
            reasoner_input_to_wire(inp, render_svg(inp.current_form, self.style))
        ).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint,
            data=body,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                raw = response.read().decode("utf-8", errors="replace")
        except TimeoutError as exc:
            raise ReasonerTimeout(f"no response within {self.timeout}s") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                raise ReasonerTimeout(f"no response within {self.timeout}s") from exc
            raise ProtocolError(f"endpoint unreachable: {exc}") from exc
        return _parse_response(raw)


class PipeReasoner:
    """Line-delimited JSON over a child process pipe (offline agents)."""

    def __init__(
        self,
        command: list[str] | str,
        timeout: float | None = None,
        style: RenderStyle = DEFAULT_STYLE,
    ):
        self.timeout = timeout if timeout is not None else step_timeout()
        self.style = style
        shell = isinstance(command, str)
        self._proc = subprocess.Popen(
            command,
            shell=shell,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self.name = f"pipe:{command if shell else ' '.join(command)}"

    def close(self):
        if self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    def _read_line(self) -> str:
        result: dict[str, str | None] = {"line": None}

        def reader():
            result["line"] = self._proc.stdout.readline()  # type: ignore[union-attr]

        thread = threading.Thread(target=reader, daemon=True)
        thread.start()
        thread.join(self.timeout)
        if thread.is_alive():
            raise ReasonerTimeout(f"no response within {self.timeout}s")
        line = result["line"]
        if not line:
            raise ProtocolError("reasoner process closed its output")
        return line

    def next_step(self, inp: ReasonerInput) -> StepOutput:
        if self._proc.poll() is not None:
            raise ProtocolError("reasoner process has exited")
        payload = json.dumps(
            reasoner_input_to_wire(inp, render_svg(inp.current_form, self.style))
        )
        try:
            self._proc.stdin.write(payload + "\n")  # type: ignore[union-attr]
            self._proc.stdin.flush()  # type: ignore[union-attr]
        except (BrokenPipeError, ValueError) as exc:
            raise ProtocolError(f"reasoner process pipe closed: {exc}") from exc
        return _parse_response(self._read_line())
