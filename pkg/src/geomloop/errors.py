"""Exception hierarchy for the whole engine.

Everything raised on purpose derives from GeomLoopError so callers (CLI,
episode harness) can distinguish engine errors from genuine bugs.
"""

from __future__ import annotations


class GeomLoopError(Exception):
    """Base class for all engine errors."""


# --- logic-form parsing / validation ---------------------------------------


class FormSyntaxError(GeomLoopError):
    """Input document is not well-formed JSON; carries the byte offset."""

    def __init__(self, message: str, offset: int = -1):
        super().__init__(message)
        self.offset = offset


class SchemaError(GeomLoopError):
    """Document is JSON but violates the logic-form schema (keys, kinds, arity)."""


class DanglingLabelError(SchemaError):
    """A declaration references a point label that does not exist."""

    def __init__(self, label: str, context: str = ""):
        msg = f"unresolved label {label!r}"
        if context:
            msg += f" in {context}"
        super().__init__(msg)
        self.label = label


# --- geometry kernel ---------------------------------------------------------


class DegenerateAxisError(GeomLoopError):
    """Reflection axis endpoints coincide."""


class DegenerateLineError(GeomLoopError):
    """Line endpoints coincide."""


class DegenerateAngleError(GeomLoopError):
    """Angle ray endpoint coincides with the vertex."""


# --- action execution ---------------------------------------------------------


class ActionSchemaError(GeomLoopError):
    """Action JSON deviates from the strict command schema.

    The message is the machine-checkable reason; format scoring treats any
    occurrence as a schema failure.
    """


class UnknownLabelError(GeomLoopError):
    """Action references a point label absent from the form."""

    def __init__(self, label: str):
        super().__init__(f"unknown point label {label!r}")
        self.label = label


class UnknownObjectError(GeomLoopError):
    """Action references an object that cannot be resolved in the form."""


class NameCollisionError(GeomLoopError):
    """label_point would reuse an existing name at a different location."""


# --- constraint solving --------------------------------------------------------


class DegenerateRelationError(GeomLoopError):
    """A residual is undefined at the current coordinates (coincident points)."""


class NoFreeParametersError(GeomLoopError):
    """Every point is pinned; the solver has nothing to adjust."""


class NonFiniteError(GeomLoopError):
    """Residual or gradient evaluation produced NaN/inf."""


# --- rendering ------------------------------------------------------------------


class EmptyFormError(GeomLoopError):
    """Rendering requires at least one point."""


# --- reasoners -------------------------------------------------------------------


class ReasonerExhausted(GeomLoopError):
    """The reasoner has no applicable next step."""


class ProtocolError(GeomLoopError):
    """External reasoner returned an unusable response; carries the raw text."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class ReasonerTimeout(GeomLoopError):
    """External reasoner exceeded the per-step deadline."""


# --- harness / problem files -------------------------------------------------------


class ProblemFormatError(GeomLoopError):
    """A benchmark problem record violates the problem schema."""


class DuplicateProblemIdError(ProblemFormatError):
    """Two problem records share an id."""

    def __init__(self, problem_id: str):
        super().__init__(f"duplicate problem id {problem_id!r}")
        self.problem_id = problem_id
