"""geomloop: a dynamic plane-geometry engine.

Diagrams are declarative logic forms; sketch actions (auxiliary lines, rigid
transformations, point labeling) produce successor forms; an L-BFGS constraint
solver repairs inconsistent coordinates; deterministic SVG rendering closes
the perception-reasoning-action loop around pluggable reasoners with binary
format/result rewards.
"""

from .actions import (
    Action,
    Answer,
    DrawLine,
    ExecutionResult,
    LabelPoint,
    Reflect,
    Rotate,
    Translate,
    auto_intersections,
    execute,
    parse_action,
    serialize_action,
)
from .answers import AnswerValue, Descriptor, Numerical, Ratio
from .constraints import (
    ParamVector,
    SolveReport,
    error_gradient,
    pack_params,
    residuals,
    solve,
    total_error,
)
from .geom import (
    AffineMap,
    Vec2,
    angle_measure,
    apply_map,
    distance,
    intersect_line_circle,
    intersect_lines,
    reflection_map,
    rotation_map,
    translation_map,
)
from .harness import (
    BenchmarkReport,
    Problem,
    Trajectory,
    load_problem,
    load_problems,
    r_format,
    r_result,
    run_episode,
    score_benchmark,
    serialize_trajectory,
    stats,
)
from .logic_form import (
    CircleDecl,
    DiagramDiff,
    LineDecl,
    LogicForm,
    PointDecl,
    PolygonDecl,
    RelationDecl,
    Violation,
    diff_forms,
    make_form,
    parse_logic_form,
    serialize_logic_form,
    validate,
)
from .reasoning import (
    HttpReasoner,
    PipeReasoner,
    ReasonerInput,
    RuleProver,
    ScriptedReasoner,
    StepOutput,
    derive_facts,
    seed_facts,
)
from .render import RenderStyle, render_svg, render_trajectory

__version__ = "0.1.0"
