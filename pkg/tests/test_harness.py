"""Episode loop, rewards, problem files, and benchmark scoring."""

import json

import pytest

from geomloop.answers import Descriptor, Numerical, Ratio
from geomloop.errors import (
    DuplicateProblemIdError,
    ProblemFormatError,
    ReasonerExhausted,
)
from geomloop.harness import (
    load_problem,
    load_problems,
    parse_problem,
    r_format,
    r_result,
    run_episode,
    score_benchmark,
    serialize_trajectory,
    stats,
)
from geomloop.logic_form import serialize_logic_form
from geomloop.actions import execute
from geomloop.reasoning import ScriptedReasoner, parse_step_output

from conftest import (
    gold_problems,
    square_form,
    write_problem_file,
)


def minimal_record(**overrides):
    record = {
        "id": "p1",
        "text": "toy",
        "logic_form": json.loads(serialize_logic_form(square_form())),
        "answer_type": "numerical",
        "gold_answer": "30",
        "answer_unit": "degrees",
    }
    record.update(overrides)
    return record


class TestProblemFiles:
    def test_parse_minimal(self):
        problem = parse_problem(minimal_record())
        assert problem.id == "p1"
        assert problem.gold_answer == Numerical(30.0, "degrees")

    def test_unknown_key_rejected(self):
        with pytest.raises(ProblemFormatError):
            parse_problem(minimal_record(surprise=1))

    def test_missing_field_rejected(self):
        record = minimal_record()
        del record["text"]
        with pytest.raises(ProblemFormatError):
            parse_problem(record)

    def test_both_form_sources_rejected(self):
        with pytest.raises(ProblemFormatError):
            parse_problem(minimal_record(logic_form_path="x.json"))

    def test_form_path_resolved_relative(self, tmp_path):
        form_path = tmp_path / "f.json"
        form_path.write_text(serialize_logic_form(square_form()), encoding="utf-8")
        record = minimal_record()
        del record["logic_form"]
        record["logic_form_path"] = "f.json"
        (tmp_path / "problems.jsonl").write_text(json.dumps(record) + "\n")
        problems = load_problems(tmp_path / "problems.jsonl")
        assert problems[0].initial_form == square_form()

    def test_gold_answer_by_type(self):
        assert parse_problem(
            minimal_record(answer_type="ratio", gold_answer="2:1")
        ).gold_answer == Ratio(2, 1)
        assert parse_problem(
            minimal_record(answer_type="descriptor", gold_answer="perpendicular")
        ).gold_answer == Descriptor("perpendicular")
        with pytest.raises(ProblemFormatError):
            parse_problem(minimal_record(answer_type="ratio", gold_answer="wide"))

    def test_duplicate_ids(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        record = minimal_record()
        path.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n")
        with pytest.raises(DuplicateProblemIdError):
            load_problems(path)

    def test_single_problem_document(self, tmp_path):
        path = tmp_path / "one.json"
        path.write_text(json.dumps(minimal_record()))
        assert load_problem(path).id == "p1"


class TestStats:
    def test_three_problem_file(self, tmp_path):
        path = tmp_path / "three.jsonl"
        records = [
            minimal_record(id="a"),
            minimal_record(id="b", answer_type="ratio", gold_answer="1/3"),
            minimal_record(id="c", answer_type="descriptor", gold_answer="perpendicular"),
        ]
        for r in records[1:]:
            r.pop("answer_unit", None)
        path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
        assert stats(path) == {"Numerical": 1, "Ratio": 1, "Descriptor": 1}

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert stats(path) == {"Numerical": 0, "Ratio": 0, "Descriptor": 0}


class GoldReplayReasoner:
    """Replays each problem's own gold proof, keyed by problem text."""

    name = "gold-replay"

    def __init__(self, problems):
        self.scripts = {p.text: p.gold_proof for p in problems}

    def next_step(self, inp):
        proof = self.scripts[inp.problem_text]
        if proof is None or inp.step_index >= len(proof):
            raise ReasonerExhausted("past the recorded proof")
        return proof[inp.step_index]


class AbstainReasoner:
    name = "abstain"

    def next_step(self, inp):
        raise ReasonerExhausted("no idea")


class TestRunEpisode:
    def test_replay_counts_frames(self):
        problem = gold_problems()[0]  # 3-step proof ending in an answer
        trajectory = run_episode(problem, ScriptedReasoner(problem.gold_proof))
        assert len(trajectory.steps) == 3
        assert len(trajectory.frames) == 4
        assert trajectory.terminal_answer == Ratio(1, 1)
        assert not trajectory.truncated

    def test_step_limit_truncates(self):
        problem = gold_problems()[0]
        looping = ScriptedReasoner(
            [parse_step_output(
                {"reasoning": "again", "action": {"op": "translate", "object": "line_AB", "vector": [0, 1]}}
            )] * 50
        )
        trajectory = run_episode(problem, looping, max_steps=5)
        assert trajectory.truncated
        assert trajectory.terminal_answer is None
        assert len(trajectory.steps) == 5

    def test_unknown_label_halts_and_zeroes_format(self):
        problem = gold_problems()[0]
        steps = [
            parse_step_output({"reasoning": "ok", "action": {"op": "draw_line", "from": "A", "to": "C"}}),
            parse_step_output({"reasoning": "ok", "action": {"op": "draw_line", "from": "A", "to": "Z"}}),
        ]
        trajectory = run_episode(problem, ScriptedReasoner(steps))
        assert len(trajectory.steps) == 1  # the failing step is not recorded
        assert trajectory.error and "step 1" in trajectory.error
        assert r_format(trajectory) == 0

    def test_exhaustion_recorded(self):
        problem = gold_problems()[0]
        trajectory = run_episode(problem, AbstainReasoner())
        assert trajectory.error and "exhausted" in trajectory.error
        assert not trajectory.truncated
        assert r_format(trajectory) == 1  # nothing malformed was emitted

    def test_frame_chain_replays_bit_exactly(self):
        problem = gold_problems()[2]  # includes a transform
        trajectory = run_episode(problem, ScriptedReasoner(problem.gold_proof))
        current = trajectory.frames[0]
        for step, frame in zip(trajectory.steps, trajectory.frames[1:]):
            current = execute(current, step.action).next_form
            assert serialize_logic_form(current) == serialize_logic_form(frame)

    def test_frame_hook_sees_every_frame(self):
        problem = gold_problems()[1]
        seen = []
        run_episode(
            problem,
            ScriptedReasoner(problem.gold_proof),
            on_frame=lambda i, form, svg: seen.append((i, svg.startswith("<svg"))),
        )
        assert [i for i, _ in seen] == list(range(len(problem.gold_proof) + 1))
        assert all(ok for _, ok in seen)

    def test_immediate_answer(self):
        problem = gold_problems()[0]
        only_answer = ScriptedReasoner(
            [parse_step_output({"reasoning": "direct", "action": {"op": "answer", "value": "1:1"}})]
        )
        trajectory = run_episode(problem, only_answer)
        assert len(trajectory.steps) == 1
        assert len(trajectory.frames) == 2
        assert r_format(trajectory) == 1
        assert r_result(trajectory.terminal_answer, problem) == 1

    def test_reasoner_called_at_most_max_steps_times(self):
        calls = 0

        class CountingReasoner:
            name = "counter"

            def next_step(self, inp):
                nonlocal calls
                calls += 1
                return parse_step_output(
                    {
                        "reasoning": "loop",
                        "action": {"op": "translate", "object": "line_AB", "vector": [0, 1]},
                    }
                )

        run_episode(gold_problems()[0], CountingReasoner(), max_steps=7)
        assert calls == 7


class TestRewards:
    def test_format_all_valid(self):
        problem = gold_problems()[0]
        trajectory = run_episode(problem, ScriptedReasoner(problem.gold_proof))
        assert r_format(trajectory) == 1

    def test_result_numerical_with_unit(self):
        problem = parse_problem(minimal_record())
        assert r_result(Numerical(30.0), problem) == 1
        assert r_result(Numerical(30.0, "degrees"), problem) == 1
        assert r_result(Numerical(30.0000001), problem) == 1
        assert r_result(Numerical(31.0), problem) == 0
        assert r_result(None, problem) == 0

    def test_result_ratio_surface_forms(self):
        problem = parse_problem(
            minimal_record(answer_type="ratio", gold_answer="2:1")
        )
        assert r_result(Ratio(2, 1), problem) == 1
        assert r_result(Ratio(4, 2), problem) == 1  # normalized to lowest terms
        assert r_result(Descriptor("2:1"), problem) == 1
        assert r_result(Descriptor("4/2"), problem) == 1
        assert r_result(Ratio(1, 2), problem) == 0
        third = parse_problem(minimal_record(answer_type="ratio", gold_answer="1/3"))
        assert r_result(Ratio(1, 3), third) == 1
        assert r_result(Descriptor("1/3"), third) == 1

    def test_result_descriptor(self):
        problem = parse_problem(
            minimal_record(
                answer_type="descriptor",
                gold_answer="isosceles right triangle",
                answer_aliases=["right isosceles triangle"],
            )
        )
        assert r_result(Descriptor("Isosceles  Right   Triangle"), problem) == 1
        assert r_result(Descriptor("right isosceles triangle"), problem) == 1
        assert r_result(Descriptor("scalene"), problem) == 0

    def test_rewards_are_binary(self):
        problem = gold_problems()[0]
        trajectory = run_episode(problem, ScriptedReasoner(problem.gold_proof))
        assert r_format(trajectory) in (0, 1)
        assert r_result(trajectory.terminal_answer, problem) in (0, 1)


class TestScoreBenchmark:
    def test_gold_replay_scores_100(self):
        problems = gold_problems()
        report = score_benchmark(problems, GoldReplayReasoner(problems))
        assert report.total.accuracy == pytest.approx(100.0)
        assert all(fmt == 1 and res == 1 for fmt, res in report.per_problem.values())

    def test_abstain_scores_0(self):
        problems = gold_problems()
        report = score_benchmark(problems, AbstainReasoner())
        assert report.total.accuracy == pytest.approx(0.0)

    def test_total_equals_mean_of_results(self):
        problems = gold_problems()
        report = score_benchmark(problems, GoldReplayReasoner(problems))
        mean = sum(res for _, res in report.per_problem.values()) / len(problems)
        assert report.total.accuracy == pytest.approx(mean * 100.0)

    def test_parallel_matches_serial(self):
        problems = gold_problems()
        serial = score_benchmark(problems, GoldReplayReasoner(problems), workers=1)
        parallel = score_benchmark(problems, GoldReplayReasoner(problems), workers=4)
        assert serial.per_problem == parallel.per_problem

    def test_table_shape(self):
        problems = gold_problems()
        table = score_benchmark(problems, GoldReplayReasoner(problems)).format_table()
        lines = table.splitlines()
        assert lines[0].split() == ["type", "n", "solved", "accuracy"]
        assert [row.split()[0] for row in lines[2:]] == [
            "Total",
            "Numerical",
            "Ratio",
            "Descriptor",
        ]


class TestTrajectorySerialization:
    def test_round_trip_fields(self):
        problem = gold_problems()[0]
        trajectory = run_episode(problem, ScriptedReasoner(problem.gold_proof))
        data = json.loads(serialize_trajectory(trajectory))
        assert data["problem_id"] == problem.id
        assert len(data["frames"]) == len(trajectory.frames)
        assert data["terminal_answer"] == {"type": "ratio", "value": "1:1"}
        assert data["truncated"] is False


def test_write_and_reload_fixture(tmp_path):
    problems = gold_problems()
    path = tmp_path / "gold.jsonl"
    write_problem_file(path, problems)
    loaded = load_problems(path)
    assert [p.id for p in loaded] == [p.id for p in problems]
    assert loaded[0].initial_form == problems[0].initial_form
    assert loaded[0].gold_proof == problems[0].gold_proof
