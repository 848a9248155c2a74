"""CLI surface: subcommands, formats, exit codes, and --expect assertions."""

import json

from threebox.behavior import restrict, three_box_behavior, to_json
from threebox.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def assert_no_floats(node):
    assert not isinstance(node, float)
    if isinstance(node, dict):
        for value in node.values():
            assert_no_floats(value)
    elif isinstance(node, list):
        for value in node:
            assert_no_floats(value)


class TestThreeBox:
    def test_stats_json_is_canonical(self, capsys):
        code, out, _ = run(capsys, "three-box", "stats", "--format", "json")
        assert code == 0
        assert out.strip() == to_json(three_box_behavior())
        assert_no_floats(json.loads(out))

    def test_stats_markdown(self, capsys):
        code, out, _ = run(capsys, "three-box", "stats")
        assert code == 0
        assert "| 1 | 2/3 | 0 | 2/9 | 1/9 |" in out
        assert "Signalling: yes" in out

    def test_abl_exact_output(self, capsys):
        code, out, _ = run(capsys, "three-box", "abl", "--choice", "1")
        assert code == 0
        assert out.strip() == "P(M1=1|M2=1,C=1) = 1"

    def test_abl_third_box(self, capsys):
        code, out, _ = run(capsys, "three-box", "abl", "--choice", "3")
        assert code == 0
        assert out.strip() == "P(M1=1|M2=1,C=3) = 1/5"

    def test_abl_json(self, capsys):
        code, out, _ = run(capsys, "three-box", "abl", "--choice", "2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload == {"choice": 2, "outcome": 1, "conditional": "1/1"}

    def test_abl_invalid_choice_is_domain_error(self, capsys):
        code, _, err = run(capsys, "three-box", "abl", "--choice", "9")
        assert code == 1
        assert "error:" in err

    def test_success_all_choices(self, capsys):
        code, out, _ = run(capsys, "three-box", "success")
        assert code == 0
        assert "P(M2=1|C=1) = 1/9" in out
        assert "P(M2=1|C=3) = 5/9" in out
        assert "P(M2=1|no intermediate measurement) = 1/9" in out

    def test_success_single_choice_json(self, capsys):
        code, out, _ = run(capsys, "three-box", "success", "--choice", "2", "--format", "json")
        assert code == 0
        assert json.loads(out) == {
            "success": {"C=2": "1/9"},
            "without_intermediate": "1/9",
        }


class TestScmRun:
    def test_case_c_matches_builtin_table(self, capsys):
        code, out, _ = run(capsys, "scm", "run", "c", "--format", "json")
        assert code == 0
        assert out.strip() == to_json(three_box_behavior())

    def test_case_a_restricted(self, capsys):
        code, out, _ = run(capsys, "scm", "run", "a", "--choices", "1,2", "--format", "json")
        assert code == 0
        assert out.strip() == to_json(restrict(three_box_behavior(), (1, 2)))

    def test_unknown_case_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "scm", "run", "z")
        assert code == 2

    def test_bad_choices_is_domain_error(self, capsys):
        code, _, err = run(capsys, "scm", "run", "a", "--choices", "1,x")
        assert code == 1
        assert "--choices" in err


class TestDagDsep:
    def test_separated(self, capsys):
        code, out, _ = run(capsys, "dag", "dsep", "--variant", "realist",
                           "--x", "C", "--y", "V", "--given", "M2")
        assert code == 0
        assert "d-separated" in out

    def test_connected_with_witness(self, capsys):
        code, out, _ = run(capsys, "dag", "dsep", "--variant", "realist+p",
                           "--x", "V", "--y", "C", "--given", "M2")
        assert code == 0
        assert "d-connected" in out
        assert "V←Λ→M2←C" in out

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "dag", "dsep", "--variant", "realist+o",
                           "--x", "V", "--y", "C", "--given", "M2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["separated"] is False
        assert "V←Λ→M2←M1←C" in payload["open_paths"]

    def test_ascii_alias(self, capsys):
        code, out, _ = run(capsys, "dag", "dsep", "--variant", "pure",
                           "--x", "L", "--y", "M2")
        assert code == 0
        assert "Λ and M2 are d-connected" in out

    def test_unknown_variant_is_domain_error(self, capsys):
        code, _, err = run(capsys, "dag", "dsep", "--variant", "weird",
                           "--x", "C", "--y", "V")
        assert code == 1
        assert "unknown variant" in err


class TestIqCheck:
    def test_builtin_pairwise_violated(self, capsys):
        code, out, _ = run(capsys, "iq", "check", "--behavior", "builtin:three-box",
                           "--form", "pairwise")
        assert code == 0
        assert "**VIOLATED**" in out

    def test_expect_violated_passes(self, capsys):
        code, _, _ = run(capsys, "iq", "check", "--behavior", "builtin:three-box",
                         "--form", "compact", "--expect", "violated")
        assert code == 0

    def test_restricted_expect_ok(self, capsys):
        code, _, _ = run(capsys, "iq", "check", "--behavior", "builtin:three-box",
                         "--restrict", "1,2", "--form", "pairwise", "--expect", "ok")
        assert code == 0

    def test_expect_mismatch_fails(self, capsys):
        code, _, err = run(capsys, "iq", "check", "--behavior", "builtin:three-box",
                           "--form", "compact", "--expect", "ok")
        assert code == 1
        assert "expectation failed" in err

    def test_behavior_file_input(self, capsys, tmp_path):
        path = tmp_path / "behavior.json"
        path.write_text(to_json(three_box_behavior()))
        code, out, _ = run(capsys, "iq", "check", "--behavior", str(path),
                           "--form", "pairwise", "--format", "json")
        assert code == 0
        assert json.loads(out)["violated"] is True

    def test_missing_file_is_domain_error(self, capsys):
        code, _, err = run(capsys, "iq", "check", "--behavior", "nope.json",
                           "--form", "compact")
        assert code == 1
        assert "not found" in err

    def test_unknown_builtin_is_domain_error(self, capsys):
        code, _, err = run(capsys, "iq", "check", "--behavior", "builtin:psi",
                           "--form", "compact")
        assert code == 1
        assert "unknown builtin" in err


class TestFeasibilityDecide:
    def test_expect_feasible(self, capsys):
        code, _, _ = run(capsys, "feasibility", "decide", "--variant", "pure",
                         "--behavior", "builtin:three-box", "--restrict", "1,2",
                         "--expect", "feasible")
        assert code == 0

    def test_expect_infeasible(self, capsys):
        code, _, _ = run(capsys, "feasibility", "decide", "--variant", "realist",
                         "--behavior", "builtin:three-box", "--restrict", "1,2",
                         "--expect", "infeasible")
        assert code == 0

    def test_infeasible_without_expect_still_succeeds(self, capsys):
        code, out, _ = run(capsys, "feasibility", "decide", "--variant", "pure+o",
                           "--behavior", "builtin:three-box")
        assert code == 0
        assert "infeasible" in out
        assert "10/9" in out

    def test_json_certificate_weights_are_rationals(self, capsys):
        code, out, _ = run(capsys, "feasibility", "decide", "--variant", "pure+p",
                           "--behavior", "builtin:three-box", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["feasible"] is True
        assert_no_floats(payload)
        assert all("/" in entry["weight"] for entry in payload["certificate"])


class TestReportFigure4:
    def test_markdown(self, capsys):
        code, out, _ = run(capsys, "report", "figure4")
        assert code == 0
        assert "| realist |" in out
        assert "feasible (minimal)" in out

    def test_json_no_floats(self, capsys):
        code, out, _ = run(capsys, "report", "figure4", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert_no_floats(payload)
        assert len(payload["rows"]) == 8

    def test_byte_identical_across_runs(self, capsys):
        _, first, _ = run(capsys, "report", "figure4", "--format", "json")
        _, second, _ = run(capsys, "report", "figure4", "--format", "json")
        assert first == second


class TestUsageErrors:
    def test_no_command(self, capsys):
        assert run(capsys, )[0] == 2

    def test_unknown_flag_rejected(self, capsys):
        assert run(capsys, "three-box", "stats", "--frmt", "json")[0] == 2

    def test_unknown_subcommand(self, capsys):
        assert run(capsys, "three-box", "statz")[0] == 2

    def test_missing_required_flag(self, capsys):
        assert run(capsys, "three-box", "abl")[0] == 2
