"""Command line interface: exit codes, printed output, and JSON mode."""

import contextlib
import io
import json

from mpst.cli import main


def invoke(*argv):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke("--json", *argv)
    payload = json.loads(out)
    assert set(payload) == {"command", "verdict", "witness", "timings"}
    assert isinstance(payload["timings"]["seconds"], float)
    del payload["timings"]
    return code, payload, err


class TestParse:
    def test_global_type_prints_canonical_form(self):
        code, out, err = invoke("parse", "fixtures/sec3_global.gt")
        assert code == 0
        assert out == (
            "p -> q : { l1(nat).q -> r : l3(int).end,"
            " l2(bool).q -> r : l5(nat).end }\n"
        )
        assert err == ""

    def test_session_type_extension(self):
        code, out, _ = invoke("parse", "fixtures/sec5_nat.mpst")
        assert code == 0
        assert out == "add!l1(nat).add!l2(nat).add?l3(int).end\n"

    def test_session_extension(self):
        code, out, _ = invoke("parse", "fixtures/adder_zero.mps")
        assert code == 0
        assert out.startswith("@add cl?l1(y1).cl?l2(y2).")
        assert "|| @cl add!l1(5).add!l2(0).add?l3(x).0" in out
        assert "|| @dec mu X.add?l4(z).0 + add?l7(y).add!l8(y).X" in out

    def test_category_flag_overrides_extension(self, tmp_path):
        source = tmp_path / "proc.txt"
        source.write_text("add!l1(5).add!l2(4).add?l3(x).0")
        code, out, _ = invoke("parse", str(source), "--category", "process")
        assert code == 0
        assert out == "add!l1(5).add!l2(4).add?l3(x).0\n"

    def test_unknown_extension_requires_category(self, tmp_path):
        source = tmp_path / "proc.txt"
        source.write_text("0")
        code, out, err = invoke("parse", str(source))
        assert code == 2
        assert out == ""
        assert "cannot infer category" in err
        assert "pass --category" in err

    def test_missing_fixture_is_usage_error(self):
        code, _, err = invoke("parse", "fixtures/missing.mpst")
        assert code == 2
        assert err == "error: no packaged fixture 'missing.mpst'\n"

    def test_parse_error_reports_position(self, tmp_path):
        source = tmp_path / "bad.mpst"
        source.write_text("p?l(nat).")
        code, out, err = invoke("parse", str(source))
        assert code == 2
        assert out == ""
        assert err == "error: 1:10: expected a session type, got 'end of input'\n"

    def test_fixtures_env_override(self, tmp_path, monkeypatch):
        (tmp_path / "alt.mpst").write_text("q!hello(nat).end")
        monkeypatch.setenv("MPST_FIXTURES", str(tmp_path))
        code, out, _ = invoke("parse", "fixtures/alt.mpst")
        assert code == 0
        assert out == "q!hello(nat).end\n"

    def test_json_success_payload(self):
        code, payload, _ = invoke_json("parse", "fixtures/sec5_nat.mpst")
        assert code == 0
        assert payload == {
            "command": "parse",
            "verdict": "ok",
            "witness": {
                "category": "sessiontype",
                "text": "add!l1(nat).add!l2(nat).add?l3(int).end",
            },
        }


class TestSubtype:
    def test_leq_prints_relation_symbol(self):
        code, out, err = invoke(
            "subtype", "fixtures/sec5_nat.mpst", "fixtures/sec5_int.mpst"
        )
        assert code == 0
        assert out == "≤\n"
        assert err == ""

    def test_nleq_prints_derivation(self):
        code, out, _ = invoke(
            "subtype", "fixtures/sec5_int.mpst", "fixtures/sec5_nat.mpst"
        )
        assert code == 1
        assert out == (
            "[nsub-out-out] add!l1(int).add!l2(int).add?l3(int).end"
            " !<= add!l1(nat).add!l2(nat).add?l3(int).end"
            "  (sort int is not a subsort of nat)\n"
        )

    def test_json_leq(self):
        code, payload, _ = invoke_json(
            "subtype", "fixtures/sec5_nat.mpst", "fixtures/sec5_int.mpst"
        )
        assert code == 0
        assert payload == {
            "command": "subtype",
            "verdict": "leq",
            "witness": None,
        }

    def test_json_nleq_carries_derivation(self):
        code, payload, _ = invoke_json(
            "subtype", "fixtures/sec5_int.mpst", "fixtures/sec5_nat.mpst"
        )
        assert code == 1
        assert payload == {
            "command": "subtype",
            "verdict": "nleq",
            "witness": {
                "rule": "nsub-out-out",
                "left": "add!l1(int).add!l2(int).add?l3(int).end",
                "right": "add!l1(nat).add!l2(nat).add?l3(int).end",
                "note": "sort int is not a subsort of nat",
            },
        }


class TestProject:
    def test_projection_prints_local_type(self):
        code, out, _ = invoke("project", "fixtures/sec3_global.gt", "r")
        assert code == 0
        assert out == "q?l3(int).end & q?l5(nat).end\n"

    def test_undefined_merge_is_negative(self):
        code, out, _ = invoke("project", "fixtures/ex1_nochain.gt", "r")
        assert code == 1
        assert out == (
            "mergeUndefined at <root>: cannot merge p!l2(int).end with end\n"
        )


class TestCheck:
    def test_check_proc_ok(self, tmp_path):
        source = tmp_path / "client.proc"
        source.write_text("add!l1(5).add!l2(4).add?l3(x).0")
        code, out, _ = invoke(
            "check-proc", str(source), "fixtures/sec5_nat.mpst"
        )
        assert code == 0
        assert out == "ok\n"

    def test_check_proc_failure_prints_rule(self, tmp_path):
        source = tmp_path / "client.proc"
        source.write_text("add!l1(5).add!l2(4).add?l3(x).0")
        code, out, _ = invoke(
            "check-proc", str(source), "fixtures/sec5_swapped_T.mpst"
        )
        assert code == 1
        assert out == (
            "[t-in-choice] at l1/l2:"
            " input choice from add against non-input type end\n"
        )

    def test_check_session_ok(self):
        code, out, _ = invoke(
            "check-session", "fixtures/adder.mps", "fixtures/adder.gt"
        )
        assert code == 0
        assert out == "ok\n"

    def test_check_session_missing_participant(self):
        code, out, _ = invoke(
            "check-session", "fixtures/adder_mismatch.mps", "fixtures/adder.gt"
        )
        assert code == 1
        assert out == (
            "[participantMissing] at dec: no process for participant dec\n"
        )

    def test_missing_arguments_are_usage_errors(self):
        code, _, err = invoke("check-proc")
        assert code == 2
        assert "the following arguments are required: process, type" in err


class TestRun:
    def test_terminating_session(self):
        code, out, _ = invoke("run", "fixtures/adder_zero.mps")
        assert code == 0
        assert out == "terminated after 6 steps: @_ 0\n"

    def test_trace_flag_prints_every_step(self):
        code, out, _ = invoke("run", "fixtures/adder_zero.mps", "--trace")
        assert code == 0
        assert out.splitlines() == [
            "cl --l1(5)--> add",
            "cl --l2(0)--> add",
            "add --if(false)--> add",
            "add --l4(true)--> inc",
            "add --l4(true)--> dec",
            "add --l3(5)--> cl",
            "terminated after 6 steps: @_ 0",
        ]

    def test_stuck_session_is_negative(self):
        code, out, _ = invoke("run", "fixtures/adder_mismatch.mps")
        assert code == 1
        assert out == (
            "stuckFound after 0 steps:"
            " @add cl?l2(x).(if neg x > 0 then cl?l1(x).0 else cl?l1(x).0)"
            " || @cl add!l1(5).add!l2(4).0\n"
        )

    def test_divergence_is_negative(self):
        code, out, _ = invoke("run", "fixtures/adder.mps", "--fuel", "20")
        assert code == 1
        assert out.startswith("diverged after 20 steps: @add ")

    def test_json_run_witness(self):
        code, payload, _ = invoke_json("run", "fixtures/adder_zero.mps")
        assert code == 0
        assert payload == {
            "command": "run",
            "verdict": "terminated",
            "witness": {
                "trace": [
                    "cl --l1(5)--> add",
                    "cl --l2(0)--> add",
                    "add --if(false)--> add",
                    "add --l4(true)--> inc",
                    "add --l4(true)--> dec",
                    "add --l3(5)--> cl",
                ],
                "state": "@_ 0",
                "steps": 6,
            },
        }


class TestStuck:
    def test_no_stuck_state_within_fuel(self):
        code, out, _ = invoke("stuck", "fixtures/adder.mps")
        assert code == 0
        assert out == "noStuckWithinFuel (7 states explored)\n"

    def test_stuck_state_found(self):
        code, out, _ = invoke("stuck", "fixtures/adder_mismatch.mps")
        assert code == 1
        assert out == (
            "stuckFound after 0 steps:"
            " @add cl?l2(x).(if neg x > 0 then cl?l1(x).0 else cl?l1(x).0)"
            " || @cl add!l1(5).add!l2(4).0\n"
        )

    def test_fuel_exhaustion_is_negative(self):
        code, out, _ = invoke("stuck", "fixtures/adder.mps", "--fuel", "3")
        assert code == 1
        assert out == "diverged: fuel exhausted after 3 states\n"

    def test_nonpositive_fuel_is_usage_error(self):
        code, out, err = invoke("stuck", "fixtures/adder.mps", "--fuel", "0")
        assert code == 2
        assert out == ""
        assert err == "error: fuel must be a positive integer, got 0\n"

    def test_json_stuck_witness(self):
        code, payload, _ = invoke_json("stuck", "fixtures/adder_mismatch.mps")
        assert code == 1
        assert payload == {
            "command": "stuck",
            "verdict": "stuckFound",
            "witness": {
                "trace": [],
                "state": (
                    "@add cl?l2(x).(if neg x > 0 then cl?l1(x).0"
                    " else cl?l1(x).0) || @cl add!l1(5).add!l2(4).0"
                ),
                "explored": 1,
            },
        }


class TestCharacteristic:
    def test_char_global_prints_global_type(self):
        code, out, _ = invoke("char-global", "fixtures/ex1_T.mpst", "p")
        assert code == 0
        assert out == (
            "p -> q : { l1(nat).q -> r : l1(bool).r -> q : l1(bool)"
            ".r -> p : l2(int).r -> q : l2(bool).q -> r : l2(bool).end,"
            " l3(int).q -> r : l3(bool).r -> q : l3(bool).end }\n"
        )

    def test_participant_clash_is_usage_error(self):
        code, out, err = invoke("char-global", "fixtures/ex1_T.mpst", "q")
        assert code == 2
        assert out == ""
        assert err == (
            "error: q already occurs in"
            " q!l1(nat).r?l2(int).end \\/ q!l3(int).end\n"
        )

    def test_char_proc_prints_process(self):
        code, out, _ = invoke("char-proc", "fixtures/ex1_T.mpst")
        assert code == 0
        assert out == (
            "if true (+) false"
            " then q!l1(5).r?l2(x).(if neg x > 0 then 0 else 0)"
            " else q!l3(-5).0\n"
        )

    def test_precise_leq_reports_safe_session(self):
        code, out, _ = invoke(
            "precise", "fixtures/sec5_nat.mpst", "fixtures/sec5_int.mpst"
        )
        assert code == 0
        assert out == "leq: substituted session is safe (terminated, 7 states)\n"

    def test_precise_nleq_reports_witness_and_derivation(self):
        code, out, _ = invoke(
            "precise", "fixtures/ex2_T.mpst", "fixtures/ex2_Tp.mpst"
        )
        assert code == 1
        lines = out.splitlines()
        assert lines[0] == "nleq: counterexample session got stuck after 0 steps"
        assert lines[1] == (
            "[nsub-diff-part] p1!l1(nat).p2!l2(nat).end"
            " !<= p2!l2(nat).p1!l1(nat).end"
        )
        assert lines[2].startswith("stuck state: @_c0 p1!l1(5).p2!l2(5).0 || ")

    def test_json_precise_nleq(self):
        code, payload, _ = invoke_json(
            "precise", "fixtures/ex2_T.mpst", "fixtures/ex2_Tp.mpst"
        )
        assert code == 1
        assert payload["command"] == "precise"
        assert payload["verdict"] == "nleq"
        witness = payload["witness"]
        assert witness["relation"] == "nleq"
        assert witness["ok"] is True
        assert witness["detail"] == "counterexample session got stuck after 0 steps"
        assert witness["trace"] == []
        assert witness["derivation"]["rule"] == "nsub-diff-part"
        assert witness["session"].startswith("@_c0 p1!l1(5).p2!l2(5).0 || ")


class TestUsage:
    def test_unknown_command(self):
        code, out, err = invoke("nonsense")
        assert code == 2
        assert out == ""
        assert "invalid choice: 'nonsense'" in err

    def test_no_arguments(self):
        code, _, err = invoke()
        assert code == 2
        assert "usage: mpst" in err
