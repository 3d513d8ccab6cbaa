"""Syntax trees: constructor invariants, printing, parsing, and helpers."""

import random

import pytest

import gen
from mpst import (
    DuplicateLabel,
    ParseError,
    SelfCommunication,
    Session,
    Sort,
    TBranch,
    TEnd,
    TIn,
    TOut,
    TRec,
    TVar,
    UnguardedRecursion,
    parse,
    parse_expr,
    parse_global_type,
    parse_process,
    parse_session,
    parse_session_type,
    participants_of,
    regular_tree_equal,
    show,
    subterm_closure,
    unfold,
)
from mpst import syntax as S
from mpst.syntax import (
    ext_choice,
    free_proc_vars,
    free_type_vars,
    subst_expr_in_proc,
    unfold_spine,
)


class TestPrinting:
    def test_type_union(self):
        t = parse_session_type("q!l1(nat).r?l2(int).end \\/ q!l3(int).end")
        assert show(t) == "q!l1(nat).r?l2(int).end \\/ q!l3(int).end"

    def test_type_recursive_intersection(self):
        t = parse_session_type("mu t.p?a(int).end & p?b(int).t")
        assert show(t) == "mu t.p?a(int).end & p?b(int).t"

    def test_process_conditional_loop(self):
        p = parse_process("mu X. if y2 > 0 then inc!l5(y1).X else cl!l3(y1).0")
        assert show(p) == "mu X.if y2 > 0 then inc!l5(y1).X else cl!l3(y1).0"

    def test_process_external_choice(self):
        p = parse_process("q?l1(x).0 + q?l2(x).q!l3(true).0")
        assert show(p) == "q?l1(x).0 + q?l2(x).q!l3(true).0"

    def test_global_branching(self):
        g = parse_global_type(
            "p -> q : { l1(nat). q -> r : l3(int).end,"
            " l2(bool). q -> r : l5(nat).end }")
        assert show(g) == ("p -> q : { l1(nat).q -> r : l3(int).end,"
                           " l2(bool).q -> r : l5(nat).end }")

    def test_session(self):
        m = parse_session("@p q!l(5).0 || @q p?l(x).0")
        assert show(m) == "@p q!l(5).0 || @q p?l(x).0"

    def test_expr_precedence(self):
        e = parse_expr("not (x (+) succ 1 > neg -3)")
        assert show(e) == "not (x (+) succ 1 > neg -3)"


class TestParsing:
    def test_category_dispatch(self):
        assert parse("end", "type") == TEnd()
        assert parse("end", "sessiontype") == TEnd()
        assert parse("end", "globaltype") == S.GEnd()
        assert parse("0", "process") == S.Inact()
        assert parse("true", "expr") == S.BoolLit(True)

    def test_inact_and_negative_literal(self):
        p = parse_process("q!l(-5).0")
        assert p == S.Output("q", "l", S.IntLit(-5), S.Inact())

    def test_comments_and_whitespace(self):
        t = parse_session_type("# leading note\n  p?l(nat)  .  end  # trailing\n")
        assert t == TIn("p", (TBranch("l", Sort.NAT, TEnd()),))

    def test_branch_order_is_canonical(self):
        a = parse_session_type("q?l2(int).end & q?l1(nat).end")
        b = parse_session_type("q?l1(nat).end & q?l2(int).end")
        assert a == b
        assert [br.label for br in a.branches] == ["l1", "l2"]

    def test_missing_continuation_defaults_to_end(self):
        assert parse_session_type("p?l(nat)") == parse_session_type("p?l(nat).end")

    def test_parse_error_reports_position(self):
        with pytest.raises(ParseError) as exc:
            parse_session_type("p?l(nat).")
        assert "expected" in str(exc.value)
        assert "1:10" in str(exc.value)

    def test_mixed_connectives_rejected(self):
        with pytest.raises(ParseError):
            parse_session_type("p?l1(nat).end & q!l2(int).end")

    def test_unknown_sort_rejected(self):
        with pytest.raises(ParseError):
            parse_session_type("p?l(float).end")


class TestConstructorInvariants:
    def test_duplicate_labels_rejected(self):
        with pytest.raises(DuplicateLabel):
            TIn("q", (TBranch("l", Sort.NAT, TEnd()),
                      TBranch("l", Sort.INT, TEnd())))
        with pytest.raises(DuplicateLabel):
            parse_session_type("q!l(nat).end \\/ q!l(int).end")

    def test_self_communication_rejected(self):
        with pytest.raises(SelfCommunication):
            parse_global_type("p -> p : l(nat).end")
        with pytest.raises(SelfCommunication):
            parse_session("@p p!l(1).0")

    def test_unguarded_recursion_rejected(self):
        with pytest.raises(UnguardedRecursion):
            TRec("t", TVar("t"))
        with pytest.raises(UnguardedRecursion):
            parse_session_type("mu t.mu s.t")
        with pytest.raises(UnguardedRecursion):
            parse_process("mu X.X")
        with pytest.raises(UnguardedRecursion):
            parse_global_type("mu t.t")

    def test_guarded_recursion_accepted(self):
        t = parse_session_type("mu t.p!l(nat).t")
        assert isinstance(t, TRec)

    def test_session_duplicate_participant_rejected(self):
        with pytest.raises(ValueError):
            Session((("p", S.Inact()), ("p", S.Inact())))

    def test_ext_choice_flattens(self):
        e = ext_choice([parse_process("q?a(x).0"),
                        parse_process("q?b(x).0 + q?c(x).0")])
        assert show(e) == "q?a(x).0 + q?b(x).0 + q?c(x).0"
        assert len(e.branches) == 3

    def test_branches_stored_sorted(self):
        t = TIn("q", (TBranch("l2", Sort.INT, TEnd()),
                      TBranch("l1", Sort.NAT, TEnd())))
        assert show(t) == "q?l1(nat).end & q?l2(int).end"


class TestRoundTrip:
    def test_types_round_trip(self):
        rng = random.Random(101)
        for _ in range(300):
            t = gen.gen_type(rng, 4)
            assert parse_session_type(show(t)) == t

    def test_globals_round_trip(self):
        rng = random.Random(102)
        for _ in range(300):
            g = gen.gen_global(rng, 3)
            assert parse_global_type(show(g)) == g

    def test_processes_round_trip(self):
        rng = random.Random(103)
        for _ in range(300):
            p = gen.gen_process(rng, 3)
            assert parse_process(show(p)) == p

    def test_exprs_round_trip(self):
        rng = random.Random(104)
        for _ in range(300):
            e = gen.gen_expr(rng, 3, ("x", "y"))
            assert parse_expr(show(e)) == e

    def test_sessions_round_trip(self):
        rng = random.Random(105)
        for _ in range(100):
            parts = []
            for i, role in enumerate(("a1", "a2")):
                p = gen.gen_process(rng, 2, roles=("b1", "b2"))
                parts.append((role, p))
            m = Session(tuple(parts))
            assert parse_session(show(m)) == m


class TestHelpers:
    def test_unfold(self):
        t = parse_session_type("mu t.p!l(nat).t")
        assert show(unfold(t)) == "p!l(nat).(mu t.p!l(nat).t)"

    def test_unfold_spine_crosses_nested_binders(self):
        t = parse_session_type("mu a.mu b.p!l(nat).a")
        assert show(unfold_spine(t)) == "p!l(nat).(mu a.mu b.p!l(nat).a)"

    def test_regular_tree_equality_ignores_unfolding_and_alpha(self):
        t = parse_session_type("mu t.p!l(nat).t")
        s = parse_session_type("mu s.p!l(nat).p!l(nat).s")
        assert regular_tree_equal(t, unfold(t))
        assert regular_tree_equal(t, s)
        assert not regular_tree_equal(t, parse_session_type("mu t.p!l(int).t"))

    def test_regular_tree_equality_random_unfoldings(self):
        rng = random.Random(106)
        checked = 0
        for _ in range(300):
            t = gen.gen_type(rng, 4)
            if isinstance(t, TRec):
                assert regular_tree_equal(t, unfold(t))
                checked += 1
        assert checked >= 20

    def test_participants(self):
        t = parse_session_type("q!l1(nat).r?l2(int).end \\/ q!l3(int).end")
        assert participants_of(t) == frozenset({"q", "r"})
        g = parse_global_type("p -> q : l1(nat). q -> r : l2(bool).end")
        assert participants_of(g) == frozenset({"p", "q", "r"})
        m = parse_session("@p q!l(5).0 || @q p?l(x).0")
        assert participants_of(m) == frozenset({"p", "q"})

    def test_subterm_closure_is_finite_and_spine_normalized(self):
        t = parse_session_type("mu t.p!l1(nat).t \\/ p!l2(int).end")
        closure = subterm_closure(t)
        assert unfold_spine(t) in closure
        assert TEnd() in closure
        assert len(closure) == 2

    def test_free_variables(self):
        assert free_type_vars(parse_session_type("mu a.p!l(nat).b")) == frozenset({"b"})
        assert free_proc_vars(parse_process("mu X.q!l(1).Y")) == frozenset({"Y"})

    def test_substitution_stops_at_shadowing_binder(self):
        p = parse_process("q!l(x).q?x1(x).q!l(x).0")
        q = subst_expr_in_proc(p, "x", S.NatLit(7))
        assert show(q) == "q!l(7).q?x1(x).q!l(x).0"
