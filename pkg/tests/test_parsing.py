"""Program and control file parsing, scopes, and round-tripping."""

import pytest

from modasp.errors import (
    ArityMismatchError,
    DeclarationConflictError,
    ParseError,
    RangeError,
    SortError,
    UnboundConstantError,
    UnknownSubprogramError,
)
from modasp.parsing import parse_control, parse_ground_atom, parse_program, parse_term
from modasp.program import Comparison, Literal, PredAtom, Program, make_rule
from modasp.subprograms import SubprogramSpec, subprogram
from modasp.terms import Arith, Numeral, SymbolicConstant, Valuation, Variable

PROPERTY_LP = """\
#program base.
q(0,0).
#program property(k).
q(N,k+1) :- q(N-1,k).
"""


def property_rule():
    head = PredAtom(
        "q", (Variable("N"), Arith("+", SymbolicConstant("k"), Numeral(1)))
    )
    body = [
        Literal(
            PredAtom(
                "q", (Arith("-", Variable("N"), Numeral(1)), SymbolicConstant("k"))
            )
        )
    ]
    return make_rule(head, body)


class TestParseProgram:
    def test_property_program_structure(self):
        prog = parse_program(PROPERTY_LP)
        assert prog.declarations() == {"base": (), "property": ("k",)}
        assert len(prog.subprogram("base")) == 1
        assert len(prog.subprogram("property")) == 1

    def test_rule_before_declaration_is_base(self):
        prog = parse_program("q(0,0).")
        assert prog.subprogram("base") == Program.of(
            [make_rule(PredAtom("q", (Numeral(0), Numeral(0))))]
        )

    def test_conflicting_parameter_lists(self):
        with pytest.raises(DeclarationConflictError):
            parse_program("#program p(a). #program p(a,b).")

    def test_programmatic_construction_checks_declarations(self):
        from modasp.subprograms import ClingoProgram, ProgramDeclaration

        with pytest.raises(DeclarationConflictError):
            ClingoProgram(
                (ProgramDeclaration("p", ("a",)), ProgramDeclaration("p", ()))
            )

    def test_base_cannot_take_parameters(self):
        with pytest.raises(DeclarationConflictError):
            parse_program("#program base(x).")

    def test_scopes_union_over_repeated_declarations(self):
        text = "#program p. a. #program q. b. #program p. c."
        prog = parse_program(text)
        assert prog.subprogram("p") == Program.of(
            [make_rule(PredAtom("a")), make_rule(PredAtom("c"))]
        )

    def test_subprogram_base_of_property(self):
        prog = parse_program(PROPERTY_LP)
        assert prog.subprogram("base") == Program.of(
            [make_rule(PredAtom("q", (Numeral(0), Numeral(0))))]
        )

    def test_subprogram_property_rule(self):
        prog = parse_program(PROPERTY_LP)
        assert prog.subprogram("property") == Program.of([property_rule()])

    def test_unknown_subprogram_lists_names(self):
        prog = parse_program(PROPERTY_LP)
        with pytest.raises(UnknownSubprogramError, match="base, property"):
            subprogram(prog, "nope")

    def test_comments_and_literals(self):
        text = """\
        % a comment
        p(X) :- q(X), not r(X), not not s(X), X < 3.
        :- p(1).
        """
        prog = parse_program(text)
        rules = prog.subprogram("base").rules
        assert len(rules) == 2
        (constraint_rule,) = [r for r in rules if r.head is None]
        assert constraint_rule.body[0].atom == PredAtom("p", (Numeral(1),))
        (rule,) = [r for r in rules if r.head is not None]
        negs = sorted(lit.negations for lit in rule.body)
        assert negs == [0, 0, 1, 2]
        comparisons = [l.atom for l in rule.body if isinstance(l.atom, Comparison)]
        assert comparisons == [Comparison("<", Variable("X"), Numeral(3))]

    def test_comparison_head_rejected(self):
        with pytest.raises(ParseError):
            parse_program("X = 1 :- p(X).")

    def test_triple_negation_rejected(self):
        with pytest.raises(ParseError):
            parse_program("a :- not not not b.")

    def test_syntax_error_carries_location(self):
        with pytest.raises(ParseError) as err:
            parse_program("p(X) :- q(X)")
        assert "line 1" in str(err.value)

    def test_scope_partition(self):
        prog = parse_program("a. #program p. b. #program q. c. d.")
        names = list(prog.declarations())
        all_rules = [rule for _, rule in prog.scopes()]
        collected = []
        for name in names:
            collected.extend(prog.subprogram(name).rules)
        assert sorted(map(str, collected)) == sorted(map(str, all_rules))

    def test_round_trip(self):
        for text in (
            PROPERTY_LP,
            "p(f(1),a) :- not q(a), f(X) = g(Y,2), X <= 2*Y+1.",
            ":- p(1), not not q(2).\n#program w(u,v).\nr(u+1,v) :- r(u,v).",
        ):
            prog = parse_program(text)
            assert parse_program(str(prog)) == prog

    def test_round_trip_random_programs(self):
        import random

        from modasp.program import make_rule
        from modasp.terms import Arith, Func, Numeral, SymbolicConstant, Variable

        rng = random.Random(61)

        def term(depth=0):
            roll = rng.random()
            if roll < 0.3:
                return Numeral(rng.randint(-9, 9))
            if roll < 0.5:
                return SymbolicConstant(rng.choice("abk"))
            if roll < 0.65:
                return Variable(rng.choice("XYZN"))
            if roll < 0.85 and depth < 3:
                return Arith(rng.choice("+-*"), int_term(depth + 1), int_term(depth + 1))
            if depth < 3:
                return Func(rng.choice("fg"), tuple(term(depth + 1) for _ in range(rng.randint(1, 2))))
            return Numeral(rng.randint(0, 9))

        def int_term(depth):
            roll = rng.random()
            if roll < 0.5 or depth >= 3:
                return Numeral(rng.randint(-9, 9))
            if roll < 0.7:
                return Variable(rng.choice("XYZN"))
            return Arith(rng.choice("+-*"), int_term(depth + 1), int_term(depth + 1))

        def atom():
            return PredAtom(rng.choice("pqr"), tuple(term() for _ in range(rng.randint(0, 3))))

        for _ in range(150):
            items = []
            if rng.random() < 0.5:
                params = tuple(sorted(rng.sample(["u", "v", "w"], rng.randint(0, 2))))
                items.append(f"#program m({','.join(params)})." if params else "#program m.")
            for _ in range(rng.randint(1, 3)):
                head = atom() if rng.random() < 0.85 else None
                body = [
                    Literal(
                        atom()
                        if rng.random() < 0.7
                        else Comparison(rng.choice(("=", "!=", "<", "<=", ">", ">=")), term(), term()),
                        rng.choice((0, 0, 1, 2)),
                    )
                    for _ in range(rng.randint(0, 3))
                ]
                if head is None and not body:
                    continue
                try:
                    items.append(str(make_rule(head, body)))
                except SortError:
                    continue  # heads nesting arithmetic under functions are rejected
            text = "\n".join(items)
            prog = parse_program(text)
            assert parse_program(str(prog)) == prog


class TestParseTerm:
    def test_precedence(self):
        assert parse_term("1+2*3") == Arith(
            "+", Numeral(1), Arith("*", Numeral(2), Numeral(3))
        )

    def test_left_associative_subtraction(self):
        assert parse_term("N-1-2") == Arith(
            "-", Arith("-", Variable("N"), Numeral(1)), Numeral(2)
        )

    def test_parentheses(self):
        assert parse_term("(1+2)*3") == Arith(
            "*", Arith("+", Numeral(1), Numeral(2)), Numeral(3)
        )

    def test_negative_numeral(self):
        assert parse_term("-5") == Numeral(-5)

    def test_ground_atom(self):
        assert parse_ground_atom("q(0,1)") == PredAtom("q", (Numeral(0), Numeral(1)))
        with pytest.raises(ParseError):
            parse_ground_atom("q(X)")


CONTROL_A = """\
# collective control for the running example
const n = 100.
use base.
use property(k) for k in 0..n-1.
"""


class TestParseControl:
    def setup_method(self):
        self.prog = parse_program(PROPERTY_LP)

    def test_control_a_expansion(self):
        plan = parse_control(CONTROL_A, self.prog)
        assert len(plan.specs) == 101
        assert plan.specs[0] == SubprogramSpec("base", (), Valuation())
        assert plan.specs[1] == SubprogramSpec(
            "property", ("k",), Valuation.of({"k": Numeral(0)})
        )
        assert plan.specs[-1] == SubprogramSpec(
            "property", ("k",), Valuation.of({"k": Numeral(99)})
        )

    def test_use_base_alone(self):
        plan = parse_control("use base.", self.prog)
        assert plan.specs == (SubprogramSpec("base", (), Valuation()),)

    def test_positional_valuation(self):
        plan = parse_control("use property(7).", self.prog)
        assert plan.specs == (
            SubprogramSpec("property", ("k",), Valuation.of({"k": Numeral(7)})),
        )

    def test_range_expansion_count(self):
        plan = parse_control("use property(k) for k in 2..5.", self.prog)
        values = [spec.valuation["k"] for spec in plan.specs]
        assert values == [Numeral(2), Numeral(3), Numeral(4), Numeral(5)]

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatchError):
            parse_control("use property.", self.prog)
        with pytest.raises(ArityMismatchError):
            parse_control("use base(1).", self.prog)

    def test_undeclared_subprogram(self):
        with pytest.raises(UnknownSubprogramError):
            parse_control("use nothing.", self.prog)

    def test_unbound_constant(self):
        with pytest.raises(UnboundConstantError):
            parse_control("use property(k) for k in 0..m.", self.prog)

    def test_reversed_range_needs_allow_empty(self):
        with pytest.raises(RangeError):
            parse_control("use property(k) for k in 3..1.", self.prog)
        plan = parse_control("use property(k) for k in 3..1 allow empty.", self.prog)
        assert plan.specs == ()

    def test_overrides_shadow_const_lines(self):
        plan = parse_control(CONTROL_A, self.prog, overrides={"n": 3})
        assert len(plan.specs) == 4

    def test_domain_line(self):
        plan = parse_control("const n = 4. domain 0..n.", self.prog)
        assert plan.domain == (0, 4)
        with pytest.raises(RangeError):
            parse_control("domain 3..1.", self.prog)

    def test_intensional_patterns(self):
        plan = parse_control(
            "intensional q(X,1). intensional q(X,2).", self.prog
        )
        kappa = plan.global_kappa_dict()
        assert kappa == {
            ("q", 2): (
                (Variable("X"), Numeral(1)),
                (Variable("X"), Numeral(2)),
            )
        }

    def test_module_chi_override_keeps_placeholders(self):
        plan = parse_control("module property: q(X, k+1).", self.prog)
        chi = plan.module_chi_dict()["property"]
        assert chi == {
            ("q", 2): (
                (Variable("X"), Arith("+", SymbolicConstant("k"), Numeral(1))),
            )
        }

    def test_symbolic_value(self):
        plan = parse_control("use property(a).", self.prog)
        assert plan.specs[0].valuation["a" if False else "k"] == SymbolicConstant("a")

    def test_constant_arithmetic_in_values(self):
        plan = parse_control("const n = 3. use property(n*2+1).", self.prog)
        assert plan.specs[0].valuation["k"] == Numeral(7)

    def test_duplicate_const_rejected(self):
        with pytest.raises(ParseError):
            parse_control("const n = 1. const n = 2.", self.prog)
