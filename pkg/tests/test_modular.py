"""Modular semantics: closure, simplicity, dependency graph, coherence,
answer sets and the union comparison harness."""

import warnings

import pytest

from modasp.engine import Interpretation, enumerate_kappa_stable
from modasp.errors import EngineError
from modasp.grounding import Domain
from modasp.instantiation import (
    Module,
    ModularProgram,
    collective_modular,
)
from modasp.intensionality import IntensionalityStatement
from modasp.modular import (
    closure_holds,
    dependency_graph,
    is_coherent,
    is_model_of_module,
    is_simple_module,
    modular_answer_sets,
    strongly_connected_components,
    theorem1_check,
    union_program,
)
from modasp.parsing import parse_control, parse_program
from modasp.program import PredAtom, Program
from modasp.terms import Numeral, Variable

Q = ("q", 2)


def num(n):
    return Numeral(n)


def var(name):
    return Variable(name)


def q(a, b):
    return PredAtom("q", (num(a), num(b)))


def interp(*atoms):
    return Interpretation.of(atoms)


def rules(text):
    return parse_program(text).subprogram("base")


def delta0():
    return Module(IntensionalityStatement.of({Q: [(num(0), num(0))]}), rules("q(0,0)."))


def delta1():
    return Module(
        IntensionalityStatement.of({Q: [(var("X"), num(1)), (var("X"), num(2))]}),
        rules("q(X,1) :- q(X,0). q(X,2) :- q(X,1)."),
    )


def delta2():
    return Module(
        IntensionalityStatement.of({Q: [(var("X"), num(3)), (var("X"), num(4))]}),
        rules("q(0,3) :- q(0,2). q(0,4) :- q(0,3)."),
    )


def p1():
    kappa = IntensionalityStatement.of({Q: [(var("X"), var("Y"))]})
    return ModularProgram(kappa, (delta0(), delta1(), delta2()))


P1_MODEL = {q(0, 0), q(0, 1), q(0, 2), q(0, 3), q(0, 4)}

PROPERTY_LP = """\
#program base.
q(0,0).
#program property(k).
q(N,k+1) :- q(N-1,k).
"""


def mpproperty(n):
    prog = parse_program(PROPERTY_LP)
    plan = parse_control(
        f"const n = {n}. use base. use property(k) for k in 0..n-1.", prog
    )
    return collective_modular(prog, plan)


class TestClosure:
    def test_p1_stable_set_satisfies_closure(self):
        P = p1()
        I = interp(*P1_MODEL)
        assert closure_holds(I, P.kappa, [m.kappa for m in P.modules])

    def test_atom_outside_all_modules_fails(self):
        P = p1()
        assert not closure_holds(
            interp(q(1, 5)), P.kappa, [m.kappa for m in P.modules]
        )

    def test_property_program_bound(self):
        P = mpproperty(3)
        assert not closure_holds(
            interp(q(0, 4)), P.kappa, [m.kappa for m in P.modules]
        )


class TestIsModelOfModule:
    def test_delta0_model(self):
        assert is_model_of_module(interp(q(0, 0)), delta0(), Domain(0, 4))

    def test_delta1_model(self):
        I = interp(q(0, 0), q(0, 1), q(0, 2))
        assert is_model_of_module(I, delta1(), Domain(0, 4))

    def test_delta1_missing_consequence(self):
        assert not is_model_of_module(interp(q(0, 0)), delta1(), Domain(0, 4))


class TestIsSimple:
    def test_delta1_simple(self):
        simple, witness = is_simple_module(delta1())
        assert simple and witness is None

    def test_module_8_simple(self):
        module = Module(
            IntensionalityStatement.of({Q: [(var("X"), num(1))]}),
            rules("q(N,0+1) :- q(N-1,0)."),
        )
        simple, _ = is_simple_module(module)
        assert simple

    def test_uncovered_head_reported(self):
        module = Module(
            IntensionalityStatement.of({Q: [(var("X"), num(1))]}),
            rules("q(0,2)."),
        )
        simple, witness = is_simple_module(module)
        assert not simple
        assert witness == q(0, 2)


class TestDependencyGraph:
    def test_p1_graph(self):
        graph = dependency_graph(p1())
        assert set(graph.vertices) == {("q", 0), ("q", 1), ("q", 2)}
        assert graph.edges == frozenset(
            {(("q", 2), ("q", 1)), (("q", 1), ("q", 0))}
        )

    def test_fact_only_module_has_no_edges(self):
        kappa = IntensionalityStatement.of({Q: [(num(0), num(0))]})
        P = ModularProgram(
            IntensionalityStatement.of({Q: [(var("X"), var("Y"))]}),
            (Module(kappa, rules("q(0,0).")),),
        )
        graph = dependency_graph(P)
        assert graph.vertices == (("q", 0),)
        assert graph.edges == frozenset()

    def test_mpproperty_chain(self):
        # n=2 gives modules D, D_0, D_1 and a chain of dependencies.
        graph = dependency_graph(mpproperty(2))
        assert graph.edges == frozenset(
            {(("q", 2), ("q", 1)), (("q", 1), ("q", 0))}
        )


class TestTarjan:
    def test_components_and_order(self):
        vertices = [("a", 0), ("b", 0), ("c", 1), ("d", 2)]
        edges = [
            (("a", 0), ("b", 0)),
            (("b", 0), ("a", 0)),
            (("b", 0), ("c", 1)),
            (("c", 1), ("d", 2)),
        ]
        components = strongly_connected_components(vertices, edges)
        assert sorted(map(tuple, components)) == [
            (("a", 0), ("b", 0)),
            (("c", 1),),
            (("d", 2),),
        ]

    def test_deep_chain_no_recursion_error(self):
        vertices = [("p", i) for i in range(3000)]
        edges = [(("p", i), ("p", i + 1)) for i in range(2999)]
        components = strongly_connected_components(vertices, edges)
        assert len(components) == 3000


class TestCoherence:
    def test_p1_coherent(self):
        report = is_coherent(p1())
        assert report.coherent and report.violations == ()

    def test_identical_patterns_unify(self):
        kappa = IntensionalityStatement.of({Q: [(var("X"), num(1))]})
        P = ModularProgram(
            IntensionalityStatement.of({Q: [(var("X"), var("Y"))]}),
            (
                Module(kappa, rules("q(0,1).")),
                Module(kappa, rules("q(1,1).")),
            ),
        )
        report = is_coherent(P)
        assert not report.coherent
        assert {v.kind for v in report.violations} == {"tuples-unify"}

    def test_cross_module_cycle(self):
        module_a = Module(
            IntensionalityStatement.of({Q: [(var("X"), num(2))]}),
            rules("q(X,2) :- q(X,1)."),
        )
        module_b = Module(
            IntensionalityStatement.of({Q: [(var("X"), num(1))]}),
            rules("q(X,1) :- q(X,2)."),
        )
        P = ModularProgram(
            IntensionalityStatement.of({Q: [(var("X"), var("Y"))]}),
            (module_a, module_b),
        )
        report = is_coherent(P)
        assert not report.coherent
        assert {v.kind for v in report.violations} == {"scc-spans-modules"}

    def test_not_simple_reported(self):
        P = ModularProgram(
            IntensionalityStatement.of({Q: [(var("X"), var("Y"))]}),
            (
                Module(
                    IntensionalityStatement.of({Q: [(var("X"), num(1))]}),
                    rules("q(0,2)."),
                ),
            ),
        )
        report = is_coherent(P)
        assert not report.coherent
        assert {v.kind for v in report.violations} == {"module-not-simple"}

    def test_no_semantic_evaluation(self, monkeypatch):
        import modasp.engine as engine_mod
        import modasp.modular as modular_mod

        def forbidden(*args, **kwargs):
            raise AssertionError("coherence checking must stay syntactic")

        monkeypatch.setattr(engine_mod, "is_kappa_stable", forbidden)
        monkeypatch.setattr(engine_mod, "enumerate_kappa_stable", forbidden)
        monkeypatch.setattr(modular_mod, "is_kappa_stable", forbidden)
        monkeypatch.setattr(modular_mod, "enumerate_kappa_stable", forbidden)
        monkeypatch.setattr(engine_mod.Interpretation, "of", forbidden)
        assert is_coherent(p1()).coherent


class TestUnionProgram:
    def test_p1_union(self):
        union = union_program(p1())
        expected = rules(
            "q(0,0). q(X,1) :- q(X,0). q(X,2) :- q(X,1). "
            "q(0,3) :- q(0,2). q(0,4) :- q(0,3)."
        )
        assert union == expected

    def test_single_module(self):
        P = ModularProgram(
            IntensionalityStatement.of({Q: [(var("X"), var("Y"))]}),
            (delta0(),),
        )
        assert union_program(P) == rules("q(0,0).")


class TestModularAnswerSets:
    @pytest.mark.parametrize("engine", ["brute", "reduct", "topo"])
    def test_p1_unique_model(self, engine):
        models = modular_answer_sets(p1(), Domain(0, 4), engine)
        assert models == frozenset({interp(*P1_MODEL)})

    @pytest.mark.parametrize("engine", ["reduct", "topo"])
    def test_mpproperty_n3(self, engine):
        models = modular_answer_sets(mpproperty(3), Domain(0, 4), engine)
        assert models == frozenset({interp(q(0, 0), q(1, 1), q(2, 2), q(3, 3))})

    def test_single_empty_module(self):
        kappa = IntensionalityStatement.of({Q: [(var("X"), var("Y"))]})
        P = ModularProgram(kappa, (Module(kappa, Program.of(())),))
        models = modular_answer_sets(P, Domain(0, 2))
        assert models == frozenset({Interpretation(frozenset())})

    def test_topo_requires_coherence(self):
        kappa = IntensionalityStatement.of({Q: [(var("X"), num(1))]})
        P = ModularProgram(
            IntensionalityStatement.of({Q: [(var("X"), var("Y"))]}),
            (
                Module(kappa, rules("q(0,1).")),
                Module(kappa, rules("q(1,1).")),
            ),
        )
        with pytest.raises(EngineError):
            modular_answer_sets(P, Domain(0, 2), "topo")

    def test_topo_agrees_with_definition(self):
        for n in (1, 2, 3):
            P = mpproperty(n)
            dom = Domain(0, n + 1)
            assert modular_answer_sets(P, dom, "topo") == modular_answer_sets(
                P, dom, "reduct"
            )

    def test_topo_agrees_on_random_coherent_programs(self):
        import random

        import randprog

        rng = random.Random(90210)
        applicable = 0
        for _ in range(60):
            P, dom = randprog.random_coherent_program(rng)
            try:
                topo = modular_answer_sets(P, dom, "topo")
            except EngineError:
                continue  # cyclic module order; the engine refuses honestly
            applicable += 1
            assert topo == modular_answer_sets(P, dom, "reduct")
        assert applicable >= 20


class TestDefinitionalReference:
    def test_fast_path_matches_public_api_reference(self):
        # Reference: enumerate every subset of the relevant base and apply
        # the definition through the public operations only.
        import itertools
        import random

        import randprog
        from modasp.engine import extensional_region
        from modasp.grounding import ground as ground_fn

        rng = random.Random(555)
        checked = 0
        for _ in range(40):
            P, dom = randprog.random_coherent_program(rng, max_base=8)
            base = set()
            for module in P.modules:
                base |= ground_fn(module.pi, dom).heads()
            base |= extensional_region(P.kappa, P.signature().predicates, dom)
            base = sorted(base, key=str)
            module_kappas = [m.kappa for m in P.modules]
            expected = set()
            for size in range(len(base) + 1):
                for combo in itertools.combinations(base, size):
                    I = Interpretation.of(combo)
                    if all(
                        is_model_of_module(I, m, dom, "brute") for m in P.modules
                    ) and closure_holds(I, P.kappa, module_kappas):
                        expected.add(I)
            assert modular_answer_sets(P, dom, "reduct") == frozenset(expected)
            checked += 1
        assert checked == 40


class TestTheorem1:
    def test_p1_equal(self):
        report = theorem1_check(p1(), Domain(0, 4))
        assert report.equal
        assert report.modular_sets == (interp(*P1_MODEL),)
        assert report.union_sets == (interp(*P1_MODEL),)

    def test_mpproperty_equal(self):
        report = theorem1_check(mpproperty(3), Domain(0, 4))
        assert report.equal
        (model,) = report.modular_sets
        assert model == interp(q(0, 0), q(1, 1), q(2, 2), q(3, 3))

    def test_incoherent_warns_and_reports(self):
        module_a = Module(
            IntensionalityStatement.of({Q: [(var("X"), num(2))]}),
            rules("q(X,2) :- q(X,1)."),
        )
        module_b = Module(
            IntensionalityStatement.of({Q: [(var("X"), num(1))]}),
            rules("q(X,1) :- q(X,2)."),
        )
        P = ModularProgram(
            IntensionalityStatement.of({Q: [(var("X"), var("Y"))]}),
            (module_a, module_b),
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = theorem1_check(P, Domain(0, 2))
        assert any("incoherent" in str(w.message) for w in caught)
        assert isinstance(report.equal, bool)

    def test_union_side_matches_direct_enumeration(self):
        P = p1()
        dom = Domain(0, 4)
        direct = enumerate_kappa_stable(P.kappa, union_program(P), dom, "reduct")
        report = theorem1_check(P, dom)
        assert frozenset(report.union_sets) == direct
