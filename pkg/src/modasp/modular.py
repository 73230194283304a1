"""Modular semantics and its syntactic side: dependency graph, coherence,
answer sets of modular programs, and the harness comparing them with the
answer sets of the plain rule union."""

import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .engine import (
    Interpretation,
    StabilityChecker,
    enumerate_kappa_stable,
    extensional_region,
    is_kappa_stable,
)
from .errors import CapacityError, EngineError
from .grounding import Domain, ground
from .instantiation import Module, ModularProgram
from .intensionality import (
    IntensionalityStatement,
    lambda_holds,
    may_share_instance,
    pattern_match,
    pattern_str,
    patterns_unify,
)
from .program import PredAtom, Program, Rule, atom_order_key

MODULAR_ENGINES = ("brute", "reduct", "topo")


def closure_holds(
    I: Interpretation,
    kappa: IntensionalityStatement,
    module_kappas: Sequence[IntensionalityStatement],
) -> bool:
    """Every true globally-intensional atom lies in some module's region.

    Atoms outside the interpretation satisfy the closure vacuously, so only
    the true atoms are read.
    """
    for atom in I.atoms:
        if lambda_holds(kappa, atom):
            if not any(lambda_holds(mk, atom) for mk in module_kappas):
                return False
    return True


def is_model_of_module(
    I: Interpretation, delta: Module, dom: Domain, engine: str = "reduct"
) -> bool:
    """A model of a module is a stable model of its program under its own
    intensionality statement."""
    return is_kappa_stable(I, delta.kappa, delta.pi, dom, engine)


def is_simple_module(delta: Module) -> tuple[bool, Optional[PredAtom]]:
    """Check that every rule head is covered by a pattern of the module.

    Returns (True, None) or (False, first offending head atom); coverage is
    witnessed by one-way matching of a pattern onto the simplified head
    argument tuple, with pattern variables free to take arbitrary terms.
    """
    for rule in delta.pi.rules:
        if rule.head is None:
            continue
        patterns = delta.kappa.patterns_for(rule.head.pred)
        if not any(pattern_match(u, rule.head.args) is not None for u in patterns):
            return False, rule.head
    return True, None


# --- dependency graph -------------------------------------------------------------


Vertex = tuple[str, int]


@dataclass(frozen=True)
class DependencyGraph:
    """Vertices pair each predicate with each module index; an edge from
    (p,i) to (q,j) records that a rule can derive a region-i atom of p from
    a region-j atom of q in its positive body."""

    vertices: tuple[Vertex, ...]
    edges: frozenset[tuple[Vertex, Vertex]]

    def successors(self, vertex: Vertex) -> list[Vertex]:
        return sorted(v for u, v in self.edges if u == vertex)


def dependency_graph(P: ModularProgram) -> DependencyGraph:
    """Build the dependency graph of a modular program.

    A rule (from any module) with head atom p(t) and a nonnegated body atom
    q(t') contributes an edge (p,i) -> (q,j) whenever some pattern of
    module i's statement for p shares an instance with [t], and some pattern
    of module j's statement for q shares one with [t'].  Loops at a single
    vertex are omitted: a vertex always belongs to its own component, so
    they never affect containment.  Predicates of equal name but different
    arity share a vertex, which can only merge components (a stricter
    containment check).
    """
    preds = sorted(P.signature().predicates)
    n = len(P.modules)
    vertices = tuple((name, i) for name, _ in preds for i in range(n))

    def matching_modules(atom: PredAtom) -> list[int]:
        out = []
        for i, module in enumerate(P.modules):
            patterns = module.kappa.patterns_for(atom.pred)
            if any(may_share_instance(u, atom.args) for u in patterns):
                out.append(i)
        return out

    edges: set[tuple[Vertex, Vertex]] = set()
    seen_rules: set[Rule] = set()
    for module in P.modules:
        for rule in module.pi.rules:
            if rule in seen_rules or rule.head is None:
                continue
            seen_rules.add(rule)
            head_modules = matching_modules(rule.head)
            if not head_modules:
                continue
            for literal in rule.body:
                if literal.negations != 0 or not isinstance(literal.atom, PredAtom):
                    continue
                for j in matching_modules(literal.atom):
                    for i in head_modules:
                        edge = ((rule.head.name, i), (literal.atom.name, j))
                        if edge[0] != edge[1]:
                            edges.add(edge)
    return DependencyGraph(vertices, frozenset(edges))


def strongly_connected_components(
    vertices: Sequence[Vertex], edges: Iterable[tuple[Vertex, Vertex]]
) -> list[list[Vertex]]:
    """Iterative Tarjan; linear in vertices plus edges."""
    succ: dict[Vertex, list[Vertex]] = {v: [] for v in vertices}
    for u, v in sorted(edges):
        succ[u].append(v)
    index: dict[Vertex, int] = {}
    lowlink: dict[Vertex, int] = {}
    on_stack: set[Vertex] = set()
    stack: list[Vertex] = []
    components: list[list[Vertex]] = []
    counter = [0]

    for root in vertices:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            vertex, child_index = work.pop()
            if child_index == 0:
                index[vertex] = lowlink[vertex] = counter[0]
                counter[0] += 1
                stack.append(vertex)
                on_stack.add(vertex)
            advanced = False
            children = succ[vertex]
            while child_index < len(children):
                child = children[child_index]
                child_index += 1
                if child not in index:
                    work.append((vertex, child_index))
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[vertex] = min(lowlink[vertex], index[child])
            if advanced:
                continue
            if lowlink[vertex] == index[vertex]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == vertex:
                        break
                components.append(sorted(component))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[vertex])
    return components


@dataclass(frozen=True)
class Violation:
    kind: str  # scc-spans-modules | tuples-unify | module-not-simple
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class CoherenceReport:
    coherent: bool
    violations: tuple[Violation, ...] = ()

    def __str__(self):
        if self.coherent:
            return "coherent"
        return "incoherent\n" + "\n".join(f"  {v}" for v in self.violations)


def is_coherent(P: ModularProgram) -> CoherenceReport:
    """Purely syntactic coherence check.

    Checks that every module is simple, that no pair of patterns of one
    predicate across distinct modules unifies, and that every strongly
    connected component of the dependency graph stays inside one module.
    No interpretation is ever constructed; the cost is polynomial in the
    number of rules times the square of the number of patterns.
    """
    violations: list[Violation] = []
    for i, module in enumerate(P.modules):
        simple, witness = is_simple_module(module)
        if not simple:
            violations.append(
                Violation(
                    "module-not-simple",
                    f"head atom {witness} of module {i} matches no pattern of "
                    "its statement",
                )
            )
    preds = sorted(P.signature().predicates)
    for key in preds:
        for i in range(len(P.modules)):
            for j in range(i + 1, len(P.modules)):
                for u_i in P.modules[i].kappa.patterns_for(key):
                    for u_j in P.modules[j].kappa.patterns_for(key):
                        if patterns_unify(u_i, u_j) is not None:
                            violations.append(
                                Violation(
                                    "tuples-unify",
                                    f"{key[0]}{pattern_str(u_i)} of module {i} "
                                    f"unifies with {key[0]}{pattern_str(u_j)} "
                                    f"of module {j}",
                                )
                            )
    graph = dependency_graph(P)
    for component in strongly_connected_components(graph.vertices, graph.edges):
        indices = {i for _, i in component}
        if len(indices) > 1:
            names = ", ".join(f"({p},{i})" for p, i in component)
            violations.append(
                Violation(
                    "scc-spans-modules",
                    f"strongly connected component {{{names}}} spans modules "
                    f"{sorted(indices)}",
                )
            )
    return CoherenceReport(not violations, tuple(violations))


def union_program(P: ModularProgram) -> Program:
    """Set union of all module rule sets."""
    out = Program.of(())
    for module in P.modules:
        out = out | module.pi
    return out


# --- answer sets of modular programs ----------------------------------------------


def _relevant_base(P: ModularProgram, dom: Domain) -> list[PredAtom]:
    atoms: set[PredAtom] = set()
    for module in P.modules:
        atoms |= ground(module.pi, dom).heads()
    atoms |= extensional_region(P.kappa, P.signature().predicates, dom)
    return sorted(atoms, key=atom_order_key)


def _forced_false_mask(P: ModularProgram, checker: StabilityChecker) -> int:
    # Globally intensional atoms lying in no module region must be false.
    mask = 0
    module_kappas = [m.kappa for m in P.modules]
    for atom, bit in checker.index.items():
        if lambda_holds(P.kappa, atom) and not any(
            lambda_holds(mk, atom) for mk in module_kappas
        ):
            mask |= bit
    return mask


def modular_answer_sets(
    P: ModularProgram,
    dom: Domain,
    engine: str = "reduct",
    cap: int = 24,
) -> frozenset[Interpretation]:
    """Interpretations that are models of every module and satisfy the
    closure condition (true globally-intensional atoms are defined by some
    module).

    `brute` and `reduct` select the per-module stability engine over the
    shared relevant atom base; `topo` evaluates modules in dependency order
    and requires coherence plus an acyclic module ordering.
    """
    if engine not in MODULAR_ENGINES:
        raise EngineError(
            f"engine {engine!r} is not applicable here; choose one of "
            f"{', '.join(MODULAR_ENGINES)}"
        )
    if engine == "topo":
        return _topological_answer_sets(P, dom, cap)
    base = _relevant_base(P, dom)
    if len(base) > cap:
        raise CapacityError(
            f"relevant atom base has {len(base)} atoms (cap {cap}); shrink "
            "the domain or raise the cap"
        )
    checkers = [
        StabilityChecker(ground(m.pi, dom).rules, m.kappa, base) for m in P.modules
    ]
    reference = StabilityChecker((), P.kappa, base)
    forced_false = _forced_false_mask(P, reference)
    found = []
    for T in range(1 << len(base)):
        if T & forced_false:
            continue
        if all(checker.check(T, engine) for checker in checkers):
            found.append(Interpretation(reference.atoms_of(T)))
    return frozenset(found)


def _module_order(P: ModularProgram, dom: Domain) -> list[int]:
    """Topological order of modules, dependencies first.

    Edges come from the dependency graph plus negated body atoms (the graph
    tracks only positive dependencies, but evaluation order must respect
    negative ones too).  Raises when the module-level relation is cyclic.
    """
    n = len(P.modules)
    succ: dict[int, set[int]] = {i: set() for i in range(n)}
    graph = dependency_graph(P)
    for (p, i), (q, j) in graph.edges:
        if i != j:
            succ[i].add(j)

    def matching_modules(atom: PredAtom) -> list[int]:
        out = []
        for j, module in enumerate(P.modules):
            patterns = module.kappa.patterns_for(atom.pred)
            if any(may_share_instance(u, atom.args) for u in patterns):
                out.append(j)
        return out

    for i, module in enumerate(P.modules):
        for rule in module.pi.rules:
            for literal in rule.body:
                if literal.negations == 0 or not isinstance(literal.atom, PredAtom):
                    continue
                for j in matching_modules(literal.atom):
                    if j != i:
                        succ[i].add(j)

    order: list[int] = []
    state: dict[int, int] = {}

    def visit(node: int):
        stack = [(node, iter(sorted(succ[node])))]
        state[node] = 1
        while stack:
            current, it = stack[-1]
            advanced = False
            for child in it:
                if state.get(child, 0) == 1:
                    raise EngineError(
                        "module dependencies are cyclic; the topological "
                        "engine is not applicable"
                    )
                if state.get(child, 0) == 0:
                    state[child] = 1
                    stack.append((child, iter(sorted(succ[child]))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                state[current] = 2
                order.append(current)
    for i in range(n):
        if state.get(i, 0) == 0:
            visit(i)
    return order  # dependencies come first


def _topological_answer_sets(
    P: ModularProgram, dom: Domain, cap: int
) -> frozenset[Interpretation]:
    report = is_coherent(P)
    if not report.coherent:
        raise EngineError(
            "the topological engine requires a coherent modular program:\n"
            + str(report)
        )
    order = _module_order(P, dom)
    base = _relevant_base(P, dom)
    if len(base) > cap:
        raise CapacityError(
            f"relevant atom base has {len(base)} atoms (cap {cap}); shrink "
            "the domain or raise the cap"
        )
    reference = StabilityChecker((), P.kappa, base)
    forced_false = _forced_false_mask(P, reference)
    checkers = {
        i: StabilityChecker(ground(P.modules[i].pi, dom).rules, P.modules[i].kappa, base)
        for i in range(len(P.modules))
    }
    region_masks = {}
    head_masks = {}
    for i, module in enumerate(P.modules):
        mask = 0
        for atom, bit in reference.index.items():
            if lambda_holds(module.kappa, atom):
                mask |= bit
        region_masks[i] = mask
        head_masks[i] = reference.mask_of(
            a for a in ground(module.pi, dom).heads() if a in reference.index
        )

    # Globally extensional atoms are free choices shared by every module.
    ext_mask = reference.ext_mask & ~forced_false
    partials = []
    s = ext_mask
    while True:
        partials.append(s)
        if s == 0:
            break
        s = (s - 1) & ext_mask

    for i in order:
        candidates_mask = head_masks[i] & region_masks[i] & ~forced_false
        extended = []
        for partial in partials:
            s = candidates_mask
            while True:
                candidate = partial | s
                if checkers[i].check(candidate, "reduct"):
                    extended.append(candidate)
                if s == 0:
                    break
                s = (s - 1) & candidates_mask
        partials = extended

    module_kappas = [m.kappa for m in P.modules]
    results = []
    for T in partials:
        I = Interpretation(reference.atoms_of(T))
        if all(
            is_model_of_module(I, m, dom, "reduct") for m in P.modules
        ) and closure_holds(I, P.kappa, module_kappas):
            results.append(I)
    return frozenset(results)


# --- the union/modular comparison harness -------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    modular_sets: tuple[Interpretation, ...]
    union_sets: tuple[Interpretation, ...]
    equal: bool
    only_modular: tuple[Interpretation, ...] = ()
    only_union: tuple[Interpretation, ...] = ()

    def __str__(self):
        lines = [f"modular answer sets ({len(self.modular_sets)}):"]
        lines += [f"  {I}" for I in self.modular_sets]
        lines.append(f"union answer sets ({len(self.union_sets)}):")
        lines += [f"  {I}" for I in self.union_sets]
        lines.append(f"equal: {'yes' if self.equal else 'no'}")
        for label, sets in (
            ("only modular", self.only_modular),
            ("only union", self.only_union),
        ):
            for I in sets:
                lines.append(f"  {label}: {{{I}}}")
        return "\n".join(lines)


def _sorted_interpretations(models: Iterable[Interpretation]):
    return tuple(
        sorted(models, key=lambda I: [atom_order_key(a) for a in I.sorted_atoms()])
    )


def theorem1_check(
    P: ModularProgram,
    dom: Domain,
    engine: str = "reduct",
    cap: int = 24,
) -> ComparisonReport:
    """Compare the modular answer sets with the stable models of the rule
    union under the global statement.

    Equality is the content of the union theorem for coherent programs; on
    an incoherent input the harness warns, still computes both sides, and
    reports whatever it finds.
    """
    report = is_coherent(P)
    if not report.coherent:
        warnings.warn(
            "comparing an incoherent modular program; the union theorem "
            "does not apply",
            stacklevel=2,
        )
    union_engine = "reduct" if engine == "topo" else engine
    modular = modular_answer_sets(P, dom, engine, cap)
    union = enumerate_kappa_stable(P.kappa, union_program(P), dom, union_engine, cap)
    return ComparisonReport(
        _sorted_interpretations(modular),
        _sorted_interpretations(union),
        modular == union,
        _sorted_interpretations(modular - union),
        _sorted_interpretations(union - modular),
    )
