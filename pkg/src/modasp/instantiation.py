"""Instantiating parametric subprograms: valuations applied to programs,
modules and their parametric templates, and the two collective readings of
a control plan (plain union vs. a modular program)."""

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import PatternError, UnboundPlaceholderError
from .intensionality import (
    IntensionalityStatement,
    ParametricIntensionality,
    Pattern,
    PredKey,
    instantiate_chi,
    require_coverage,
)
from .program import Program, Rule, Signature, map_rule_terms
from .subprograms import ClingoProgram, ControlPlan, SubprogramSpec
from .terms import (
    Arith,
    Numeral,
    Term,
    Valuation,
    Variable,
    constants_of,
    simplify,
    substitute_constants,
    subterms,
    variables_of,
)


def apply_valuation(
    x: Union[Program, Rule, Term],
    v: Valuation,
    placeholders: Optional[Iterable[str]] = None,
) -> Union[Program, Rule, Term]:
    """Substitute placeholder occurrences by their values, with no
    simplification.

    `placeholders` defaults to the valuation's own domain; when given, an
    occurrence of a placeholder outside the valuation raises.
    """
    mapping = v.as_dict()
    expected = set(mapping) if placeholders is None else set(placeholders)

    def check(term: Term):
        unbound = (constants_of(term) & expected) - set(mapping)
        if unbound:
            raise UnboundPlaceholderError(
                f"placeholder {sorted(unbound)[0]} has no value in {v}"
            )

    def subst(term: Term) -> Term:
        check(term)
        return substitute_constants(term, mapping)

    if isinstance(x, Program):
        return Program.of(map_rule_terms(rule, subst) for rule in x.rules)
    if isinstance(x, Rule):
        return map_rule_terms(x, subst)
    return subst(x)


@dataclass(frozen=True)
class Module:
    """A program together with the intensionality statement scoping it."""

    kappa: IntensionalityStatement
    pi: Program

    def signature(self) -> Signature:
        sig = self.pi.signature()
        return Signature(
            sig.predicates | frozenset(self.kappa.predicates()),
            sig.constants,
            sig.functions,
        )


@dataclass(frozen=True)
class ParametricModule:
    """A module template over a set of placeholder constants."""

    placeholders: frozenset[str]
    chi: ParametricIntensionality
    pi: Program

    def __post_init__(self):
        if not self.chi.placeholders <= self.placeholders:
            extra = sorted(self.chi.placeholders - self.placeholders)
            raise PatternError(
                f"intensionality placeholders {extra} are not module placeholders"
            )

    def integer_placeholders(self) -> frozenset[str]:
        """Placeholders occurring under arithmetic anywhere in the program."""
        out: set[str] = set()
        for rule in self.pi.rules:
            for term in rule.terms():
                for s in subterms(term):
                    if isinstance(s, Arith):
                        for side in (s.left, s.right):
                            out |= constants_of(side) & self.placeholders
        return frozenset(out)


def instantiate_module(phi: ParametricModule, theta: Valuation) -> Module:
    """One instance of a parametric module: patterns are substituted and
    simplified, program rules are substituted verbatim."""
    mapping = theta.as_dict()
    missing = sorted(phi.placeholders - set(mapping))
    if missing:
        raise UnboundPlaceholderError(
            f"placeholder {missing[0]} has no value in {theta}"
        )
    for name in sorted(phi.integer_placeholders()):
        if not isinstance(mapping[name], Numeral):
            raise PatternError(
                f"placeholder {name} is integer-sorted (it occurs under "
                f"arithmetic) but the valuation assigns {mapping[name]}"
            )
    kappa = instantiate_chi(phi.chi, theta)
    pi = apply_valuation(phi.pi, theta, phi.placeholders)
    return Module(kappa, pi)


def default_chi(
    name: str, placeholders: Iterable[str], pi: Program
) -> ParametricIntensionality:
    """Head-derived parametric intensionality for subprogram `name`: one
    pattern per rule head, with rule variables abstracted to fresh
    positional pattern variables and placeholder/ground arguments kept.

    A head argument mixing a rule variable with placeholders under
    arithmetic admits neither reading and is rejected.
    """
    placeholders = frozenset(placeholders)
    mapping: dict[PredKey, list[Pattern]] = {}
    for rule in pi.rules:
        if rule.head is None:
            continue
        elems: list[Term] = []
        for position, arg in enumerate(rule.head.args):
            reduced = simplify(arg)
            if variables_of(reduced):
                if constants_of(reduced) & placeholders:
                    raise PatternError(
                        f"head argument {arg} of rule `{rule}` in subprogram "
                        f"{name!r} mixes a rule variable with placeholders; "
                        "no simple pattern covers it"
                    )
                elems.append(Variable(f"X{position + 1}"))
            else:
                elems.append(reduced)
        mapping.setdefault(rule.head.pred, []).append(tuple(elems))
    return ParametricIntensionality.of(placeholders, mapping)


@dataclass(frozen=True)
class ModularProgram:
    """A global intensionality statement with a list of modules.

    Construction checks that every module pattern is subsumed by a global
    pattern, so each atom defined in a module is intensional globally.
    """

    kappa: IntensionalityStatement
    modules: tuple[Module, ...]

    def __post_init__(self):
        require_coverage(self.kappa, [m.kappa for m in self.modules])

    def signature(self) -> Signature:
        sig = Signature(predicates=frozenset(self.kappa.predicates()))
        for module in self.modules:
            sig = sig | module.signature()
        return sig


def collective_union(
    clingo_program: ClingoProgram, specs: Iterable[SubprogramSpec]
) -> Program:
    """The non-modular reading of a control plan: the set union of every
    instantiated subprogram."""
    out = Program.of(())
    for spec in specs:
        instantiated = apply_valuation(
            clingo_program.subprogram(spec.name), spec.valuation, spec.placeholders
        )
        out = out | instantiated
    return out


def _plan_chi(
    clingo_program: ClingoProgram, plan: ControlPlan, name: str
) -> ParametricIntensionality:
    params = clingo_program.declarations()[name]
    overrides = plan.module_chi_dict().get(name)
    pi = clingo_program.subprogram(name)
    if overrides is None:
        return default_chi(name, params, pi)
    return ParametricIntensionality.of(params, overrides)


def collective_modular(
    clingo_program: ClingoProgram, plan: ControlPlan
) -> ModularProgram:
    """The modular reading of a control plan.

    Each used subprogram becomes a parametric module (pattern overrides from
    the plan, else head-derived patterns); every spec instantiates one
    module, identical instantiations collapsing; the global statement comes
    from the plan's `intensional` lines or defaults to purely intensional on
    every predicate of the assembled signature.
    """
    chis = {
        name: _plan_chi(clingo_program, plan, name)
        for name in dict.fromkeys(spec.name for spec in plan.specs)
    }
    modules: list[Module] = []
    for spec in plan.specs:
        module = instantiate_module(
            ParametricModule(
                frozenset(spec.placeholders),
                chis[spec.name],
                clingo_program.subprogram(spec.name),
            ),
            spec.valuation,
        )
        if module not in modules:
            modules.append(module)

    global_patterns = plan.global_kappa_dict()
    if global_patterns is not None:
        kappa = IntensionalityStatement.of(global_patterns)
    else:
        preds: set[PredKey] = set()
        for module in modules:
            preds |= set(module.signature().predicates)
        kappa = IntensionalityStatement.purely_intensional(preds)
    return ModularProgram(kappa, tuple(modules))
