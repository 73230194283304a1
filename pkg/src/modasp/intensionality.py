"""Intensionality statements: which argument tuples of a predicate are
defined by rules (intensional) and which are free choices (extensional).

A simple statement maps each predicate to a set of linear patterns whose
elements are variables or precomputed terms.  The induced membership
formula for a predicate is a disjunction over its patterns of equality
constraints at the non-variable positions; the extensional axioms turn
every tuple outside that formula into an unconditional choice.
"""

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import PatternError, RequirementError, UnboundPlaceholderError
from .program import PredAtom, Signature
from .terms import (
    Arith,
    Func,
    Numeral,
    Sort,
    SymbolicConstant,
    Term,
    Valuation,
    Variable,
    constants_of,
    is_precomputed,
    simplify,
    substitute_constants,
    substitute_variables,
    variables_of,
)

Pattern = tuple[Term, ...]
PredKey = tuple[str, int]


def pattern_str(pattern: Pattern) -> str:
    return f"({','.join(str(e) for e in pattern)})"


def validate_pattern(pattern: Pattern):
    """A simple pattern holds variables and precomputed terms, linearly."""
    seen: set[str] = set()
    for elem in pattern:
        if isinstance(elem, Variable):
            if elem.name in seen:
                raise PatternError(
                    f"variable {elem.name} occurs twice in {pattern_str(pattern)}"
                )
            seen.add(elem.name)
        elif not is_precomputed(elem):
            raise PatternError(
                f"element {elem} of {pattern_str(pattern)} is neither a "
                "variable nor a precomputed term"
            )


def is_placeholder_ground(t: Term, placeholders: set[str]) -> bool:
    """True when `t` is ground over placeholders, numerals and arithmetic."""
    if isinstance(t, (Variable, Func)):
        return False
    if isinstance(t, Numeral):
        return True
    if isinstance(t, SymbolicConstant):
        return t.name in placeholders
    return is_placeholder_ground(t.left, placeholders) and is_placeholder_ground(
        t.right, placeholders
    )


def _canonical_entries(
    mapping: Mapping[PredKey, Iterable[Pattern]]
) -> tuple[tuple[PredKey, tuple[Pattern, ...]], ...]:
    out = []
    for key, patterns in mapping.items():
        unique = tuple(dict.fromkeys(patterns))
        for p in unique:
            if len(p) != key[1]:
                raise PatternError(
                    f"pattern {pattern_str(p)} has length {len(p)}, expected "
                    f"{key[1]} for predicate {key[0]}/{key[1]}"
                )
        if unique:
            out.append((key, tuple(sorted(unique, key=pattern_str))))
    return tuple(sorted(out))


@dataclass(frozen=True)
class IntensionalityStatement:
    """Map from predicates to sets of simple patterns.

    Predicates without an entry are purely extensional (empty pattern set).
    """

    entries: tuple[tuple[PredKey, tuple[Pattern, ...]], ...] = ()

    def __post_init__(self):
        for _, patterns in self.entries:
            for p in patterns:
                validate_pattern(p)

    @classmethod
    def of(cls, mapping: Mapping[PredKey, Iterable[Pattern]]) -> "IntensionalityStatement":
        return cls(_canonical_entries(mapping))

    @classmethod
    def purely_intensional(cls, predicates: Iterable[PredKey]) -> "IntensionalityStatement":
        mapping = {
            key: [tuple(Variable(f"X{i + 1}") for i in range(key[1]))]
            for key in predicates
        }
        return cls.of(mapping)

    def as_dict(self) -> dict[PredKey, tuple[Pattern, ...]]:
        return dict(self.entries)

    def patterns_for(self, key: PredKey) -> tuple[Pattern, ...]:
        for k, patterns in self.entries:
            if k == key:
                return patterns
        return ()

    def predicates(self) -> tuple[PredKey, ...]:
        return tuple(k for k, _ in self.entries)

    def is_purely_extensional(self, key: PredKey) -> bool:
        return not self.patterns_for(key)

    def is_purely_intensional(self, key: PredKey) -> bool:
        return any(
            all(isinstance(e, Variable) for e in p) for p in self.patterns_for(key)
        )

    def __str__(self):
        parts = []
        for (name, arity), patterns in self.entries:
            pats = ", ".join(f"{name}{pattern_str(p)}" for p in patterns)
            parts.append(f"{name}/{arity}: {pats}")
        return "; ".join(parts) if parts else "(purely extensional)"


@dataclass(frozen=True)
class ParametricIntensionality:
    """Intensionality patterns whose ground elements may mention placeholders."""

    placeholders: frozenset[str] = frozenset()
    entries: tuple[tuple[PredKey, tuple[Pattern, ...]], ...] = ()

    def __post_init__(self):
        for _, patterns in self.entries:
            for p in patterns:
                seen: set[str] = set()
                for elem in p:
                    if isinstance(elem, Variable):
                        if elem.name in seen:
                            raise PatternError(
                                f"variable {elem.name} occurs twice in "
                                f"{pattern_str(p)}"
                            )
                        seen.add(elem.name)
                        continue
                    # A placeholder-free element must be precomputed; an
                    # element mentioning placeholders may combine them only
                    # with numerals and arithmetic.
                    placeholder_free = not (
                        constants_of(elem) & set(self.placeholders)
                    )
                    if placeholder_free and is_precomputed(elem):
                        continue
                    if not placeholder_free and is_placeholder_ground(
                        elem, set(self.placeholders)
                    ):
                        continue
                    raise PatternError(
                        f"element {elem} of {pattern_str(p)} must be a "
                        "variable, a precomputed term, or ground over "
                        f"{{{','.join(sorted(self.placeholders))}}}"
                    )

    @classmethod
    def of(
        cls, placeholders: Iterable[str], mapping: Mapping[PredKey, Iterable[Pattern]]
    ) -> "ParametricIntensionality":
        return cls(frozenset(placeholders), _canonical_entries(mapping))

    def as_dict(self) -> dict[PredKey, tuple[Pattern, ...]]:
        return dict(self.entries)

    def patterns_for(self, key: PredKey) -> tuple[Pattern, ...]:
        for k, patterns in self.entries:
            if k == key:
                return patterns
        return ()


def instantiate_chi(
    chi: ParametricIntensionality, theta: Valuation
) -> IntensionalityStatement:
    """Substitute placeholder values into every pattern and simplify.

    The valuation must cover the placeholders that actually occur; an
    integer-sorted occurrence (inside arithmetic) must receive a numeral,
    otherwise simplification cannot fold the term to a precomputed one.
    """
    mapping = theta.as_dict()
    out: dict[PredKey, list[Pattern]] = {}
    for key, patterns in chi.entries:
        new = []
        for p in patterns:
            elems = []
            for elem in p:
                missing = (constants_of(elem) & chi.placeholders) - set(mapping)
                if missing:
                    raise UnboundPlaceholderError(
                        f"placeholder {sorted(missing)[0]} of pattern "
                        f"{pattern_str(p)} is not assigned by the valuation"
                    )
                value = simplify(substitute_constants(elem, mapping))
                if not (isinstance(value, Variable) or is_precomputed(value)):
                    raise PatternError(
                        f"pattern element {elem} instantiates to {value}, which "
                        "is not precomputed (integer placeholder assigned a "
                        "non-numeral?)"
                    )
                elems.append(value)
            new.append(tuple(elems))
        out[key] = new
    return IntensionalityStatement.of(out)


# --- membership formulas -------------------------------------------------------


@dataclass(frozen=True)
class LambdaFormula:
    """Disjunction over patterns of equality constraints at ground positions.

    An empty disjunction is falsity; a disjunct with no constraints is truth.
    """

    pred: PredKey
    disjuncts: tuple[tuple[tuple[int, Term], ...], ...]

    def is_true(self) -> bool:
        return any(not d for d in self.disjuncts)

    def is_false(self) -> bool:
        return not self.disjuncts

    def holds(self, args: Sequence[Term]) -> bool:
        """Classical satisfaction at a tuple of precomputed terms."""
        return any(
            all(args[i] == value for i, value in disjunct)
            for disjunct in self.disjuncts
        )

    def var_names(self) -> tuple[str, ...]:
        return tuple(f"X{i + 1}" for i in range(self.pred[1]))

    def __str__(self):
        if self.is_false():
            return "false"
        parts = []
        for disjunct in self.disjuncts:
            if not disjunct:
                return "true"
            eqs = [f"X{i + 1} = {value}" for i, value in disjunct]
            parts.append(" and ".join(eqs) if len(eqs) == 1 else f"({' and '.join(eqs)})")
        return " or ".join(parts)


def lambda_formula(kappa: IntensionalityStatement, pred: PredKey) -> LambdaFormula:
    """The membership formula of `pred` under `kappa`, one disjunct per pattern."""
    disjuncts = []
    for pattern in kappa.patterns_for(pred):
        disjuncts.append(
            tuple(
                (i, elem)
                for i, elem in enumerate(pattern)
                if not isinstance(elem, Variable)
            )
        )
    return LambdaFormula(pred, tuple(disjuncts))


def lambda_holds(kappa: IntensionalityStatement, atom: PredAtom) -> bool:
    """True when some pattern of the atom's predicate matches its arguments.

    Ground pattern positions must equal the argument exactly; variable
    positions are unconstrained.  Equals classical satisfaction of the
    membership formula at the argument tuple.
    """
    for pattern in kappa.patterns_for(atom.pred):
        if all(
            isinstance(elem, Variable) or elem == arg
            for elem, arg in zip(pattern, atom.args)
        ):
            return True
    return False


@dataclass(frozen=True)
class ExtensionalAxiom:
    """For tuples outside the membership formula, the atom is a free choice."""

    pred: PredKey
    lam: LambdaFormula

    def __str__(self):
        name, arity = self.pred
        xs = ",".join(f"X{i + 1}" for i in range(arity))
        atom = f"{name}({xs})" if arity else name
        return f"forall {xs or '()'}: not ({self.lam}) -> {atom} or not {atom}"


def extensional_axioms(
    kappa: IntensionalityStatement, sig: Signature
) -> tuple[ExtensionalAxiom, ...]:
    """One choice axiom per predicate of the signature."""
    preds = sorted(set(sig.predicates) | set(kappa.predicates()))
    return tuple(ExtensionalAxiom(p, lambda_formula(kappa, p)) for p in preds)


# --- matching and unification ---------------------------------------------------


def pattern_match(pattern: Pattern, terms: Sequence[Term]) -> Optional[dict[str, Term]]:
    """One-way matching of a pattern against a (simplified) term tuple.

    Returns a substitution from the pattern's variables to terms, possibly
    non-ground, making the pattern equal the elementwise simplification of
    `terms`; ground pattern positions must match exactly.  Returns None on
    failure.
    """
    if len(pattern) != len(terms):
        return None
    theta: dict[str, Term] = {}
    for elem, term in zip(pattern, terms):
        target = simplify(term)
        if isinstance(elem, Variable):
            theta[elem.name] = target
        elif elem != target:
            return None
    return theta


def _rename_clashes(left: Pattern, right: Pattern) -> Pattern:
    taken = {v for e in left for v in variables_of(e)}
    renamed = []
    for elem in right:
        if isinstance(elem, Variable) and elem.name in taken:
            name = elem.name + "'"
            while name in taken:
                name += "'"
            renamed.append(Variable(name, elem.sort))
        else:
            renamed.append(elem)
    return tuple(renamed)


def patterns_unify(u1: Pattern, u2: Pattern) -> Optional[dict[str, Term]]:
    """Unify two patterns, renaming shared variable names apart first.

    Patterns are linear and their ground elements precomputed, so positionwise
    resolution is complete: a variable on either side takes the other side's
    element, and two ground elements must be equal.  The returned substitution
    applied to both (renamed) tuples makes them elementwise equal.
    """
    if len(u1) != len(u2):
        return None
    u2 = _rename_clashes(u1, u2)
    theta: dict[str, Term] = {}
    for a, b in zip(u1, u2):
        if isinstance(a, Variable) and isinstance(b, Variable):
            theta[a.name] = b
        elif isinstance(a, Variable):
            theta[a.name] = b
        elif isinstance(b, Variable):
            theta[b.name] = a
        elif a != b:
            return None
    return theta


def pattern_subsumes(general: Pattern, special: Pattern) -> bool:
    """True when every instance of `special` is an instance of `general`.

    Holds exactly when `general` has a variable, or an equal precomputed
    term, at every position.
    """
    if len(general) != len(special):
        return False
    return all(
        isinstance(g, Variable) or g == s for g, s in zip(general, special)
    )


@dataclass(frozen=True)
class RequirementViolation:
    pred: PredKey
    module_index: int
    pattern: Pattern

    def __str__(self):
        name, arity = self.pred
        return (
            f"pattern {name}{pattern_str(self.pattern)} of module "
            f"{self.module_index} is not subsumed by any global pattern "
            f"for {name}/{arity}"
        )


def check_requirement(
    kappa: IntensionalityStatement,
    module_kappas: Sequence[IntensionalityStatement],
) -> Optional[RequirementViolation]:
    """Verify that every module pattern is covered by the global statement.

    Over the infinite term sorts, a pattern's instance set lies inside a
    finite union of patterns exactly when a single pattern of the union
    subsumes it: any strictly more constrained pattern fixes finitely many
    values along a free axis and a finite union of those cannot cover it.
    Returns None on success, else the first violating (predicate, module
    index, pattern) triple.
    """
    for index, module_kappa in enumerate(module_kappas):
        for key, patterns in module_kappa.entries:
            global_patterns = kappa.patterns_for(key)
            for u in patterns:
                if not any(pattern_subsumes(g, u) for g in global_patterns):
                    return RequirementViolation(key, index, u)
    return None


def require_coverage(
    kappa: IntensionalityStatement,
    module_kappas: Sequence[IntensionalityStatement],
):
    violation = check_requirement(kappa, module_kappas)
    if violation is not None:
        raise RequirementError(
            str(violation),
            predicate=violation.pred,
            module_index=violation.module_index,
            pattern=violation.pattern,
        )


# --- instance overlap (dependency analysis) -------------------------------------


def may_share_instance(pattern: Pattern, terms: Sequence[Term]) -> bool:
    """Could some ground instance of `terms` land in the pattern's region?

    Pattern elements are variables or precomputed terms; term elements may
    also carry arithmetic over rule variables.  Because patterns are linear,
    a variable position of the pattern constrains nothing; at a ground
    position the rule term must be able to evaluate to that value under a
    consistent assignment of rule variables.  Arithmetic against a numeral
    is inverted exactly while one variable is free; with several free
    variables integer solutions always exist for +, - and *, so the answer
    is yes without recording bindings (an over-approximation that can only
    add dependency edges).
    """
    if len(pattern) != len(terms):
        return False
    bindings: dict[str, Term] = {}
    for p, t in zip(pattern, terms):
        if isinstance(p, Variable):
            continue
        if not _instance_match(p, simplify(t), bindings):
            return False
    return True


def _instance_match(g: Term, t: Term, bindings: dict[str, Term]) -> bool:
    if isinstance(t, Variable):
        bound = bindings.get(t.name)
        if bound is not None:
            return bound == g
        if t.sort is Sort.INTEGER and not isinstance(g, Numeral):
            return False
        bindings[t.name] = g
        return True
    if isinstance(t, Arith):
        if not isinstance(g, Numeral):
            return False
        return _solve_arith(t, g.value, bindings) is not False
    if isinstance(t, Func):
        if not (
            isinstance(g, Func) and g.name == t.name and len(g.args) == len(t.args)
        ):
            return False
        return all(
            _instance_match(ga, simplify(ta), bindings)
            for ga, ta in zip(g.args, t.args)
        )
    return g == t


def _solve_arith(t: Term, target: int, bindings: dict[str, Term]) -> Optional[bool]:
    t = simplify(substitute_variables(t, bindings))
    free = variables_of(t)
    if not free:
        return isinstance(t, Numeral) and t.value == target
    if len(free) > 1:
        return None
    return _invert(t, target, bindings)


def _invert(t: Term, target: int, bindings: dict[str, Term]) -> bool:
    if isinstance(t, Variable):
        bindings[t.name] = Numeral(target)
        return True
    if isinstance(t, Numeral):
        return t.value == target
    if isinstance(t, (SymbolicConstant, Func)):
        return False
    left, right = simplify(t.left), simplify(t.right)
    var_on_left = bool(variables_of(left))
    side, other = (left, right) if var_on_left else (right, left)
    if not isinstance(other, Numeral):
        return False
    c = other.value
    if t.op == "+":
        return _invert(side, target - c, bindings)
    if t.op == "-":
        if var_on_left:
            return _invert(side, target + c, bindings)
        return _invert(side, c - target, bindings)
    if c == 0:
        return target == 0
    if target % c != 0:
        return False
    return _invert(side, target // c, bindings)
