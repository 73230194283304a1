"""Model checking and enumeration under the here-and-there criterion.

An interpretation is a finite set of precomputed atoms (everything outside
it is false).  Stability of a model is checked either by brute force over
the proper here-world subsets, or through the program reduct: delete every
rule with a refuted negated literal, strip the remaining negated literals,
add one fact per true extensional atom, and compare the least model with
the candidate.  Both engines share the ground program but follow separate
code paths, and the test suite holds them to identical answers.
"""

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import CapacityError, DomainError, EngineError, NotIntensionalError
from .grounding import Domain, GroundProgram, GroundRule, ground
from .intensionality import IntensionalityStatement, lambda_holds
from .program import (
    Comparison,
    Literal,
    PredAtom,
    Program,
    Rule,
    atom_is_precomputed,
    atom_order_key,
)
from .terms import (
    Numeral,
    Sort,
    Term,
    Variable,
    eval_ground,
    substitute_variables,
    subterms,
)

ENGINES = ("brute", "reduct", "fixpoint")


@dataclass(frozen=True)
class Interpretation:
    """A finite set of precomputed atoms, standing for everything true."""

    atoms: frozenset[PredAtom] = frozenset()

    @classmethod
    def of(cls, atoms: Iterable[PredAtom]) -> "Interpretation":
        atoms = frozenset(atoms)
        for atom in atoms:
            if not isinstance(atom, PredAtom) or not atom_is_precomputed(atom):
                raise DomainError(f"interpretation atom {atom} is not precomputed")
        return cls(atoms)

    def sorted_atoms(self) -> list[PredAtom]:
        return sorted(self.atoms, key=atom_order_key)

    def __contains__(self, atom: PredAtom) -> bool:
        return atom in self.atoms

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.sorted_atoms())

    def __str__(self):
        return " ".join(str(a) for a in self.sorted_atoms())


@dataclass(frozen=True)
class HTInterpretation:
    """Two-world interpretation: `here` is a subset of the atoms true `there`."""

    here: frozenset[PredAtom]
    there: Interpretation

    def __post_init__(self):
        if not self.here <= self.there.atoms:
            raise DomainError("here-world must be a subset of the there-world atoms")

    @classmethod
    def of(cls, here: Iterable[PredAtom], there: Interpretation) -> "HTInterpretation":
        return cls(frozenset(here), there)


# --- direct satisfaction (reference implementations) ---------------------------


def _eval_atom(atom: PredAtom) -> PredAtom:
    return PredAtom(atom.name, tuple(eval_ground(a) for a in atom.args))


def _comparison_truth(comparison: Comparison) -> bool:
    return Comparison(
        comparison.rel, eval_ground(comparison.lhs), eval_ground(comparison.rhs)
    ).holds()


def _literal_truth_classical(I: Interpretation, literal: Literal) -> bool:
    if isinstance(literal.atom, Comparison):
        value = _comparison_truth(literal.atom)
    else:
        value = _eval_atom(literal.atom) in I.atoms
    if literal.negations == 1:
        return not value
    return value


def _literal_truth_ht(hi: HTInterpretation, literal: Literal) -> bool:
    atom = literal.atom
    if literal.negations == 1:
        # not A holds here-and-there exactly when the there-world refutes A.
        return not _literal_truth_classical(hi.there, Literal(atom, 0))
    if literal.negations == 2:
        return _literal_truth_classical(hi.there, Literal(atom, 0))
    if isinstance(atom, Comparison):
        return _comparison_truth(atom)
    return _eval_atom(atom) in hi.here


def _classical_rule(I: Interpretation, rule: Rule) -> bool:
    body = all(_literal_truth_classical(I, lit) for lit in rule.body)
    if not body:
        return True
    return rule.head is not None and _eval_atom(rule.head) in I.atoms


def _ht_rule(hi: HTInterpretation, rule: Rule) -> bool:
    # An implication holds at the here-world when (i) its body fails here or
    # its head holds here, and (ii) it holds classically at the there-world.
    if not _classical_rule(hi.there, rule):
        return False
    body = all(_literal_truth_ht(hi, lit) for lit in rule.body)
    if not body:
        return True
    return rule.head is not None and _eval_atom(rule.head) in hi.here


def _as_rules(f, dom: Optional[Domain]) -> list[Rule]:
    if isinstance(f, GroundRule):
        return [f.as_rule()]
    if isinstance(f, Program):
        out: list[Rule] = []
        for rule in f.rules:
            out.extend(_as_rules(rule, dom))
        return out
    if isinstance(f, (PredAtom, Comparison)):
        f = Literal(f, 0)
    if isinstance(f, Literal):
        return [f]
    if isinstance(f, Rule):
        if not f.variables():
            return [f]
        if dom is None:
            raise DomainError(
                "a non-ground rule needs a domain for quantifier expansion"
            )
        return [gr.as_rule() for gr in ground(Program.of([f]), dom).rules]
    raise TypeError(f"cannot evaluate object of type {type(f).__name__}")


def classical_satisfies(I: Interpretation, f, dom: Optional[Domain] = None) -> bool:
    """Classical satisfaction of a rule, literal or atom; non-ground rules
    are expanded over the domain."""
    items = _as_rules(f, dom)
    for item in items:
        if isinstance(item, Literal):
            if not _literal_truth_classical(I, item):
                return False
        elif not _classical_rule(I, item):
            return False
    return True


def ht_satisfies(hi: HTInterpretation, f, dom: Optional[Domain] = None) -> bool:
    """Here-and-there satisfaction of a rule, literal or atom."""
    items = _as_rules(f, dom)
    for item in items:
        if isinstance(item, Literal):
            if not _literal_truth_ht(hi, item):
                return False
        elif not _ht_rule(hi, item):
            return False
    return True


# --- extensional atoms over a domain --------------------------------------------


def extensional_region(
    kappa: IntensionalityStatement,
    predicates: Iterable[tuple[str, int]],
    dom: Domain,
) -> frozenset[PredAtom]:
    """All atoms over the domain whose argument tuple no pattern matches."""
    out: set[PredAtom] = set()
    terms = dom.terms_sorted()
    for name, arity in sorted(set(predicates)):
        if kappa.is_purely_intensional((name, arity)):
            continue
        for combo in itertools.product(terms, repeat=arity):
            atom = PredAtom(name, combo)
            if not lambda_holds(kappa, atom):
                out.add(atom)
    return frozenset(out)


def ground_with_choices(
    pi: Program, kappa: IntensionalityStatement, dom: Domain
) -> GroundProgram:
    """Ground image of a program plus the extensional atoms of its statement."""
    gp = ground(pi, dom)
    preds = set(pi.signature().predicates) | set(kappa.predicates())
    return GroundProgram(gp.rules, extensional_region(kappa, preds, dom))


# --- compiled stability checking -------------------------------------------------


class StabilityChecker:
    """Mask-compiled stability test over a fixed atom universe.

    Candidates are bit masks over the universe; atoms outside the universe
    are false in every candidate, which resolves their literals at compile
    time.  A rule whose head falls outside the universe compiles to a
    constraint: no candidate making its body true can be a classical model.
    """

    def __init__(
        self,
        rules: Sequence[GroundRule],
        kappa: IntensionalityStatement,
        universe: Sequence[PredAtom],
    ):
        self.universe = list(universe)
        self.index = {atom: 1 << i for i, atom in enumerate(self.universe)}
        ext = 0
        for atom, bit in self.index.items():
            if not lambda_holds(kappa, atom):
                ext |= bit
        self.ext_mask = ext
        self.compiled: list[tuple[Optional[int], int, int, int]] = []
        for rule in rules:
            entry = self._compile_rule(rule)
            if entry is not None:
                self.compiled.append(entry)

    def _compile_rule(self, rule: GroundRule):
        pos = 0
        for atom in rule.pos:
            bit = self.index.get(atom)
            if bit is None:
                return None  # positive body atom can never hold
            pos |= bit
        negneg = 0
        for atom in rule.negneg:
            bit = self.index.get(atom)
            if bit is None:
                return None
            negneg |= bit
        neg = 0
        for atom in rule.neg:
            bit = self.index.get(atom)
            if bit is not None:
                neg |= bit  # out-of-universe atoms make `not` literals true
        head = None if rule.head is None else self.index.get(rule.head)
        return (head, pos, neg, negneg)

    def atoms_of(self, mask: int) -> frozenset[PredAtom]:
        return frozenset(
            atom for atom, bit in self.index.items() if mask & bit
        )

    def mask_of(self, atoms: Iterable[PredAtom]) -> int:
        mask = 0
        for atom in atoms:
            bit = self.index.get(atom)
            if bit is None:
                raise DomainError(f"atom {atom} is outside the atom universe")
            mask |= bit
        return mask

    def classical(self, T: int) -> bool:
        for head, pos, neg, negneg in self.compiled:
            if pos & T == pos and neg & T == 0 and negneg & T == negneg:
                if head is None or not head & T:
                    return False
        return True

    def _live(self, T: int) -> list[tuple[int, int]]:
        # Rules whose negated literals and positive body hold at the
        # there-world T; only these constrain the here-world.
        return [
            (pos, head)
            for head, pos, neg, negneg in self.compiled
            if neg & T == 0 and negneg & T == negneg and pos & T == pos
            and head is not None
        ]

    def minimal_brute(self, T: int) -> bool:
        """No proper subset of T containing its extensional atoms is closed
        under the live rules; subsets missing a true extensional atom
        violate that atom's choice axiom and need no enumeration."""
        int_mask = T & ~self.ext_mask
        if int_mask == 0:
            return True
        ext = T & self.ext_mask
        live = self._live(T)
        s = int_mask
        while True:
            s = (s - 1) & int_mask
            here = ext | s
            closed = True
            for pos, head in live:
                if pos & here == pos and not head & here:
                    closed = False
                    break
            if closed:
                return False
            if s == 0:
                return True

    def minimal_reduct(self, T: int) -> bool:
        """Least model of the reduct plus extensional facts equals T."""
        derived = T & self.ext_mask
        rules = [
            (pos, head)
            for head, pos, neg, negneg in self.compiled
            if neg & T == 0 and negneg & T == negneg and head is not None
        ]
        changed = True
        while changed:
            changed = False
            remaining = []
            for pos, head in rules:
                if pos & derived == pos:
                    if not head & derived:
                        derived |= head
                        changed = True
                else:
                    remaining.append((pos, head))
            rules = remaining
        return derived == T

    def check(self, T: int, engine: str) -> bool:
        if not self.classical(T):
            return False
        if engine == "brute":
            return self.minimal_brute(T)
        return self.minimal_reduct(T)


def _require_engine(engine: str, allowed: tuple[str, ...]):
    if engine not in allowed:
        raise EngineError(
            f"engine {engine!r} is not applicable here; choose one of "
            f"{', '.join(allowed)}"
        )


def _validate_within_domain(I: Interpretation, dom: Domain):
    for atom in I.sorted_atoms():
        if not dom.contains_atom(atom):
            raise DomainError(f"atom {atom} lies outside the declared domain")


def is_kappa_stable(
    I: Interpretation,
    kappa: IntensionalityStatement,
    pi: Program,
    dom: Domain,
    engine: str = "reduct",
) -> bool:
    """Is `I` a stable model of the program joined with the choice axioms?

    Classical satisfaction of the rules is checked first (the choice axioms
    are classical tautologies), then minimality with the selected engine.
    """
    _require_engine(engine, ("brute", "reduct"))
    _validate_within_domain(I, dom)
    gp = ground(pi, dom)
    universe = I.sorted_atoms()
    checker = StabilityChecker(gp.rules, kappa, universe)
    return checker.check((1 << len(universe)) - 1, engine)


def least_model(rules: Iterable[GroundRule]) -> frozenset[PredAtom]:
    """Least model of the definite rules (negated literals are ignored)."""
    definite = [(r.head, r.pos) for r in rules if r.head is not None]
    watchers: dict[PredAtom, list[int]] = {}
    counts: list[int] = []
    queue: list[PredAtom] = []
    for idx, (head, pos) in enumerate(definite):
        unique = set(pos)
        counts.append(len(unique))
        for atom in unique:
            watchers.setdefault(atom, []).append(idx)
        if not unique:
            queue.append(head)
    derived: set[PredAtom] = set()
    while queue:
        atom = queue.pop()
        if atom in derived:
            continue
        derived.add(atom)
        for idx in watchers.get(atom, ()):
            counts[idx] -= 1
            if counts[idx] == 0:
                queue.append(definite[idx][0])
    return frozenset(derived)


def _fixpoint_models(
    gp: GroundProgram,
    kappa: IntensionalityStatement,
    pi: Program,
    dom: Domain,
) -> frozenset[Interpretation]:
    if any(r.neg or r.negneg for r in gp.rules):
        raise EngineError(
            "the fixpoint engine requires a negation-free ground program"
        )
    preds = set(pi.signature().predicates) | set(kappa.predicates())
    if extensional_region(kappa, preds, dom):
        raise EngineError(
            "the fixpoint engine requires an empty extensional region over "
            "the domain (make every predicate purely intensional)"
        )
    lm = least_model(gp.rules)
    I = Interpretation(lm)
    for rule in gp.rules:
        if rule.head is None and all(a in lm for a in rule.pos):
            return frozenset()  # a constraint rejects the least model
    return frozenset({I})


def enumerate_kappa_stable(
    kappa: IntensionalityStatement,
    pi: Program,
    dom: Domain,
    engine: str = "reduct",
    cap: int = 24,
) -> frozenset[Interpretation]:
    """All stable models over the relevant atom base.

    The base holds the ground rule heads plus every extensional atom over
    the domain; any atom outside it is false in every stable model, because
    a true atom needs either a deriving rule or a choice axiom.
    """
    _require_engine(engine, ENGINES)
    gp = ground(pi, dom)
    if engine == "fixpoint":
        return _fixpoint_models(gp, kappa, pi, dom)
    preds = set(pi.signature().predicates) | set(kappa.predicates())
    base = sorted(
        gp.heads() | extensional_region(kappa, preds, dom), key=atom_order_key
    )
    if len(base) > cap:
        raise CapacityError(
            f"relevant atom base has {len(base)} atoms (cap {cap}); use the "
            "fixpoint engine if applicable, shrink the domain, or raise the cap"
        )
    checker = StabilityChecker(gp.rules, kappa, base)
    found = []
    for T in range(1 << len(base)):
        if checker.check(T, engine):
            found.append(Interpretation(checker.atoms_of(T)))
    return frozenset(found)


# --- support (derivability) -------------------------------------------------------


def _body_holds(I: Interpretation, body: Sequence[Literal]) -> bool:
    return all(_literal_truth_classical(I, lit) for lit in body)


def check_support(
    I: Interpretation,
    kappa: IntensionalityStatement,
    pi: Program,
    atom: PredAtom,
    dom: Domain,
) -> bool:
    """Does some rule and simple substitution derive `atom` with its body
    true in `I`?

    Only intensional atoms are meaningful here: an extensional atom needs no
    deriving rule, so asking about one raises.
    """
    if not lambda_holds(kappa, atom):
        raise NotIntensionalError(
            f"atom {atom} is extensional under the statement; support is "
            "only constrained for intensional atoms"
        )
    for rule in pi.rules:
        if rule.head is None or rule.head.pred != atom.pred:
            continue
        theta0 = _bind_head(rule.head, atom)
        if theta0 is None:
            continue
        sorts = {
            s.name: s.sort
            for t in rule.terms()
            for s in subterms(t)
            if isinstance(s, Variable)
        }
        free = sorted(set(sorts) - set(theta0))
        pools = [
            dom.integers() if sorts[name] is Sort.INTEGER else dom.terms_sorted()
            for name in free
        ]
        for combo in itertools.product(*pools):
            theta = dict(theta0)
            theta.update(zip(free, combo))
            head_args = tuple(
                eval_ground(substitute_variables(a, theta)) for a in rule.head.args
            )
            if head_args != atom.args:
                continue
            body = [
                Literal(_subst_atom(lit.atom, theta), lit.negations)
                for lit in rule.body
            ]
            if _body_holds(I, body):
                return True
    return False


def _bind_head(head: PredAtom, atom: PredAtom) -> Optional[dict[str, Term]]:
    """Bind head variables that appear directly as arguments; reject early
    when a ground argument cannot evaluate to the target."""
    theta: dict[str, Term] = {}
    for arg, target in zip(head.args, atom.args):
        if isinstance(arg, Variable):
            if arg.name in theta:
                if theta[arg.name] != target:
                    return None
            elif arg.sort is Sort.INTEGER and not isinstance(target, Numeral):
                return None
            else:
                theta[arg.name] = target
        elif not any(isinstance(s, Variable) for s in subterms(arg)):
            if eval_ground(arg) != target:
                return None
        # arguments mixing variables into arithmetic are settled by the
        # evaluation guard after enumeration
    return theta


def _subst_atom(atom, theta):
    if isinstance(atom, Comparison):
        return Comparison(
            atom.rel,
            substitute_variables(atom.lhs, theta),
            substitute_variables(atom.rhs, theta),
        )
    return PredAtom(atom.name, tuple(substitute_variables(a, theta) for a in atom.args))
