"""Bounded-domain grounding.

The paper-level semantics quantifies integer variables over all numerals and
general variables over all precomputed terms.  A `Domain` is the finite
stand-in: numerals of a declared interval plus the precomputed terms the
program itself mentions (and, optionally, function terms generated to a
depth).  Grounding instantiates rule variables over the domain, evaluates
arithmetic, resolves comparison literals, and drops every rule instance that
mentions an atom outside the domain in its head or positively in its body
(such atoms are false in every representable interpretation; a negated
out-of-domain atom is simply true).
"""

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import RangeError, SafetyError
from .program import Comparison, Literal, PredAtom, Program, Rule, substitute_rule
from .terms import (
    Func,
    Numeral,
    Sort,
    SymbolicConstant,
    Term,
    Variable,
    eval_ground,
    is_precomputed,
    order_key,
    subterms,
)


@dataclass(frozen=True)
class Domain:
    """Finite universe: an integer interval plus a set of general terms."""

    int_lo: int
    int_hi: int
    general_terms: frozenset[Term] = frozenset()

    def __post_init__(self):
        if self.int_lo > self.int_hi:
            raise RangeError(f"reversed domain {self.int_lo}..{self.int_hi}")
        missing = {
            Numeral(i) for i in range(self.int_lo, self.int_hi + 1)
        } - self.general_terms
        if missing:
            object.__setattr__(
                self, "general_terms", self.general_terms | missing
            )

    @classmethod
    def build(
        cls,
        programs: Iterable[Program],
        lo: int,
        hi: int,
        func_depth: int = 0,
    ) -> "Domain":
        """Domain for a set of programs: numerals lo..hi, the symbolic
        constants and precomputed function terms occurring in the rules, and
        function terms generated up to `func_depth` applications."""
        terms: set[Term] = {Numeral(i) for i in range(lo, hi + 1)}
        functions: set[tuple[str, int]] = set()
        for program in programs:
            for rule in program.rules:
                for t in rule.terms():
                    for s in subterms(t):
                        if isinstance(s, SymbolicConstant):
                            terms.add(s)
                        elif isinstance(s, Func):
                            functions.add((s.name, len(s.args)))
                            if is_precomputed(s):
                                terms.add(s)
        pool = set(terms)
        for _ in range(func_depth):
            new: set[Term] = set()
            for name, arity in sorted(functions):
                for combo in itertools.product(sorted(pool, key=order_key), repeat=arity):
                    new.add(Func(name, combo))
            pool |= new
        return cls(lo, hi, frozenset(pool))

    def integers(self) -> tuple[Term, ...]:
        return tuple(Numeral(i) for i in range(self.int_lo, self.int_hi + 1))

    def terms_sorted(self) -> tuple[Term, ...]:
        return tuple(sorted(self.general_terms, key=order_key))

    def __contains__(self, term: Term) -> bool:
        return term in self.general_terms

    def contains_atom(self, atom: PredAtom) -> bool:
        return all(arg in self.general_terms for arg in atom.args)


@dataclass(frozen=True)
class GroundRule:
    """A fully instantiated rule: precomputed atoms, comparisons resolved.

    Body literals are split by negation count: `pos` holds the plain atoms,
    `neg` the singly negated ones, `negneg` the doubly negated ones.
    """

    head: Optional[PredAtom]
    pos: tuple[PredAtom, ...] = ()
    neg: tuple[PredAtom, ...] = ()
    negneg: tuple[PredAtom, ...] = ()

    def __str__(self):
        parts = [str(a) for a in self.pos]
        parts += [f"not {a}" for a in self.neg]
        parts += [f"not not {a}" for a in self.negneg]
        body = ", ".join(parts)
        if self.head is None:
            return f":- {body}."
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {body}."

    def as_rule(self) -> Rule:
        body = [Literal(a, 0) for a in self.pos]
        body += [Literal(a, 1) for a in self.neg]
        body += [Literal(a, 2) for a in self.negneg]
        return Rule(self.head, tuple(body))


@dataclass(frozen=True)
class GroundProgram:
    """Ground image of a program over a domain, with the extensional atoms
    (free choices) the enclosing intensionality statement contributes."""

    rules: tuple[GroundRule, ...] = ()
    choice_atoms: frozenset[PredAtom] = frozenset()

    def heads(self) -> frozenset[PredAtom]:
        return frozenset(r.head for r in self.rules if r.head is not None)

    def __len__(self):
        return len(self.rules)

    def __str__(self):
        return "\n".join(str(r) for r in self.rules)


def _variable_sorts(rule: Rule) -> dict[str, Sort]:
    sorts: dict[str, Sort] = {}
    for t in rule.terms():
        for s in subterms(t):
            if isinstance(s, Variable):
                sorts[s.name] = s.sort
    return sorts


def _check_safety(rule: Rule, sorts: dict[str, Sort]):
    bound: set[str] = set()
    for lit in rule.body:
        if lit.negations == 0 and isinstance(lit.atom, PredAtom):
            for arg in lit.atom.args:
                for s in subterms(arg):
                    if isinstance(s, Variable):
                        bound.add(s.name)
    for name, sort in sorted(sorts.items()):
        if sort is Sort.INTEGER:
            continue  # integer variables are bounded by the interval
        if name not in bound:
            raise SafetyError(
                f"variable {name} in rule `{rule}` occurs in no positive "
                "body atom and is not integer-sorted"
            )


def _eval_atom(atom: PredAtom) -> PredAtom:
    return PredAtom(atom.name, tuple(eval_ground(a) for a in atom.args))


def _finish_instance(rule: Rule, dom: Domain) -> Optional[GroundRule]:
    head = None
    if rule.head is not None:
        head = _eval_atom(rule.head)
        if not dom.contains_atom(head):
            return None
    pos: list[PredAtom] = []
    neg: list[PredAtom] = []
    negneg: list[PredAtom] = []
    for lit in rule.body:
        if isinstance(lit.atom, Comparison):
            truth = Comparison(
                lit.atom.rel, eval_ground(lit.atom.lhs), eval_ground(lit.atom.rhs)
            ).holds()
            if lit.negations == 1:
                truth = not truth
            if truth:
                continue
            return None
        atom = _eval_atom(lit.atom)
        in_domain = dom.contains_atom(atom)
        if lit.negations == 0:
            if not in_domain:
                return None
            pos.append(atom)
        elif lit.negations == 1:
            if in_domain:
                neg.append(atom)
        else:
            if not in_domain:
                return None
            negneg.append(atom)
    key = lambda a: (a.name, len(a.args), str(a))
    return GroundRule(
        head,
        tuple(sorted(dict.fromkeys(pos), key=key)),
        tuple(sorted(dict.fromkeys(neg), key=key)),
        tuple(sorted(dict.fromkeys(negneg), key=key)),
    )


def ground(pi: Program, dom: Domain) -> GroundProgram:
    """Instantiate every rule over the domain.

    Integer variables range over the interval's numerals, general variables
    over the domain's terms; general variables must additionally occur in a
    positive body atom (range restriction), or the rule is rejected.
    """
    out: dict[GroundRule, None] = {}
    integers = dom.integers()
    generals = dom.terms_sorted()
    for rule in pi.rules:
        sorts = _variable_sorts(rule)
        _check_safety(rule, sorts)
        names = sorted(sorts)
        pools = [
            integers if sorts[name] is Sort.INTEGER else generals for name in names
        ]
        for combo in itertools.product(*pools):
            theta = dict(zip(names, combo))
            instance = substitute_rule(rule, theta)
            finished = _finish_instance(instance, dom)
            if finished is not None:
                out[finished] = None
    return GroundProgram(tuple(sorted(out, key=str)))
