"""Tokenizer and parsers for program files (.lp) and control files (.ctl).

Program files hold rules in `head :- body.` syntax plus `#program`
declarations; comments run from `%` to end of line.  Control files are
line-based statements (`const`, `use`, `domain`, `intensional`, `module`)
with `#` comments.  Identifiers starting with an uppercase letter are
variables, all others are symbolic constants or predicate/function names.
"""

import re
from dataclasses import dataclass
from typing import Optional

from .errors import (
    ArityMismatchError,
    DeclarationConflictError,
    ParseError,
    PatternError,
    RangeError,
    UnboundConstantError,
    UnknownSubprogramError,
)
from .program import Comparison, Literal, PredAtom, Rule, make_rule
from .subprograms import (
    BASE,
    ClingoProgram,
    ControlPlan,
    ProgramDeclaration,
    SubprogramSpec,
)
from .terms import (
    Arith,
    Func,
    Numeral,
    SymbolicConstant,
    Term,
    Valuation,
    Variable,
    is_precomputed,
    simplify,
    substitute_constants,
)

_TOKEN_BODY = r"""
      (?P<WS>\s+)
    | (?P<COMMENT>{comment})
    | (?P<DIRECTIVE>{directive})
    | (?P<INT>\d+)
    | (?P<NOT>not\b)
    | (?P<IDENT>[a-z_][A-Za-z0-9_]*)
    | (?P<VAR>[A-Z][A-Za-z0-9_]*)
    | (?P<IMPLIES>:-)
    | (?P<RANGE>\.\.)
    | (?P<OP><=|>=|!=|=|<|>)
    | (?P<ARITH>[+\-*])
    | (?P<LPAREN>\()
    | (?P<RPAREN>\))
    | (?P<COMMA>,)
    | (?P<DOT>\.)
    | (?P<COLON>:)
    """

_LP_TOKEN_RE = re.compile(
    _TOKEN_BODY.format(comment=r"%[^\n]*", directive=r"\#program\b"), re.VERBOSE
)
_CTL_TOKEN_RE = re.compile(
    _TOKEN_BODY.format(comment=r"\#[^\n]*", directive=r"(?!x)x"), re.VERBOSE
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str, comment: str) -> list[Token]:
    regex = _LP_TOKEN_RE if comment == "%" else _CTL_TOKEN_RE
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = regex.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, value, line, col))
        for i, ch in enumerate(value):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def next(self) -> Token:
        tok = self.tokens[self.index]
        if tok.kind != "EOF":
            self.index += 1
        return tok

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            expected = what or kind.lower()
            raise ParseError(
                f"expected {expected}, found {tok.text!r}", tok.line, tok.column
            )
        return self.next()

    def error(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column)


# --- terms -------------------------------------------------------------------


def _parse_term(ts: _TokenStream) -> Term:
    return _parse_additive(ts)


def _parse_additive(ts: _TokenStream) -> Term:
    term = _parse_multiplicative(ts)
    while ts.at("ARITH") and ts.peek().text in ("+", "-"):
        op = ts.next().text
        term = Arith(op, term, _parse_multiplicative(ts))
    return term


def _parse_multiplicative(ts: _TokenStream) -> Term:
    term = _parse_primary(ts)
    while ts.at("ARITH") and ts.peek().text == "*":
        ts.next()
        term = Arith("*", term, _parse_primary(ts))
    return term


def _parse_primary(ts: _TokenStream) -> Term:
    tok = ts.peek()
    if tok.kind == "INT":
        ts.next()
        return Numeral(int(tok.text))
    if tok.kind == "ARITH" and tok.text == "-":
        ts.next()
        num = ts.expect("INT", "an integer after unary '-'")
        return Numeral(-int(num.text))
    if tok.kind == "VAR":
        ts.next()
        return Variable(tok.text)
    if tok.kind == "IDENT":
        ts.next()
        if ts.at("LPAREN"):
            ts.next()
            args = [_parse_term(ts)]
            while ts.at("COMMA"):
                ts.next()
                args.append(_parse_term(ts))
            ts.expect("RPAREN")
            return Func(tok.text, tuple(args))
        return SymbolicConstant(tok.text)
    if tok.kind == "LPAREN":
        ts.next()
        term = _parse_term(ts)
        ts.expect("RPAREN")
        return term
    ts.error(f"expected a term, found {tok.text!r}")


def parse_term(text: str) -> Term:
    """Parse a single term, e.g. ``"f(N-1,k)"``."""
    ts = _TokenStream(_tokenize(text, comment="%"))
    term = _parse_term(ts)
    ts.expect("EOF", "end of input")
    return term


# --- rules and program files --------------------------------------------------


def _term_to_pred_atom(ts: _TokenStream, term: Term, tok: Token) -> PredAtom:
    if isinstance(term, SymbolicConstant):
        return PredAtom(term.name)
    if isinstance(term, Func):
        return PredAtom(term.name, term.args)
    raise ParseError(f"expected an atom, found term {term}", tok.line, tok.column)


def _parse_atom(ts: _TokenStream):
    tok = ts.peek()
    term = _parse_term(ts)
    if ts.at("OP"):
        rel = ts.next().text
        rhs = _parse_term(ts)
        return Comparison(rel, term, rhs)
    return _term_to_pred_atom(ts, term, tok)


def _parse_literal(ts: _TokenStream) -> Literal:
    negations = 0
    while ts.at("NOT"):
        tok = ts.next()
        negations += 1
        if negations > 2:
            raise ParseError(
                "at most two occurrences of `not` may precede an atom",
                tok.line,
                tok.column,
            )
    return Literal(_parse_atom(ts), negations)


def _parse_body(ts: _TokenStream) -> list[Literal]:
    body = [_parse_literal(ts)]
    while ts.at("COMMA"):
        ts.next()
        body.append(_parse_literal(ts))
    return body


def _parse_rule(ts: _TokenStream) -> Rule:
    if ts.at("IMPLIES"):
        ts.next()
        body = _parse_body(ts)
        ts.expect("DOT", "'.' at end of rule")
        return make_rule(None, body)
    tok = ts.peek()
    head = _parse_atom(ts)
    if isinstance(head, Comparison):
        raise ParseError(
            "a comparison cannot be the head of a rule", tok.line, tok.column
        )
    body: list[Literal] = []
    if ts.at("IMPLIES"):
        ts.next()
        body = _parse_body(ts)
    ts.expect("DOT", "'.' at end of rule")
    return make_rule(head, body)


def _parse_declaration(ts: _TokenStream) -> ProgramDeclaration:
    ts.expect("DIRECTIVE")
    name = ts.expect("IDENT", "a subprogram name").text
    params: list[str] = []
    if ts.at("LPAREN"):
        ts.next()
        while True:
            tok = ts.expect("IDENT", "a parameter name (lowercase)")
            if tok.text in params:
                raise ParseError(
                    f"duplicate parameter {tok.text!r}", tok.line, tok.column
                )
            params.append(tok.text)
            if ts.at("COMMA"):
                ts.next()
                continue
            break
        ts.expect("RPAREN")
    ts.expect("DOT", "'.' after #program declaration")
    return ProgramDeclaration(name, tuple(params))


def parse_program(text: str) -> ClingoProgram:
    """Parse a clingo-style program file into its declarations and rules."""
    ts = _TokenStream(_tokenize(text, comment="%"))
    items = []
    seen: dict[str, tuple[str, ...]] = {BASE: ()}
    while not ts.at("EOF"):
        if ts.at("DIRECTIVE"):
            tok = ts.peek()
            decl = _parse_declaration(ts)
            if decl.name in seen and seen[decl.name] != decl.params:
                raise DeclarationConflictError(
                    f"subprogram {decl.name!r} declared with parameters "
                    f"({','.join(decl.params)}) but previously with "
                    f"({','.join(seen[decl.name])})",
                    tok.line,
                    tok.column,
                )
            seen[decl.name] = decl.params
            items.append(decl)
        else:
            items.append(_parse_rule(ts))
    return ClingoProgram(tuple(items))


def parse_ground_atom(text: str) -> PredAtom:
    """Parse one precomputed atom, e.g. ``"q(0,1)"`` (used for model input)."""
    ts = _TokenStream(_tokenize(text, comment="%"))
    tok = ts.peek()
    atom = _parse_atom(ts)
    ts.expect("EOF", "end of input")
    if isinstance(atom, Comparison):
        raise ParseError("expected a predicate atom", tok.line, tok.column)
    if not all(is_precomputed(a) for a in atom.args):
        raise ParseError(
            f"atom {atom} is not precomputed", tok.line, tok.column
        )
    return atom


# --- control files -------------------------------------------------------------


def _eval_const_expr(ts: _TokenStream, env: dict[str, int]) -> int:
    term = _parse_term(ts)
    return _fold_const_term(term, env, ts)


def _fold_const_term(term: Term, env: dict[str, int], ts: _TokenStream) -> int:
    folded = simplify(
        substitute_constants(term, {k: Numeral(v) for k, v in env.items()})
    )
    if isinstance(folded, Numeral):
        return folded.value
    raise UnboundConstantError(
        f"expression {term} does not evaluate to an integer "
        f"(unbound constant?)"
    )


def _resolve_value(term: Term, env: dict[str, int]) -> Term:
    value = simplify(
        substitute_constants(term, {k: Numeral(v) for k, v in env.items()})
    )
    if not is_precomputed(value):
        raise UnboundConstantError(
            f"value {term} does not resolve to a precomputed term"
        )
    return value


def _parse_pattern_atom(
    ts: _TokenStream, env: dict[str, int], shadowed: tuple[str, ...] = ()
):
    """Parse a pattern atom like ``q(X, k+1)`` into ``((name, arity), pattern)``."""
    name = ts.expect("IDENT", "a predicate name").text
    elems: list[Term] = []
    if ts.at("LPAREN"):
        ts.next()
        elems.append(_parse_term(ts))
        while ts.at("COMMA"):
            ts.next()
            elems.append(_parse_term(ts))
        ts.expect("RPAREN")
    mapping = {k: Numeral(v) for k, v in env.items() if k not in shadowed}
    pattern = tuple(simplify(substitute_constants(e, mapping)) for e in elems)
    return (name, len(pattern)), pattern


def parse_control(
    text: str,
    clingo_program: ClingoProgram,
    overrides: Optional[dict[str, int]] = None,
) -> ControlPlan:
    """Parse a control file and validate it against the program's declarations.

    `overrides` (from the command line) shadow `const` lines of the same name.
    """
    decls = clingo_program.declarations()
    overrides = dict(overrides or {})
    env: dict[str, int] = dict(overrides)
    declared: set[str] = set()
    specs: list[SubprogramSpec] = []
    domain: Optional[tuple[int, int]] = None
    global_kappa: Optional[dict[tuple[str, int], list[tuple[Term, ...]]]] = None
    module_chi: dict[str, dict[tuple[str, int], list[tuple[Term, ...]]]] = {}

    ts = _TokenStream(_tokenize(text, comment="#"))
    while not ts.at("EOF"):
        tok = ts.expect("IDENT", "a control statement")
        word = tok.text
        if word == "const":
            name = ts.expect("IDENT", "a constant name").text
            eq = ts.expect("OP", "'='")
            if eq.text != "=":
                raise ParseError("expected '='", eq.line, eq.column)
            neg = False
            if ts.at("ARITH") and ts.peek().text == "-":
                ts.next()
                neg = True
            value = int(ts.expect("INT", "an integer").text)
            ts.expect("DOT", "'.' at end of statement")
            if name in declared:
                raise ParseError(f"constant {name!r} redefined", tok.line, tok.column)
            declared.add(name)
            if name not in overrides:
                env[name] = -value if neg else value
        elif word == "use":
            specs.extend(_parse_use(ts, decls, env))
        elif word == "domain":
            lo = _eval_const_expr(ts, env)
            ts.expect("RANGE", "'..'")
            hi = _eval_const_expr(ts, env)
            ts.expect("DOT", "'.' at end of statement")
            if domain is not None:
                raise ParseError("duplicate domain statement", tok.line, tok.column)
            if lo > hi:
                raise RangeError(f"reversed domain {lo}..{hi}")
            domain = (lo, hi)
        elif word == "intensional":
            key, pattern = _parse_pattern_atom(ts, env)
            ts.expect("DOT", "'.' at end of statement")
            _check_simple_pattern(pattern)
            if global_kappa is None:
                global_kappa = {}
            global_kappa.setdefault(key, []).append(pattern)
        elif word == "module":
            name = ts.expect("IDENT", "a subprogram name").text
            if name not in decls:
                known = ", ".join(sorted(decls))
                raise UnknownSubprogramError(
                    f"unknown subprogram {name!r}; declared names: {known}"
                )
            ts.expect("COLON", "':'")
            params = decls[name]
            entries = module_chi.setdefault(name, {})
            while True:
                key, pattern = _parse_pattern_atom(ts, env, shadowed=params)
                _check_parametric_pattern(pattern, params)
                entries.setdefault(key, []).append(pattern)
                if ts.at("COMMA"):
                    ts.next()
                    continue
                break
            ts.expect("DOT", "'.' at end of statement")
        else:
            raise ParseError(
                f"unknown control statement {word!r}", tok.line, tok.column
            )

    return ControlPlan(
        constants=tuple(sorted(env.items())),
        specs=tuple(specs),
        domain=domain,
        global_kappa=None
        if global_kappa is None
        else tuple(
            sorted((key, tuple(pats)) for key, pats in global_kappa.items())
        ),
        module_chi=tuple(
            sorted(
                (name, tuple(sorted((key, tuple(pats)) for key, pats in entries.items())))
                for name, entries in module_chi.items()
            )
        ),
    )


def _parse_use(
    ts: _TokenStream, decls: dict[str, tuple[str, ...]], env: dict[str, int]
) -> list[SubprogramSpec]:
    name_tok = ts.expect("IDENT", "a subprogram name")
    name = name_tok.text
    if name not in decls:
        known = ", ".join(sorted(decls))
        raise UnknownSubprogramError(
            f"unknown subprogram {name!r}; declared names: {known}"
        )
    params = decls[name]
    arg_terms: Optional[list[Term]] = None
    if ts.at("LPAREN"):
        ts.next()
        arg_terms = [_parse_term(ts)]
        while ts.at("COMMA"):
            ts.next()
            arg_terms.append(_parse_term(ts))
        ts.expect("RPAREN")

    if ts.at("IDENT") and ts.peek().text == "for":
        ts.next()
        loop_tok = ts.expect("IDENT", "a loop variable")
        loop = loop_tok.text
        kw = ts.expect("IDENT", "'in'")
        if kw.text != "in":
            raise ParseError("expected 'in'", kw.line, kw.column)
        lo = _eval_const_expr(ts, env)
        ts.expect("RANGE", "'..'")
        hi = _eval_const_expr(ts, env)
        allow_empty = False
        if ts.at("IDENT") and ts.peek().text == "allow":
            ts.next()
            kw = ts.expect("IDENT", "'empty'")
            if kw.text != "empty":
                raise ParseError("expected 'empty'", kw.line, kw.column)
            allow_empty = True
        ts.expect("DOT", "'.' at end of statement")
        if arg_terms is None or len(arg_terms) != 1 or not (
            isinstance(arg_terms[0], SymbolicConstant) and arg_terms[0].name == loop
        ):
            raise ParseError(
                f"ranged use must be written use {name}({loop}) for {loop} in ...",
                name_tok.line,
                name_tok.column,
            )
        if len(params) != 1:
            raise ArityMismatchError(
                f"subprogram {name!r} takes {len(params)} parameters; a ranged "
                "use supplies exactly one"
            )
        if lo > hi and not allow_empty:
            raise RangeError(
                f"empty or reversed range {lo}..{hi} (write 'allow empty' to permit)"
            )
        return [
            SubprogramSpec(name, params, Valuation.of({params[0]: Numeral(i)}))
            for i in range(lo, hi + 1)
        ]

    ts.expect("DOT", "'.' at end of statement")
    values = [] if arg_terms is None else [_resolve_value(t, env) for t in arg_terms]
    if len(values) != len(params):
        raise ArityMismatchError(
            f"subprogram {name!r} takes {len(params)} parameters, got {len(values)}"
        )
    return [SubprogramSpec(name, params, Valuation.of(dict(zip(params, values))))]


def _check_simple_pattern(pattern: tuple[Term, ...]):
    seen: set[str] = set()
    for elem in pattern:
        if isinstance(elem, Variable):
            if elem.name in seen:
                raise PatternError(
                    f"variable {elem.name} occurs twice in pattern {pattern}"
                )
            seen.add(elem.name)
        elif not is_precomputed(elem):
            raise PatternError(
                f"pattern element {elem} is neither a variable nor precomputed"
            )


def _check_parametric_pattern(pattern: tuple[Term, ...], placeholders: tuple[str, ...]):
    from .intensionality import is_placeholder_ground
    from .terms import constants_of

    seen: set[str] = set()
    for elem in pattern:
        if isinstance(elem, Variable):
            if elem.name in seen:
                raise PatternError(
                    f"variable {elem.name} occurs twice in pattern {pattern}"
                )
            seen.add(elem.name)
            continue
        placeholder_free = not (constants_of(elem) & set(placeholders))
        if placeholder_free and is_precomputed(elem):
            continue
        if not placeholder_free and is_placeholder_ground(elem, set(placeholders)):
            continue
        raise PatternError(
            f"pattern element {elem} must be a variable, a precomputed term, "
            f"or ground over the placeholders {{{','.join(placeholders)}}}"
        )
