"""Clingo-style programs with `#program` declarations, and the control plans
that select which subprogram instantiations make up a run."""

from dataclasses import dataclass
from typing import Optional, Union

from .errors import DeclarationConflictError, UnknownSubprogramError
from .program import Program, Rule
from .terms import Term, Valuation

BASE = "base"


@dataclass(frozen=True)
class ProgramDeclaration:
    name: str
    params: tuple[str, ...] = ()

    def __str__(self):
        if not self.params:
            return f"#program {self.name}."
        return f"#program {self.name}({','.join(self.params)})."


@dataclass(frozen=True)
class ClingoProgram:
    """An ordered list of declarations and rules.

    Rules preceding any declaration belong to `base`.  Every occurrence of a
    declaration opens a scope reaching to the next declaration; repeated
    declarations of one name share a single parameter list and their scopes
    are unioned by `subprogram`.
    """

    items: tuple[Union[ProgramDeclaration, Rule], ...] = ()

    def __post_init__(self):
        seen: dict[str, tuple[str, ...]] = {BASE: ()}
        for item in self.items:
            if isinstance(item, ProgramDeclaration):
                if item.name in seen and seen[item.name] != item.params:
                    raise DeclarationConflictError(
                        f"subprogram {item.name!r} declared with parameters "
                        f"({','.join(item.params)}) but previously with "
                        f"({','.join(seen[item.name])})"
                    )
                seen[item.name] = item.params

    def declarations(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, tuple[str, ...]] = {BASE: ()}
        for item in self.items:
            if isinstance(item, ProgramDeclaration):
                out[item.name] = item.params
        return out

    def scopes(self) -> list[tuple[str, Rule]]:
        current = BASE
        pairs = []
        for item in self.items:
            if isinstance(item, ProgramDeclaration):
                current = item.name
            else:
                pairs.append((current, item))
        return pairs

    def subprogram(self, name: str) -> Program:
        decls = self.declarations()
        if name not in decls:
            known = ", ".join(sorted(decls))
            raise UnknownSubprogramError(
                f"unknown subprogram {name!r}; declared names: {known}"
            )
        return Program.of(rule for scope, rule in self.scopes() if scope == name)

    def __str__(self):
        lines = []
        for item in self.items:
            lines.append(str(item))
        return "\n".join(lines)


def subprogram(clingo_program: ClingoProgram, name: str) -> Program:
    """All rules in the scope of declarations named `name`."""
    return clingo_program.subprogram(name)


@dataclass(frozen=True)
class SubprogramSpec:
    """A request to instantiate one subprogram with one valuation."""

    name: str
    placeholders: tuple[str, ...] = ()
    valuation: Valuation = Valuation()

    def __str__(self):
        return f"[{self.name},{{{','.join(self.placeholders)}}},{self.valuation}]"


Pattern = tuple[Term, ...]
PredKey = tuple[str, int]


@dataclass(frozen=True)
class ControlPlan:
    """The parsed content of a control file, ranges already expanded.

    `global_kappa` is None when the file has no `intensional` lines, in which
    case every predicate defaults to purely intensional.  `module_chi` maps a
    subprogram name to pattern overrides; subprograms without an entry get a
    head-derived parametric statement.
    """

    constants: tuple[tuple[str, int], ...] = ()
    specs: tuple[SubprogramSpec, ...] = ()
    domain: Optional[tuple[int, int]] = None
    global_kappa: Optional[tuple[tuple[PredKey, tuple[Pattern, ...]], ...]] = None
    module_chi: tuple[tuple[str, tuple[tuple[PredKey, tuple[Pattern, ...]], ...]], ...] = ()

    def constants_dict(self) -> dict[str, int]:
        return dict(self.constants)

    def global_kappa_dict(self) -> Optional[dict[PredKey, tuple[Pattern, ...]]]:
        if self.global_kappa is None:
            return None
        return dict(self.global_kappa)

    def module_chi_dict(self) -> dict[str, dict[PredKey, tuple[Pattern, ...]]]:
        return {name: dict(entries) for name, entries in self.module_chi}
