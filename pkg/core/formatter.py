from __future__ import annotations

from typing import List

from .model import (
    BodyAtom,
    CrispFact,
    DefaultDecl,
    FuzzyFact,
    FuzzyRule,
    Program,
    TruthFunction,
    TypeSignature,
    Variable,
    atom_text,
    format_number,
)


def format_signature(sig: TypeSignature) -> str:
    types = ", ".join(str(t) for t in sig.argument_types)
    return f":- set_prop {sig.target} => {types}."


def format_crisp_fact(fact: CrispFact) -> str:
    return f"{atom_text(fact.key, fact.args)}."


def format_fuzzy_fact(fact: FuzzyFact) -> str:
    return f"{atom_text(fact.key, fact.args)} value {format_number(fact.tv)}."


def format_function(fn: TruthFunction) -> str:
    points = ", ".join(f"({format_number(x)}, {format_number(tv)})" for x, tv in fn.points)
    return f"{fn.key.name} :# ([{points}])."


def format_default(decl: DefaultDecl) -> str:
    text = f":- default({decl.target}, {format_number(decl.tv)})"
    if decl.condition is not None:
        text += f" => {decl.condition}"
    return text + "."


def _body_atom(atom: BodyAtom) -> str:
    return atom_text(atom.key, atom.args)


def format_rule(rule: FuzzyRule) -> str:
    head = atom_text(rule.head, [Variable(v) for v in rule.head_vars])
    cred = ""
    if rule.credibility is not None:
        cred = f" cred ({rule.credibility.op.value}, {format_number(rule.credibility.value)})"
    body = ", ".join(_body_atom(a) for a in rule.body)
    return f"{head}{cred} :~ {rule.body_op.value} {body}."


def format_program(program: Program) -> str:
    """Canonical concrete syntax for program; parsing it back yields an equal program."""
    sections: List[List[str]] = [
        [format_signature(s) for s in program.signatures.values()],
        [format_crisp_fact(f) for f in program.crisp_facts],
        [format_fuzzy_fact(f) for f in program.fuzzy_facts.values()],
        [format_function(f) for f in program.functions.values()],
        [format_default(d) for ds in program.conditioned_defaults.values() for d in ds],
        [format_default(d) for d in program.general_defaults.values()],
        [format_rule(r) for rs in program.rules.values() for r in rs],
    ]
    blocks = ["\n".join(lines) for lines in sections if lines]
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


__all__ = ["format_program", "format_rule", "format_default", "format_function", "format_fuzzy_fact"]
