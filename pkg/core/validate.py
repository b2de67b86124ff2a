from __future__ import annotations

from typing import List, Set

from . import diagnostics as codes
from .diagnostics import Diagnostic
from .model import ANONYMOUS, Connective, FuzzyRule, PredicateKey, Program, SourceSpan, Variable


def validate(program: Program) -> List[Diagnostic]:
    """Compile-time checks over a structurally parsed program.

    An empty list (or one holding only warnings) means the program can run.
    """
    diags: List[Diagnostic] = []
    reported: Set[PredicateKey] = set()

    def require_signature(key: PredicateKey, span: SourceSpan | None) -> None:
        if key in program.signatures or key in reported:
            return
        reported.add(key)
        diags.append(
            Diagnostic.error(
                codes.UNDECLARED,
                f"fuzzy predicate {key} is used without a set_prop declaration",
                span,
            )
        )

    for fact in program.fuzzy_facts.values():
        require_signature(fact.key, fact.span)
    for fn in program.functions.values():
        require_signature(fn.key, fn.span)
    for decl in program.general_defaults.values():
        require_signature(decl.target, decl.span)
    for decls in program.conditioned_defaults.values():
        for decl in decls:
            require_signature(decl.target, decl.span)
            if decl.condition is not None and decl.condition.arity != decl.target.arity:
                diags.append(
                    Diagnostic.error(
                        codes.DEFAULT_ARITY,
                        f"membership predicate {decl.condition} and {decl.target} need the same arity",
                        decl.span,
                    )
                )
    for rules in program.rules.values():
        for rule in rules:
            require_signature(rule.head, rule.span)
            diags.extend(_check_rule(program, rule, require_signature))

    open_types: Set[PredicateKey] = set()
    for sig in program.signatures.values():
        for t in sig.argument_types:
            if t in open_types or program.is_crisp_predicate(t):
                continue
            open_types.add(t)
            diags.append(
                Diagnostic.warning(
                    codes.OPEN_TYPE,
                    f"type {t} has no individuals; any number passes its guard and none are enumerated",
                    sig.span,
                )
            )
    return diags


def _check_rule(program: Program, rule: FuzzyRule, require_signature) -> List[Diagnostic]:
    diags: List[Diagnostic] = []
    span = rule.span

    if rule.body_op is Connective.COMPLEMENT and len(rule.body) != 1:
        diags.append(
            Diagnostic.error(
                codes.COMPLEMENT_ARITY,
                f"complement is unary but the rule for {rule.head} has {len(rule.body)} body atoms",
                span,
            )
        )
    if rule.credibility is not None and rule.credibility.op is Connective.COMPLEMENT:
        diags.append(
            Diagnostic.error(
                codes.COMPLEMENT_CREDIBILITY,
                f"complement cannot combine a credibility with the body of {rule.head}",
                span,
            )
        )

    body_vars = {v for atom in rule.body for v in atom.variables()}
    for var in dict.fromkeys(v for v in rule.head_vars if v != ANONYMOUS):
        if var not in body_vars:
            diags.append(
                Diagnostic.error(
                    codes.HEAD_VARIABLE,
                    f"head variable {var} of {rule.head} does not occur in the body",
                    span,
                )
            )

    bound = set(rule.head_vars)
    for atom in rule.body:
        if program.is_fuzzy_predicate(atom.key):
            require_signature(atom.key, span)
            for arg in atom.args:
                if isinstance(arg, Variable) and arg.name not in bound:
                    diags.append(
                        Diagnostic.error(
                            codes.UNBOUND_BODY_VARIABLE,
                            f"variable {arg.name} in {atom.key.name}/{atom.key.arity} is bound neither by the head nor by an earlier crisp atom",
                            span,
                        )
                    )
        elif program.is_crisp_predicate(atom.key):
            bound.update(atom.variables())
        else:
            diags.append(
                Diagnostic.error(
                    codes.UNKNOWN_BODY_PREDICATE,
                    f"body atom {atom.key} is neither a declared fuzzy predicate nor a crisp fact predicate",
                    span,
                )
            )
    return diags


__all__ = ["validate"]
