"""Frontend for Lisp-style planning descriptions: lexing, parsing, linking, printing."""

from plankit.pddl.ast import (
    OBJECT_TYPE,
    ActionSchema,
    Diagnostic,
    DomainAst,
    Literal,
    PredicateDecl,
    ProblemAst,
    TypeGraph,
    unify,
)
from plankit.pddl.lexer import LexError, Token, TokenKind, tokenize
from plankit.pddl.linker import LinkedProblem, LinkResult, link
from plankit.pddl.parser import DomainParse, ProblemParse, parse_domain, parse_problem
from plankit.pddl.printer import format_domain, format_problem

__all__ = [
    "OBJECT_TYPE",
    "ActionSchema",
    "Diagnostic",
    "DomainAst",
    "DomainParse",
    "LexError",
    "LinkResult",
    "LinkedProblem",
    "Literal",
    "PredicateDecl",
    "ProblemAst",
    "ProblemParse",
    "Token",
    "TokenKind",
    "TypeGraph",
    "format_domain",
    "format_problem",
    "link",
    "parse_domain",
    "parse_problem",
    "tokenize",
    "unify",
]
