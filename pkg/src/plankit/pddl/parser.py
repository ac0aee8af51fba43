"""Recursive-descent parser for domain and problem descriptions.

Structural violations are reported as accumulated diagnostics rather than
exceptions; the parser recovers at top-level forms so one broken section
does not hide errors in the next.  HTN extension forms (`:task`, `:method`,
`:htn`) are collected raw for the hierarchical frontend and are invisible
to the classical pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from plankit.model import GroundAtom
from plankit.pddl.ast import (
    OBJECT_TYPE,
    ActionSchema,
    Diagnostic,
    DomainAst,
    Literal,
    PredicateDecl,
    ProblemAst,
    TypedName,
    TypeGraph,
)
from plankit.pddl.lexer import LexError, Token, TokenKind, tokenize

__all__ = ["Group", "DomainParse", "ProblemParse", "parse_domain", "parse_problem",
           "read_forms", "parse_typed_list", "parse_conjunction", "split_sections"]

# Connectives the grammar recognizes but this STRIPS subset rejects.
_UNSUPPORTED = {"or", "imply", "forall", "exists", "when"}


@dataclass
class Group:
    """A parenthesized form; `line`/`col` point at its opening paren."""

    items: list["Form"]
    line: int
    col: int

    def head(self) -> str | None:
        """Lowercased text of the first item when it is a token."""
        if self.items and isinstance(self.items[0], Token):
            return self.items[0].text
        return None


Form = Token | Group


@dataclass
class DomainParse:
    domain: DomainAst | None
    diagnostics: list[Diagnostic]
    htn_forms: list[Group] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.domain is not None and not any(d.severity == "error" for d in self.diagnostics)


@dataclass
class ProblemParse:
    problem: ProblemAst | None
    diagnostics: list[Diagnostic]
    htn_form: Group | None = None

    @property
    def ok(self) -> bool:
        return self.problem is not None and not any(d.severity == "error" for d in self.diagnostics)


def _error(diags: list[Diagnostic], message: str, at: Form | None = None) -> None:
    line, col = (at.line, at.col) if at is not None else (0, 0)
    diags.append(Diagnostic("error", message, line, col))


def _warning(diags: list[Diagnostic], message: str, at: Form | None = None) -> None:
    line, col = (at.line, at.col) if at is not None else (0, 0)
    diags.append(Diagnostic("warning", message, line, col))


def read_forms(tokens: list[Token], diags: list[Diagnostic]) -> list[Form]:
    """Group a token stream into nested forms, recovering from imbalance."""
    top: list[Form] = []
    stack: list[Group] = []
    for tok in tokens:
        if tok.kind is TokenKind.LPAREN:
            group = Group([], tok.line, tok.col)
            (stack[-1].items if stack else top).append(group)
            stack.append(group)
        elif tok.kind is TokenKind.RPAREN:
            if not stack:
                _error(diags, "unbalanced ')'", tok)
            else:
                stack.pop()
        else:
            (stack[-1].items if stack else top).append(tok)
    for group in stack:
        _error(diags, "unclosed '('", group)
    return top


def _tokenize_forms(text: str, diags: list[Diagnostic]) -> list[Form] | None:
    try:
        tokens = tokenize(text)
    except LexError as exc:
        diags.append(Diagnostic("error", str(exc.args[0]) if not exc.args else exc.args[0], exc.line, exc.col))
        return None
    return read_forms(tokens, diags)


def _name_token(item: Form, diags: list[Diagnostic], what: str) -> str | None:
    if isinstance(item, Token) and item.kind is TokenKind.NAME:
        return item.text
    _error(diags, f"expected {what}", item)
    return None


def parse_typed_list(items: list[Form], diags: list[Diagnostic], *,
                     kind: TokenKind, what: str) -> list[TypedName]:
    """Parse `a b - t c - t2 d` style lists; untyped trailing items get `object`."""
    out: list[TypedName] = []
    batch: list[str] = []
    i = 0
    while i < len(items):
        item = items[i]
        if isinstance(item, Token) and item.kind is TokenKind.DASH:
            if not batch:
                _error(diags, f"type separator '-' without preceding {what}", item)
            i += 1
            if i >= len(items) or not (isinstance(items[i], Token) and items[i].kind is TokenKind.NAME):
                _error(diags, "expected type name after '-'", item)
                batch = []
                continue
            type_name = items[i].text
            out.extend((name, type_name) for name in batch)
            batch = []
            i += 1
        elif isinstance(item, Token) and item.kind is kind:
            batch.append(item.text)
            i += 1
        else:
            _error(diags, f"expected {what} or '-' in typed list", item)
            i += 1
    out.extend((name, OBJECT_TYPE) for name in batch)
    return out


def _parse_literal(form: Form, diags: list[Diagnostic], *, where: str) -> Literal | None:
    if not isinstance(form, Group):
        _error(diags, f"expected a literal in {where}", form)
        return None
    head = form.head()
    if head is None:
        _error(diags, f"expected a predicate application in {where}", form)
        return None
    if head in _UNSUPPORTED:
        _error(diags, f"unsupported construct '{head}' in {where}: "
                      "only conjunctions of literals are accepted", form)
        return None
    if head == "not":
        if len(form.items) != 2 or not isinstance(form.items[1], Group):
            _error(diags, f"'not' takes exactly one predicate application in {where}", form)
            return None
        inner = _parse_literal(form.items[1], diags, where=where)
        if inner is None:
            return None
        if inner.negated:
            _error(diags, f"nested 'not' in {where}", form)
            return None
        return Literal(inner.predicate, inner.args, negated=True)
    args: list[str] = []
    for item in form.items[1:]:
        if isinstance(item, Token) and item.kind in (TokenKind.NAME, TokenKind.VARIABLE):
            args.append(item.text)
        else:
            _error(diags, f"expected argument in {where}", item)
            return None
    return Literal(head, tuple(args))


def parse_conjunction(form: Form, diags: list[Diagnostic], *, where: str) -> tuple[Literal, ...]:
    """Parse a formula restricted to a conjunction of literals (possibly empty)."""
    if not isinstance(form, Group):
        _error(diags, f"expected a formula in {where}", form)
        return ()
    if not form.items:
        return ()
    if form.head() == "and":
        literals: list[Literal] = []
        for item in form.items[1:]:
            if isinstance(item, Group) and item.head() == "and":
                literals.extend(parse_conjunction(item, diags, where=where))
                continue
            lit = _parse_literal(item, diags, where=where)
            if lit is not None:
                literals.append(lit)
        return tuple(literals)
    lit = _parse_literal(form, diags, where=where)
    return (lit,) if lit is not None else ()


def split_sections(items: list[Form], diags: list[Diagnostic]) -> list[tuple[Token, list[Form]]]:
    """Split a form's items into (keyword, values...) runs."""
    sections: list[tuple[Token, list[Form]]] = []
    current: list[Form] | None = None
    for item in items:
        if isinstance(item, Token) and item.kind is TokenKind.KEYWORD:
            current = []
            sections.append((item, current))
        elif current is not None:
            current.append(item)
        else:
            _error(diags, "expected a ':keyword' section", item)
    return sections


def _check_type_graph(types: tuple[TypedName, ...], diags: list[Diagnostic],
                      at: Form | None) -> tuple[TypedName, ...]:
    """Implicitly declare parent-only types and reject cycles."""
    declared = {t for t, _ in types}
    extended = list(types)
    for _, parent in types:
        if parent != OBJECT_TYPE and parent not in declared:
            extended.append((parent, OBJECT_TYPE))
            declared.add(parent)
    graph = TypeGraph(tuple(extended))
    for t in graph.declared_types():
        seen: set[str] = set()
        node: str | None = t
        while node is not None and node != OBJECT_TYPE:
            if node in seen:
                _error(diags, f"type cycle involving '{t}'", at)
                return tuple(extended)
            seen.add(node)
            node = graph.parent.get(node)
    return tuple(extended)


def _find_define(forms: list[Form], diags: list[Diagnostic], kind: str) -> Group | None:
    defines = [f for f in forms if isinstance(f, Group) and f.head() == "define"]
    if not defines:
        _error(diags, f"no (define ...) form found in {kind} file")
        return None
    if len(defines) > 1 or len(forms) != 1:
        _error(diags, f"expected exactly one top-level (define ...) form", defines[0])
    return defines[0]


def _parse_header(define: Group, expected: str, diags: list[Diagnostic]) -> str | None:
    """Extract NAME from (define (<expected> NAME) ...)."""
    if len(define.items) < 2 or not isinstance(define.items[1], Group):
        _error(diags, f"expected ({expected} <name>) after 'define'", define)
        return None
    header = define.items[1]
    if header.head() != expected or len(header.items) != 2:
        _error(diags, f"expected ({expected} <name>)", header)
        return None
    return _name_token(header.items[1], diags, f"{expected} name")


def _parse_action(form: Group, predicates: dict[str, PredicateDecl],
                  diags: list[Diagnostic]) -> ActionSchema | None:
    if len(form.items) < 2:
        _error(diags, "':action' requires a name", form)
        return None
    name = _name_token(form.items[1], diags, "action name")
    if name is None:
        return None
    params: tuple[TypedName, ...] = ()
    precondition: tuple[Literal, ...] = ()
    effect: tuple[Literal, ...] = ()
    seen_effect = False
    for sub_keyword, sub_values in split_sections(form.items[2:], diags):
        body = sub_values[0] if sub_values else None
        if sub_keyword.text == ":parameters":
            if isinstance(body, Group):
                params = tuple(parse_typed_list(body.items, diags,
                                                kind=TokenKind.VARIABLE, what="parameter variable"))
            else:
                _error(diags, "':parameters' requires a parenthesized list", sub_keyword)
        elif sub_keyword.text == ":precondition":
            if body is not None:
                precondition = parse_conjunction(body, diags, where=f"precondition of '{name}'")
        elif sub_keyword.text == ":effect":
            seen_effect = True
            if body is not None:
                effect = parse_conjunction(body, diags, where=f"effect of '{name}'")
        else:
            _error(diags, f"unknown action section '{sub_keyword.text}'", sub_keyword)
    if not seen_effect:
        _warning(diags, f"action '{name}' has no ':effect' section", form)

    param_names = [v for v, _ in params]
    dupes = {v for v in param_names if param_names.count(v) > 1}
    for v in sorted(dupes):
        _error(diags, f"duplicate parameter '{v}' in action '{name}'", form)

    bound = set(param_names)
    for lit in precondition + effect:
        decl = predicates.get(lit.predicate)
        if decl is None:
            _error(diags, f"action '{name}' uses undeclared predicate '{lit.predicate}'", form)
        elif decl.arity != len(lit.args):
            _error(diags, f"action '{name}': predicate '{lit.predicate}' expects "
                          f"{decl.arity} arguments, got {len(lit.args)}", form)
        for arg in lit.args:
            if arg.startswith("?") and arg not in bound:
                _error(diags, f"action '{name}' uses unbound variable '{arg}'", form)
    return ActionSchema(name, params, precondition, effect)


def parse_domain(text: str) -> DomainParse:
    """Parse a domain description; never raises on malformed input."""
    diags: list[Diagnostic] = []
    forms = _tokenize_forms(text, diags)
    if forms is None:
        return DomainParse(None, diags)
    define = _find_define(forms, diags, "domain")
    if define is None:
        return DomainParse(None, diags)
    name = _parse_header(define, "domain", diags)
    if name is None:
        return DomainParse(None, diags)

    types: tuple[TypedName, ...] = ()
    constants: tuple[TypedName, ...] = ()
    predicates: dict[str, PredicateDecl] = {}
    predicate_order: list[PredicateDecl] = []
    actions: list[ActionSchema] = []
    action_spans: dict[str, tuple[int, int]] = {}
    htn_forms: list[Group] = []

    for item in define.items[2:]:
        if not isinstance(item, Group):
            _error(diags, "expected a parenthesized section", item)
            continue
        head = item.head()
        if head is None or not head.startswith(":"):
            _error(diags, "expected a ':keyword' section", item)
            continue
        if head == ":requirements":
            _warning(diags, "':requirements' is parsed but its contents are ignored", item)
        elif head == ":types":
            types = _check_type_graph(
                tuple(parse_typed_list(item.items[1:], diags, kind=TokenKind.NAME, what="type name")),
                diags, item)
        elif head == ":constants":
            constants = tuple(parse_typed_list(item.items[1:], diags,
                                               kind=TokenKind.NAME, what="constant name"))
        elif head == ":predicates":
            for decl_form in item.items[1:]:
                if not isinstance(decl_form, Group) or decl_form.head() is None:
                    _error(diags, "expected a predicate declaration", decl_form)
                    continue
                pred_name = decl_form.items[0].text
                params = tuple(parse_typed_list(decl_form.items[1:], diags,
                                                kind=TokenKind.VARIABLE, what="parameter variable"))
                decl = PredicateDecl(pred_name, params)
                existing = predicates.get(pred_name)
                if existing is None:
                    predicates[pred_name] = decl
                    predicate_order.append(decl)
                elif existing == decl:
                    _warning(diags, f"duplicate declaration of predicate '{pred_name}'", decl_form)
                else:
                    _error(diags, f"conflicting redeclaration of predicate '{pred_name}'", decl_form)
        elif head == ":action":
            schema = _parse_action(item, predicates, diags)
            if schema is not None:
                if schema.name in action_spans:
                    line, col = action_spans[schema.name]
                    _error(diags, f"duplicate action '{schema.name}' "
                                  f"(first declared at {line}:{col})", item)
                else:
                    action_spans[schema.name] = (item.line, item.col)
                    actions.append(schema)
        elif head in (":task", ":method"):
            htn_forms.append(item)
        else:
            _error(diags, f"unknown domain section '{head}'", item)

    graph = TypeGraph(types)
    for scope, pairs in (("constant", constants),
                         *((f"predicate '{p.name}' parameter", p.params) for p in predicate_order),
                         *((f"action '{a.name}' parameter", a.params) for a in actions)):
        for item_name, type_name in pairs:
            if not graph.is_declared(type_name):
                _error(diags, f"{scope} '{item_name}' has undeclared type '{type_name}'")

    domain = DomainAst(name, types, constants, tuple(predicate_order), tuple(actions))
    return DomainParse(domain, diags, htn_forms)


def parse_problem(text: str) -> ProblemParse:
    """Parse a problem description; never raises on malformed input."""
    diags: list[Diagnostic] = []
    forms = _tokenize_forms(text, diags)
    if forms is None:
        return ProblemParse(None, diags)
    define = _find_define(forms, diags, "problem")
    if define is None:
        return ProblemParse(None, diags)
    name = _parse_header(define, "problem", diags)
    if name is None:
        return ProblemParse(None, diags)

    domain_name: str | None = None
    objects: tuple[TypedName, ...] = ()
    init: list[GroundAtom] = []
    goal: tuple[Literal, ...] | None = None
    htn_form: Group | None = None

    for item in define.items[2:]:
        if not isinstance(item, Group):
            _error(diags, "expected a parenthesized section", item)
            continue
        head = item.head()
        if head == ":domain":
            if len(item.items) == 2:
                domain_name = _name_token(item.items[1], diags, "domain name")
            else:
                _error(diags, "':domain' takes exactly one name", item)
        elif head == ":objects":
            objects = tuple(parse_typed_list(item.items[1:], diags,
                                             kind=TokenKind.NAME, what="object name"))
        elif head == ":init":
            for atom_form in item.items[1:]:
                parsed = _parse_literal(atom_form, diags, where=":init")
                if parsed is None:
                    continue
                if parsed.negated:
                    _error(diags, "negated atoms are not allowed in ':init' "
                                  "(absent atoms are false)", atom_form)
                elif any(a.startswith("?") for a in parsed.args):
                    _error(diags, "':init' atoms must be ground", atom_form)
                else:
                    init.append(GroundAtom(parsed.predicate, parsed.args))
        elif head == ":goal":
            if len(item.items) != 2:
                _error(diags, "':goal' takes exactly one formula", item)
                continue
            goal = parse_conjunction(item.items[1], diags, where=":goal")
            for lit in goal:
                if any(a.startswith("?") for a in lit.args):
                    _error(diags, "':goal' literals must be ground", item)
        elif head == ":htn":
            htn_form = item
        elif head == ":requirements":
            _warning(diags, "':requirements' is parsed but its contents are ignored", item)
        else:
            _error(diags, f"unknown problem section '{head}'", item)

    if domain_name is None:
        _error(diags, "problem is missing its '(:domain ...)' declaration", define)
        return ProblemParse(None, diags, htn_form)
    if goal is None and htn_form is None:
        _error(diags, "problem has no ':goal' section", define)
        return ProblemParse(None, diags, htn_form)

    problem = ProblemAst(name, domain_name, objects, tuple(init), goal or ())
    return ProblemParse(problem, diags, htn_form)
