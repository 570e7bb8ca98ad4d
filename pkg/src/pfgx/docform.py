"""Textual format for theories and proof documents.

Grammar (line comments with --, UTF-8 input):

    theory file (.pfgt):
        theory
        base NAT                          -- optional, default 1
        prim NAME : TYPE
        axiom NAME : TERM

    document file (.pfgd):
        theory REF                        -- REF: alias ident or #<64 hex>
        param NAME : TYPE = #HEX          -- import a defined object
        param NAME = #HEX                 -- import an axiom/theorem
        def NAME : TYPE := TERM
        thm NAME : TERM
        proof PROOF
        conj NAME : TERM [category "TAG"]

    TYPE  := 'prop' | 'set' | 'base'N | TYPE '->' TYPE | '(' TYPE ')'
    TERM  := 'fun' GROUPS '=>' TERM | 'all' GROUPS '=>' TERM
           | APP ('->' TERM)? ; APP := ATOM+ ; ATOM := NAME | #HEX | '(' TERM ')'
    GROUPS:= ('(' NAME+ ':' TYPE ')')+
    PROOF := 'assume' '(' NAME ':' TERM ')' '=>' PROOF
           | 'allintro' '(' NAME ':' TYPE ')' '=>' PROOF
           | 'apply' PATOM PARG+ | 'allelim' PATOM '[' TERM ']' | PATOM
    PARG  := PATOM | '[' TERM ']'
    PATOM := NAME | 'known' (NAME | #HEX) | 'ext' '(' TYPE ',' TYPE ')' | '(' PROOF ')'

'->' is right-associative, application is left-associative and binds
tightest, binders extend as far right as possible.  Bound names are
elaborated to de Bruijn indices, so printing regenerates canonical names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import kernel as K
from .serial import Reader, sha256, uleb

# inline forms of the usual logical definitions (no primitive connectives
# beyond implication and the universal quantifier)
FALSE_TERM = K.All(K.PROP, K.DB(0))
TRUE_TERM = K.All(K.PROP, K.Imp(K.DB(0), K.DB(0)))


# ---------------------------------------------------------------------------
# errors

class DocError(Exception):
    pass


class ParseError(DocError):
    def __init__(self, line: int, col: int, expected: str):
        super().__init__(f"line {line}, col {col}: expected {expected}")
        self.line = line
        self.col = col
        self.expected = expected


class UnknownName(DocError):
    def __init__(self, line: int, col: int, name: str):
        super().__init__(f"line {line}, col {col}: unknown name {name!r}")
        self.line = line
        self.col = col
        self.name = name


class ArityError(DocError):
    def __init__(self, line: int, col: int, detail: str):
        super().__init__(f"line {line}, col {col}: {detail}")


class DocCheckError(DocError):
    """A document item failed to check; wraps the underlying kernel error."""

    def __init__(self, index: int, name: str, cause: Exception):
        super().__init__(f"item {index} ({name}): {cause}")
        self.index = index
        self.name = name
        self.cause = cause


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True, slots=True)
class ParamObj:
    name: str
    id: bytes
    ty: K.Ty


@dataclass(frozen=True, slots=True)
class ParamProp:
    name: str
    id: bytes


@dataclass(frozen=True, slots=True)
class DefItem:
    name: str
    ty: K.Ty
    term: K.Term


@dataclass(frozen=True, slots=True)
class ThmItem:
    name: str
    stmt: K.Term
    proof: K.Proof


@dataclass(frozen=True, slots=True)
class ConjItem:
    name: str
    stmt: K.Term
    tag: str


DocItem = ParamObj | ParamProp | DefItem | ThmItem | ConjItem


@dataclass(frozen=True, slots=True)
class Document:
    theory_ref: str  # alias as written, or '#' + 64 hex
    items: tuple[DocItem, ...]


@dataclass(frozen=True, slots=True)
class TheorySpec:
    bases: int
    prims: tuple[tuple[str, K.Ty], ...]
    axioms: tuple[tuple[str, K.Term], ...]

    def prim_index(self, name: str) -> int | None:
        for i, (n, _) in enumerate(self.prims):
            if n == name:
                return i
        return None


def theory_id_of(spec: TheorySpec) -> bytes:
    return K.theory_id(spec.bases, [ty for _, ty in spec.prims], [t for _, t in spec.axioms])


def check_theory(spec: TheorySpec) -> K.Signature:
    """Validate a theory spec and build its signature.

    Axioms must be closed propositions over the declared primitives alone.
    """
    sig = K.Signature(bases=spec.bases, prims=tuple(ty for _, ty in spec.prims))
    for _, ty in spec.prims:
        K.check_ty(sig, ty)
    for name, term in spec.axioms:
        if not K.is_closed(term):
            raise K.NotClosed(f"axiom {name} is not closed")
        got = K.typecheck(sig, [], term)
        if got != K.PROP:
            raise K.TypeMismatch(K.PROP, got, f"axiom {name}")
        sig.axioms[K.prop_id(term)] = K.normalize(None, term)
    return sig


# ---------------------------------------------------------------------------
# lexer

KEYWORDS = {
    "theory", "base", "prim", "axiom", "param", "def", "thm", "conj", "proof",
    "category", "fun", "all", "assume", "allintro", "apply", "allelim",
    "known", "ext", "prop", "set",
}

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r\n]+)
      | (?P<comment>--[^\n]*)
      | (?P<hexid>\#[0-9a-fA-F]{64})
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<number>[0-9]+)
      | (?P<string>"[^"\n]*")
      | (?P<punct>:=|=>|->|[()\[\]:,=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # ident | hexid | number | string | punct | kw | eof
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, col, f"a token (found {text[pos]!r})")
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            if kind == "ident" and lexeme in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# parser

class _Scope:
    """Name tables for elaborating one document."""

    def __init__(self, theory: TheorySpec | None):
        self.theory = theory
        self.consts: dict[str, bytes] = {}  # object params and local defs
        self.props: dict[str, bytes] = {}  # prop params, theory axioms, local thms
        self.taken: set[str] = set()
        if theory is not None:
            for name, term in theory.axioms:
                self.props[name] = K.prop_id(term)

    def claim(self, name: str, tok: Token):
        if name in self.taken:
            raise ParseError(tok.line, tok.col, f"a fresh name ({name!r} already used)")
        self.taken.add(name)

    def prim(self, name: str) -> int | None:
        return self.theory.prim_index(name) if self.theory else None


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    # -- token plumbing

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def eat(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if not self.at(kind, value):
            raise ParseError(tok.line, tok.col, value or kind)
        return self.next()

    def fail(self, expected: str):
        tok = self.peek()
        raise ParseError(tok.line, tok.col, expected)

    # -- types

    def parse_ty(self) -> K.Ty:
        left = self.parse_ty_atom()
        if self.eat("punct", "->"):
            return K.Func(left, self.parse_ty())
        return left

    def parse_ty_atom(self) -> K.Ty:
        if self.eat("kw", "prop"):
            return K.PROP
        if self.eat("kw", "set"):
            return K.Base(0)
        if self.at("ident") and re.fullmatch(r"base[0-9]+", self.peek().value):
            return K.Base(int(self.next().value[4:]))
        if self.eat("punct", "("):
            ty = self.parse_ty()
            self.expect("punct", ")")
            return ty
        self.fail("a type")

    # -- terms

    def parse_binder_groups(self) -> list[tuple[str, K.Ty, Token]]:
        groups = []
        if self.at("ident"):
            # unparenthesized single binder: fun x : T => e
            tok = self.next()
            self.expect("punct", ":")
            return [(tok.value, self.parse_ty(), tok)]
        while self.at("punct", "("):
            self.next()
            names = []
            while self.at("ident"):
                names.append(self.next())
            if not names:
                self.fail("a binder name")
            self.expect("punct", ":")
            ty = self.parse_ty()
            self.expect("punct", ")")
            groups.extend((tok.value, ty, tok) for tok in names)
        if not groups:
            self.fail("a binder group")
        return groups

    def parse_term(self, scope: _Scope, binders: list[str]) -> K.Term:
        if self.at("kw", "fun") or self.at("kw", "all"):
            kw = self.next().value
            groups = self.parse_binder_groups()
            self.expect("punct", "=>")
            body = self.parse_term(scope, [name for name, _, _ in reversed(groups)] + binders)
            for name, ty, _ in reversed(groups):
                body = K.La(ty, body) if kw == "fun" else K.All(ty, body)
            return body
        left = self.parse_app(scope, binders)
        if self.eat("punct", "->"):
            return K.Imp(left, self.parse_term(scope, binders))
        return left

    def parse_app(self, scope: _Scope, binders: list[str]) -> K.Term:
        t = self.parse_atom(scope, binders)
        while self._at_atom_start():
            t = K.Ap(t, self.parse_atom(scope, binders))
        return t

    def _at_atom_start(self) -> bool:
        return self.at("ident") or self.at("hexid") or self.at("punct", "(")

    def parse_atom(self, scope: _Scope, binders: list[str]) -> K.Term:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            name = tok.value
            if name in binders:
                return K.DB(binders.index(name))
            if name in scope.consts:
                return K.Ref(scope.consts[name])
            prim = scope.prim(name)
            if prim is not None:
                return K.Prim(prim)
            raise UnknownName(tok.line, tok.col, name)
        if tok.kind == "hexid":
            self.next()
            return K.Ref(bytes.fromhex(tok.value[1:]))
        if self.eat("punct", "("):
            t = self.parse_term(scope, binders)
            self.expect("punct", ")")
            return t
        self.fail("a term")

    # -- proofs

    def parse_proof(self, scope: _Scope, binders: list[str], hyps: list[str]) -> K.Proof:
        if self.at("kw", "assume"):
            self.next()
            self.expect("punct", "(")
            name = self.expect("ident").value
            self.expect("punct", ":")
            stmt = self.parse_term(scope, binders)
            self.expect("punct", ")")
            self.expect("punct", "=>")
            body = self.parse_proof(scope, binders, hyps + [name])
            return K.PrLa(stmt, body)
        if self.at("kw", "allintro"):
            self.next()
            self.expect("punct", "(")
            name = self.expect("ident").value
            self.expect("punct", ":")
            ty = self.parse_ty()
            self.expect("punct", ")")
            self.expect("punct", "=>")
            body = self.parse_proof(scope, [name] + binders, hyps)
            return K.TmLa(ty, body)
        if self.at("kw", "apply"):
            tok = self.next()
            p = self.parse_proof_atom(scope, binders, hyps)
            nargs = 0
            while True:
                if self.eat("punct", "["):
                    t = self.parse_term(scope, binders)
                    self.expect("punct", "]")
                    p = K.TmAp(p, t)
                elif self._at_proof_atom_start():
                    p = K.PrAp(p, self.parse_proof_atom(scope, binders, hyps))
                else:
                    break
                nargs += 1
            if nargs == 0:
                raise ArityError(tok.line, tok.col, "apply needs at least one argument")
            return p
        if self.at("kw", "allelim"):
            tok = self.next()
            p = self.parse_proof_atom(scope, binders, hyps)
            if not self.eat("punct", "["):
                raise ArityError(tok.line, tok.col, "allelim needs a [term] argument")
            t = self.parse_term(scope, binders)
            self.expect("punct", "]")
            return K.TmAp(p, t)
        return self.parse_proof_atom(scope, binders, hyps)

    def _at_proof_atom_start(self) -> bool:
        return (
            self.at("ident")
            or self.at("kw", "known")
            or self.at("kw", "ext")
            or self.at("punct", "(")
        )

    def parse_proof_atom(self, scope: _Scope, binders: list[str], hyps: list[str]) -> K.Proof:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            if tok.value in hyps:
                # innermost binding of the name wins
                return K.Hyp(len(hyps) - 1 - hyps[::-1].index(tok.value))
            raise UnknownName(tok.line, tok.col, tok.value)
        if self.eat("kw", "known"):
            ref = self.peek()
            if ref.kind == "hexid":
                self.next()
                return K.Known(bytes.fromhex(ref.value[1:]))
            name = self.expect("ident")
            if name.value not in scope.props:
                raise UnknownName(name.line, name.col, name.value)
            return K.Known(scope.props[name.value])
        if self.eat("kw", "ext"):
            self.expect("punct", "(")
            d = self.parse_ty()
            self.expect("punct", ",")
            c = self.parse_ty()
            self.expect("punct", ")")
            return K.Ext(d, c)
        if self.eat("punct", "("):
            p = self.parse_proof(scope, binders, hyps)
            self.expect("punct", ")")
            return p
        self.fail("a proof")


def parse_theory(text: str) -> TheorySpec:
    p = _Parser(text)
    p.expect("kw", "theory")
    bases = 1
    if p.eat("kw", "base"):
        bases = int(p.expect("number").value)
    prims: list[tuple[str, K.Ty]] = []
    axioms: list[tuple[str, K.Term]] = []
    spec = TheorySpec(bases, (), ())
    scope = _Scope(spec)
    while not p.at("eof"):
        if p.eat("kw", "prim"):
            tok = p.expect("ident")
            scope.claim(tok.value, tok)
            p.expect("punct", ":")
            prims.append((tok.value, p.parse_ty()))
            scope.theory = TheorySpec(bases, tuple(prims), ())
        elif p.eat("kw", "axiom"):
            tok = p.expect("ident")
            scope.claim(tok.value, tok)
            p.expect("punct", ":")
            axioms.append((tok.value, p.parse_term(scope, [])))
        else:
            p.fail("prim, axiom or end of file")
    return TheorySpec(bases, tuple(prims), tuple(axioms))


def parse_doc(text: str, theories: TheorySpec | dict[str, TheorySpec] | None = None) -> Document:
    """Parse a document; `theories` supplies primitive names for elaboration.

    Accepts a single TheorySpec (used regardless of the header reference) or
    a mapping from alias / hex id to TheorySpec.
    """
    p = _Parser(text)
    p.expect("kw", "theory")
    ref_tok = p.peek()
    if ref_tok.kind not in ("ident", "hexid"):
        p.fail("a theory reference")
    p.next()
    ref = ref_tok.value
    theory = None
    if isinstance(theories, TheorySpec):
        theory = theories
    elif isinstance(theories, dict):
        theory = theories.get(ref.lstrip("#"), theories.get(ref))
    scope = _Scope(theory)
    items: list[DocItem] = []
    while not p.at("eof"):
        if p.eat("kw", "param"):
            tok = p.expect("ident")
            scope.claim(tok.value, tok)
            if p.eat("punct", ":"):
                ty = p.parse_ty()
                p.expect("punct", "=")
                hexid = p.expect("hexid")
                oid = bytes.fromhex(hexid.value[1:])
                scope.consts[tok.value] = oid
                items.append(ParamObj(tok.value, oid, ty))
            else:
                p.expect("punct", "=")
                hexid = p.expect("hexid")
                pid = bytes.fromhex(hexid.value[1:])
                scope.props[tok.value] = pid
                items.append(ParamProp(tok.value, pid))
        elif p.eat("kw", "def"):
            tok = p.expect("ident")
            scope.claim(tok.value, tok)
            p.expect("punct", ":")
            ty = p.parse_ty()
            p.expect("punct", ":=")
            term = p.parse_term(scope, [])
            scope.consts[tok.value] = K.term_id(term)
            items.append(DefItem(tok.value, ty, term))
        elif p.eat("kw", "thm"):
            tok = p.expect("ident")
            scope.claim(tok.value, tok)
            p.expect("punct", ":")
            stmt = p.parse_term(scope, [])
            p.expect("kw", "proof")
            proof = p.parse_proof(scope, [], [])
            scope.props[tok.value] = K.prop_id(stmt)
            items.append(ThmItem(tok.value, stmt, proof))
        elif p.eat("kw", "conj"):
            tok = p.expect("ident")
            scope.claim(tok.value, tok)
            p.expect("punct", ":")
            stmt = p.parse_term(scope, [])
            tag = "Other"
            if p.eat("kw", "category"):
                tag = p.expect("string").value[1:-1]
                if not tag:
                    raise ParseError(tok.line, tok.col, "a nonempty category tag")
            items.append(ConjItem(tok.value, stmt, tag))
        else:
            p.fail("param, def, thm, conj or end of file")
    return Document(ref, tuple(items))


# ---------------------------------------------------------------------------
# printer

class _Names:
    def __init__(self, theory: TheorySpec | None, doc: Document | None):
        self.prims = [n for n, _ in theory.prims] if theory else []
        self.consts: dict[bytes, str] = {}
        self.props: dict[bytes, str] = {}
        # first binding of an id wins, so names stay resolvable on reparse
        # even when a theorem restates an axiom or a definition is aliased
        if theory is not None:
            for name, term in theory.axioms:
                self.props.setdefault(K.prop_id(term), name)
        if doc is not None:
            for item in doc.items:
                if isinstance(item, ParamObj):
                    self.consts.setdefault(item.id, item.name)
                elif isinstance(item, ParamProp):
                    self.props.setdefault(item.id, item.name)
                elif isinstance(item, DefItem):
                    self.consts.setdefault(K.term_id(item.term), item.name)
                elif isinstance(item, ThmItem):
                    self.props.setdefault(K.prop_id(item.stmt), item.name)


def print_ty(ty: K.Ty, prec: int = 0) -> str:
    match ty:
        case K.Prop():
            return "prop"
        case K.Base(0):
            return "set"
        case K.Base(i):
            return f"base{i}"
        case K.Func(d, c):
            s = f"{print_ty(d, 1)} -> {print_ty(c, 0)}"
            return f"({s})" if prec > 0 else s
    raise TypeError(ty)


def _print_term(t: K.Term, env: list[str], names: _Names, prec: int = 0) -> str:
    match t:
        case K.DB(i):
            return env[i] if i < len(env) else f"_{i - len(env)}"
        case K.Prim(i):
            if i < len(names.prims):
                return names.prims[i]
            raise ValueError(f"no name for primitive {i}; pass the theory spec")
        case K.Ref(h):
            return names.consts.get(h, "#" + h.hex())
        case K.Ap(f, a):
            s = f"{_print_term(f, env, names, 2)} {_print_term(a, env, names, 3)}"
            return f"({s})" if prec > 2 else s
        case K.Imp(a, b):
            s = f"{_print_term(a, env, names, 2)} -> {_print_term(b, env, names, 1)}"
            return f"({s})" if prec > 1 else s
        case K.La() | K.All():
            kw = "fun" if isinstance(t, K.La) else "all"
            groups = []
            body = t
            while isinstance(body, K.La if isinstance(t, K.La) else K.All):
                name = f"x{len(env) + len(groups)}"
                groups.append(f"({name} : {print_ty(body.dom)})")
                body = body.body
            inner_env = [f"x{len(env) + len(groups) - 1 - k}" for k in range(len(groups))] + env
            s = f"{kw} {' '.join(groups)} => {_print_term(body, inner_env, names, 0)}"
            return f"({s})" if prec > 0 else s
    raise TypeError(t)


def _print_proof(p: K.Proof, env: list[str], hyps: list[str], names: _Names, atom: bool = False) -> str:
    match p:
        case K.Hyp(i):
            return hyps[i] if i < len(hyps) else f"_h{i}"
        case K.Known(h):
            s = "known " + names.props.get(h, "#" + h.hex())
            return f"({s})" if atom else s
        case K.Ext(d, c):
            return f"ext({print_ty(d)}, {print_ty(c)})"
        case K.PrLa(stmt, body):
            name = f"h{len(hyps)}"
            s = (
                f"assume ({name} : {_print_term(stmt, env, names)}) => "
                f"{_print_proof(body, env, hyps + [name], names)}"
            )
            return f"({s})" if atom else s
        case K.TmLa(ty, body):
            name = f"x{len(env)}"
            s = (
                f"allintro ({name} : {print_ty(ty)}) => "
                f"{_print_proof(body, [name] + env, hyps, names)}"
            )
            return f"({s})" if atom else s
        case K.PrAp() | K.TmAp():
            args = []
            head = p
            while isinstance(head, (K.PrAp, K.TmAp)):
                if isinstance(head, K.PrAp):
                    args.append(_print_proof(head.q, env, hyps, names, atom=True))
                    head = head.p
                else:
                    args.append(f"[{_print_term(head.t, env, names)}]")
                    head = head.p
            args.append(_print_proof(head, env, hyps, names, atom=True))
            s = "apply " + " ".join(reversed(args))
            return f"({s})" if atom else s
    raise TypeError(p)


def print_term(t: K.Term, theory: TheorySpec | None = None, doc: Document | None = None) -> str:
    return _print_term(t, [], _Names(theory, doc))


def print_doc(doc: Document, theory: TheorySpec | None = None) -> str:
    names = _Names(theory, doc)
    lines = [f"theory {doc.theory_ref}", ""]
    for item in doc.items:
        match item:
            case ParamObj(name, oid, ty):
                lines.append(f"param {name} : {print_ty(ty)} = #{oid.hex()}")
            case ParamProp(name, pid):
                lines.append(f"param {name} = #{pid.hex()}")
            case DefItem(name, ty, term):
                lines.append(f"def {name} : {print_ty(ty)} := {_print_term(term, [], names)}")
            case ThmItem(name, stmt, proof):
                lines.append(f"thm {name} : {_print_term(stmt, [], names)}")
                lines.append(f"proof {_print_proof(proof, [], [], names)}")
            case ConjItem(name, stmt, tag):
                lines.append(f'conj {name} : {_print_term(stmt, [], names)} category "{tag}"')
        lines.append("")
    return "\n".join(lines)


def print_theory(spec: TheorySpec) -> str:
    names = _Names(spec, None)
    lines = ["theory", f"base {spec.bases}", ""]
    for name, ty in spec.prims:
        lines.append(f"prim {name} : {print_ty(ty)}")
    lines.append("")
    for name, term in spec.axioms:
        lines.append(f"axiom {name} : {_print_term(term, [], names)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# checking

@dataclass(frozen=True, slots=True)
class NewDef:
    id: bytes
    name: str
    ty: K.Ty
    body: K.Term
    deps: tuple[bytes, ...]


@dataclass(frozen=True, slots=True)
class NewThm:
    id: bytes
    name: str
    stmt: K.Term
    deps: tuple[bytes, ...]


@dataclass(frozen=True, slots=True)
class NewConj:
    id: bytes
    name: str
    stmt: K.Term
    tag: str
    deps: tuple[bytes, ...]


@dataclass
class DocEffect:
    new_defs: list[NewDef] = field(default_factory=list)
    new_thms: list[NewThm] = field(default_factory=list)
    new_conjs: list[NewConj] = field(default_factory=list)
    # refutations: (refuted proposition id, refuting theorem id)
    refutations: list[tuple[bytes, bytes]] = field(default_factory=list)
    sig_after: K.Signature | None = None


def collect_refs(t: K.Term, acc: set[bytes]) -> set[bytes]:
    match t:
        case K.Ref(h):
            acc.add(h)
        case K.Ap(f, a) | K.Imp(f, a):
            collect_refs(f, acc)
            collect_refs(a, acc)
        case K.La(_, b) | K.All(_, b):
            collect_refs(b, acc)
        case _:
            pass
    return acc


def collect_knowns(p: K.Proof, acc: set[bytes]) -> set[bytes]:
    match p:
        case K.Known(h):
            acc.add(h)
        case K.PrAp(a, b):
            collect_knowns(a, acc)
            collect_knowns(b, acc)
        case K.TmAp(a, t):
            collect_knowns(a, acc)
            collect_refs(t, acc)
        case K.PrLa(h, b):
            collect_refs(h, acc)
            collect_knowns(b, acc)
        case K.TmLa(_, b):
            collect_knowns(b, acc)
        case _:
            pass
    return acc


def check_doc(sig: K.Signature, doc: Document) -> DocEffect:
    """Check items left to right against sig; returns the ledger effect.

    Does not mutate the given signature; the extended copy is returned in
    the effect for callers that publish the document.
    """
    work = sig.copy()
    eff = DocEffect()
    for index, item in enumerate(doc.items):
        try:
            _check_item(work, eff, item)
        except (K.KernelError, DocError) as e:
            raise DocCheckError(index, getattr(item, "name", "?"), e) from e
    eff.sig_after = work
    return eff


def _check_item(sig: K.Signature, eff: DocEffect, item: DocItem) -> None:
    match item:
        case ParamObj(name, oid, ty):
            d = sig.defs.get(oid)
            if d is None:
                raise K.UnknownRef(f"param {name}: object {oid.hex()} not in signature")
            if ty != d.ty:
                raise K.TypeMismatch(ty, d.ty, f"param {name}")
        case ParamProp(name, pid):
            if sig.known(pid) is None:
                raise K.UnknownKnown(f"param {name}: proposition {pid.hex()} not in signature")
        case DefItem(_, ty, term):
            K.check_ty(sig, ty)
            if not K.is_closed(term):
                raise K.NotClosed("definition body must be closed")
            got = K.typecheck(sig, [], term)
            if got != ty:
                raise K.TypeMismatch(ty, got, "definition body")
            body = K.normalize(sig, term)
            oid = K.term_id(term)
            if oid not in sig.defs:
                sig.defs[oid] = K.Def(ty, body)
                eff.new_defs.append(
                    NewDef(oid, item.name, ty, body, tuple(sorted(collect_refs(body, set()))))
                )
        case ThmItem(name, stmt, proof):
            if not K.is_closed(stmt):
                raise K.NotClosed("theorem statement must be closed")
            got = K.typecheck(sig, [], stmt)
            if got != K.PROP:
                raise K.TypeMismatch(K.PROP, got, "theorem statement")
            concl = K.check_proof(sig, [], proof)
            if not K.conv(sig, stmt, concl):
                raise K.ConvFailure(f"proof of {name} concludes a different proposition")
            nf = K.normalize(sig, stmt)
            pid = K.prop_id(stmt)
            if pid not in sig.thms:
                sig.thms[pid] = nf
                deps = collect_refs(nf, set())
                collect_knowns(proof, deps)
                eff.new_thms.append(NewThm(pid, name, nf, tuple(sorted(deps))))
                if isinstance(nf, K.Imp) and K.conv(sig, nf.b, FALSE_TERM):
                    eff.refutations.append((K.prop_id(nf.a), pid))
        case ConjItem(name, stmt, tag):
            if not K.is_closed(stmt):
                raise K.NotClosed("conjecture must be closed")
            got = K.typecheck(sig, [], stmt)
            if got != K.PROP:
                raise K.TypeMismatch(K.PROP, got, "conjecture")
            nf = K.normalize(sig, stmt)
            eff.new_conjs.append(
                NewConj(K.prop_id(stmt), name, nf, tag, tuple(sorted(collect_refs(nf, set()))))
            )


def doc_report(sig: K.Signature, doc: Document) -> list[dict]:
    """Per-item status list for offline checking (CLI and HTTP mirror this)."""
    kinds = {
        ParamObj: "param", ParamProp: "param", DefItem: "def",
        ThmItem: "thm", ConjItem: "conj",
    }
    report = [
        {"index": i, "kind": kinds[type(it)], "name": it.name, "status": "pending"}
        for i, it in enumerate(doc.items)
    ]
    try:
        check_doc(sig, doc)
    except DocCheckError as e:
        for entry in report[: e.index]:
            entry["status"] = "ok"
        report[e.index]["status"] = "error"
        report[e.index]["error"] = type(e.cause).__name__
        report[e.index]["detail"] = str(e.cause)
        for entry in report[e.index + 1 :]:
            entry["status"] = "skipped"
        return report
    for entry in report:
        entry["status"] = "ok"
    return report


# ---------------------------------------------------------------------------
# wire serialization (documents and named theory specs inside transactions)

DOC_TAG = 0x21
THEORY_SPEC_TAG = 0x22
_IT_PARAM_OBJ, _IT_PARAM_PROP, _IT_DEF, _IT_THM, _IT_CONJ = 1, 2, 3, 4, 5


def _ser_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return uleb(len(raw)) + raw


def _deser_str(r: Reader) -> str:
    return r.take(r.uleb()).decode("utf-8")


def ser_doc(doc: Document, tid: bytes) -> bytes:
    out = bytearray([DOC_TAG])
    out += tid
    out += uleb(len(doc.items))
    for item in doc.items:
        match item:
            case ParamObj(name, oid, ty):
                out += bytes([_IT_PARAM_OBJ]) + _ser_str(name) + oid + K.ser_ty(ty)
            case ParamProp(name, pid):
                out += bytes([_IT_PARAM_PROP]) + _ser_str(name) + pid
            case DefItem(name, ty, term):
                out += bytes([_IT_DEF]) + _ser_str(name) + K.ser_ty(ty) + K.ser_term(term)
            case ThmItem(name, stmt, proof):
                out += bytes([_IT_THM]) + _ser_str(name) + K.ser_term(stmt) + K.ser_proof(proof)
            case ConjItem(name, stmt, tag):
                out += bytes([_IT_CONJ]) + _ser_str(name) + K.ser_term(stmt) + _ser_str(tag)
    return bytes(out)


def deser_doc(r: Reader) -> tuple[Document, bytes]:
    from .serial import FormatError

    if r.byte() != DOC_TAG:
        raise FormatError("not a document")
    tid = r.take(32)
    items: list[DocItem] = []
    for _ in range(r.uleb()):
        tag = r.byte()
        name = _deser_str(r)
        if tag == _IT_PARAM_OBJ:
            oid = r.take(32)
            items.append(ParamObj(name, oid, K.deser_ty(r)))
        elif tag == _IT_PARAM_PROP:
            items.append(ParamProp(name, r.take(32)))
        elif tag == _IT_DEF:
            ty = K.deser_ty(r)
            items.append(DefItem(name, ty, K.deser_term(r)))
        elif tag == _IT_THM:
            stmt = K.deser_term(r)
            items.append(ThmItem(name, stmt, K.deser_proof(r)))
        elif tag == _IT_CONJ:
            stmt = K.deser_term(r)
            items.append(ConjItem(name, stmt, _deser_str(r)))
        else:
            raise FormatError(f"bad document item tag {tag}")
    return Document("#" + tid.hex(), tuple(items)), tid


def ser_theory_spec(spec: TheorySpec) -> bytes:
    out = bytearray([THEORY_SPEC_TAG])
    out += uleb(spec.bases)
    out += uleb(len(spec.prims))
    for name, ty in spec.prims:
        out += _ser_str(name) + K.ser_ty(ty)
    out += uleb(len(spec.axioms))
    for name, term in spec.axioms:
        out += _ser_str(name) + K.ser_term(term)
    return bytes(out)


def deser_theory_spec(r: Reader) -> TheorySpec:
    from .serial import FormatError

    if r.byte() != THEORY_SPEC_TAG:
        raise FormatError("not a theory spec")
    bases = r.uleb()
    prims = tuple((_deser_str(r), K.deser_ty(r)) for _ in range(r.uleb()))
    axioms = tuple((_deser_str(r), K.deser_term(r)) for _ in range(r.uleb()))
    return TheorySpec(bases, prims, axioms)
