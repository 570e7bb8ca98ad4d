"""Proof kernel: intuitionistic higher-order logic with functional extensionality.

Types and terms use de Bruijn indices, so alpha-equivalence is structural
equality.  Conversion is beta-eta plus unfolding of defined constants (delta);
content identifiers hash the beta-eta normal form *without* unfolding, so
definitions keep identities distinct from their bodies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .serial import Reader, sha256, uleb


# ---------------------------------------------------------------------------
# errors

class KernelError(Exception):
    pass


class UnboundVariable(KernelError):
    pass


class UnknownRef(KernelError):
    pass


class TypeMismatch(KernelError):
    def __init__(self, expected, found, note=""):
        super().__init__(f"expected {expected}, found {found}" + (f" ({note})" if note else ""))
        self.expected = expected
        self.found = found


class NotClosed(KernelError):
    pass


class IllTyped(KernelError):
    pass


class BadHyp(KernelError):
    pass


class UnknownKnown(KernelError):
    pass


class NotAnImplication(KernelError):
    pass


class NotAForall(KernelError):
    pass


class ConvFailure(KernelError):
    pass


class IllTypedWitness(KernelError):
    pass


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True, slots=True)
class Prop:
    def __repr__(self):
        return "Prop"


@dataclass(frozen=True, slots=True)
class Base:
    index: int

    def __repr__(self):
        return f"Base({self.index})"


@dataclass(frozen=True, slots=True)
class Func:
    dom: "Ty"
    cod: "Ty"

    def __repr__(self):
        return f"({self.dom!r}->{self.cod!r})"


Ty = Prop | Base | Func

PROP = Prop()
SET = Base(0)


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True, slots=True)
class DB:
    index: int


@dataclass(frozen=True, slots=True)
class Prim:
    index: int


@dataclass(frozen=True, slots=True)
class Ref:
    id: bytes


@dataclass(frozen=True, slots=True)
class Ap:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class La:
    dom: Ty
    body: "Term"


@dataclass(frozen=True, slots=True)
class Imp:
    a: "Term"
    b: "Term"


@dataclass(frozen=True, slots=True)
class All:
    dom: Ty
    body: "Term"


Term = DB | Prim | Ref | Ap | La | Imp | All


# ---------------------------------------------------------------------------
# proofs

@dataclass(frozen=True, slots=True)
class Hyp:
    index: int


@dataclass(frozen=True, slots=True)
class Known:
    id: bytes


@dataclass(frozen=True, slots=True)
class PrAp:
    p: "Proof"
    q: "Proof"


@dataclass(frozen=True, slots=True)
class TmAp:
    p: "Proof"
    t: Term


@dataclass(frozen=True, slots=True)
class PrLa:
    hyp: Term
    body: "Proof"


@dataclass(frozen=True, slots=True)
class TmLa:
    dom: Ty
    body: "Proof"


@dataclass(frozen=True, slots=True)
class Ext:
    dom: Ty
    cod: Ty


Proof = Hyp | Known | PrAp | TmAp | PrLa | TmLa | Ext


# ---------------------------------------------------------------------------
# signatures

@dataclass(frozen=True, slots=True)
class Def:
    ty: Ty
    body: Term  # stored in beta-eta normal form


@dataclass
class Signature:
    """Typing environment: base-type count, primitives, axioms, defs, theorems.

    Theorems map their id to the statement so Known nodes can recover it;
    the id set alone would not support proof replay.
    """

    bases: int = 1
    prims: tuple[Ty, ...] = ()
    axioms: dict[bytes, Term] = field(default_factory=dict)
    defs: dict[bytes, Def] = field(default_factory=dict)
    thms: dict[bytes, Term] = field(default_factory=dict)

    def known(self, h: bytes) -> Term | None:
        stmt = self.axioms.get(h)
        if stmt is None:
            stmt = self.thms.get(h)
        return stmt

    def copy(self) -> "Signature":
        return Signature(self.bases, self.prims, dict(self.axioms), dict(self.defs), dict(self.thms))


# ---------------------------------------------------------------------------
# de Bruijn plumbing

def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    match t:
        case DB(i):
            return DB(i + d) if i >= cutoff else t
        case Prim() | Ref():
            return t
        case Ap(f, a):
            return Ap(shift(f, d, cutoff), shift(a, d, cutoff))
        case La(ty, b):
            return La(ty, shift(b, d, cutoff + 1))
        case Imp(a, b):
            return Imp(shift(a, d, cutoff), shift(b, d, cutoff))
        case All(ty, b):
            return All(ty, shift(b, d, cutoff + 1))
    raise TypeError(t)


def _subst(t: Term, j: int, s: Term) -> Term:
    match t:
        case DB(i):
            return s if i == j else t
        case Prim() | Ref():
            return t
        case Ap(f, a):
            return Ap(_subst(f, j, s), _subst(a, j, s))
        case La(ty, b):
            return La(ty, _subst(b, j + 1, shift(s, 1)))
        case Imp(a, b):
            return Imp(_subst(a, j, s), _subst(b, j, s))
        case All(ty, b):
            return All(ty, _subst(b, j + 1, shift(s, 1)))
    raise TypeError(t)


def subst_top(body: Term, arg: Term) -> Term:
    """Substitute arg for DB 0 in body, removing the binder level."""
    return shift(_subst(body, 0, shift(arg, 1)), -1)


def occurs_free(t: Term, j: int = 0) -> bool:
    match t:
        case DB(i):
            return i == j
        case Prim() | Ref():
            return False
        case Ap(f, a):
            return occurs_free(f, j) or occurs_free(a, j)
        case La(_, b) | All(_, b):
            return occurs_free(b, j + 1)
        case Imp(a, b):
            return occurs_free(a, j) or occurs_free(b, j)
    raise TypeError(t)


def is_closed(t: Term, depth: int = 0) -> bool:
    match t:
        case DB(i):
            return i < depth
        case Prim() | Ref():
            return True
        case Ap(f, a):
            return is_closed(f, depth) and is_closed(a, depth)
        case La(_, b) | All(_, b):
            return is_closed(b, depth + 1)
        case Imp(a, b):
            return is_closed(a, depth) and is_closed(b, depth)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# typechecking

def check_ty(sig: Signature, ty: Ty) -> None:
    match ty:
        case Prop():
            return
        case Base(i):
            if i >= sig.bases:
                raise UnknownRef(f"base type {i} outside theory with {sig.bases} base types")
        case Func(d, c):
            check_ty(sig, d)
            check_ty(sig, c)
        case _:
            raise TypeError(ty)


def typecheck(sig: Signature, ctx: list[Ty], t: Term) -> Ty:
    """Infer the unique simple type of t; ctx[0] is the innermost binder."""
    match t:
        case DB(i):
            if i >= len(ctx):
                raise UnboundVariable(f"de Bruijn index {i} in context of depth {len(ctx)}")
            return ctx[i]
        case Prim(i):
            if i >= len(sig.prims):
                raise UnknownRef(f"primitive {i} not declared")
            return sig.prims[i]
        case Ref(h):
            d = sig.defs.get(h)
            if d is None:
                raise UnknownRef(f"undefined object {h.hex()}")
            return d.ty
        case Ap(f, a):
            tf = typecheck(sig, ctx, f)
            ta = typecheck(sig, ctx, a)
            if not isinstance(tf, Func):
                raise TypeMismatch("function type", tf, "applied a non-function")
            if tf.dom != ta:
                raise TypeMismatch(tf.dom, ta, "argument type")
            return tf.cod
        case La(ty, b):
            check_ty(sig, ty)
            return Func(ty, typecheck(sig, [ty] + ctx, b))
        case Imp(a, b):
            for side in (a, b):
                ts = typecheck(sig, ctx, side)
                if ts != PROP:
                    raise TypeMismatch(PROP, ts, "implication side")
            return PROP
        case All(ty, b):
            check_ty(sig, ty)
            tb = typecheck(sig, [ty] + ctx, b)
            if tb != PROP:
                raise TypeMismatch(PROP, tb, "quantifier body")
            return PROP
    raise TypeError(t)


def is_proposition(sig: Signature, t: Term) -> bool:
    try:
        return is_closed(t) and typecheck(sig, [], t) == PROP
    except KernelError:
        return False


# ---------------------------------------------------------------------------
# normalization and conversion

def normalize(sig: Signature | None, t: Term, unfold: bool = False) -> Term:
    """Beta-eta normal form; with unfold, defined constants are expanded first.

    Terminates for well-typed terms (simple types).  Defs store normal bodies,
    and definitions are acyclic by construction, so unfolding terminates too.
    """

    def norm(t: Term) -> Term:
        match t:
            case DB() | Prim():
                return t
            case Ref(h):
                if not unfold:
                    return t
                if sig is None or h not in sig.defs:
                    raise UnknownRef(f"cannot unfold unknown object {h.hex()}")
                return norm(sig.defs[h].body)
            case Ap(f, a):
                fn = norm(f)
                if isinstance(fn, La):
                    return norm(subst_top(fn.body, a))
                return Ap(fn, norm(a))
            case La(ty, b):
                bn = norm(b)
                # eta: La x. f x  ==>  f   when x not free in f
                if isinstance(bn, Ap) and bn.arg == DB(0) and not occurs_free(bn.fn, 0):
                    return shift(bn.fn, -1)
                return La(ty, bn)
            case Imp(a, b):
                return Imp(norm(a), norm(b))
            case All(ty, b):
                return All(ty, norm(b))
        raise TypeError(t)

    return norm(t)


def conv(sig: Signature, a: Term, b: Term) -> bool:
    """Beta-eta-delta convertibility."""
    return normalize(sig, a, unfold=True) == normalize(sig, b, unfold=True)


# ---------------------------------------------------------------------------
# functional extensionality

def leibniz_eq(rho: Ty, a: Term, b: Term) -> Term:
    """Leibniz equality at type rho: every rho-predicate of a holds of b."""
    return All(Func(rho, PROP), Imp(Ap(DB(0), shift(a, 1)), Ap(DB(0), shift(b, 1))))


def ext_prop(dom: Ty, cod: Ty) -> Term:
    """The extensionality schema instance proved by Ext(dom, cod):

    all f g : dom->cod, (all x : dom, (f x) = (g x)) -> f = g
    with = spelled as Leibniz equality at the appropriate type.
    """
    fty = Func(dom, cod)
    pointwise = All(dom, leibniz_eq(cod, Ap(DB(2), DB(0)), Ap(DB(1), DB(0))))
    return All(fty, All(fty, Imp(pointwise, leibniz_eq(fty, DB(1), DB(0)))))


# ---------------------------------------------------------------------------
# proof checking

def check_proof(sig: Signature, hyps: list[Term], p: Proof) -> Term:
    """Return the proposition proved by p, in beta-eta normal form."""
    for h in hyps:
        if not is_proposition(sig, h):
            raise BadHyp("hypothesis is not a closed proposition")
    prop = _check(sig, [], list(hyps), p)
    return normalize(sig, prop)


def _check(sig: Signature, ctx: list[Ty], hyps: list[Term], p: Proof) -> Term:
    match p:
        case Hyp(i):
            if i >= len(hyps):
                raise BadHyp(f"hypothesis {i} of {len(hyps)}")
            return hyps[i]
        case Known(h):
            stmt = sig.known(h)
            if stmt is None:
                raise UnknownKnown(f"no axiom or theorem {h.hex()}")
            return stmt
        case PrAp(pf, qf):
            pa = normalize(sig, _check(sig, ctx, hyps, pf), unfold=True)
            if not isinstance(pa, Imp):
                raise NotAnImplication(f"modus ponens on {pa}")
            qa = normalize(sig, _check(sig, ctx, hyps, qf), unfold=True)
            if qa != pa.a:
                raise ConvFailure("antecedent does not match argument proof")
            return pa.b
        case TmAp(pf, t):
            pa = normalize(sig, _check(sig, ctx, hyps, pf), unfold=True)
            if not isinstance(pa, All):
                raise NotAForall(f"universal elimination on {pa}")
            try:
                ta = typecheck(sig, ctx, t)
            except KernelError as e:
                raise IllTypedWitness(str(e)) from e
            if ta != pa.dom:
                raise IllTypedWitness(f"witness has type {ta}, quantifier expects {pa.dom}")
            return subst_top(pa.body, t)
        case PrLa(a, body):
            try:
                ta = typecheck(sig, ctx, a)
            except KernelError as e:
                raise BadHyp(str(e)) from e
            if ta != PROP:
                raise BadHyp(f"assumed term has type {ta}, not Prop")
            b = _check(sig, ctx, hyps + [a], body)
            return Imp(a, b)
        case TmLa(ty, body):
            check_ty(sig, ty)
            lifted = [shift(h, 1) for h in hyps]
            b = _check(sig, [ty] + ctx, lifted, body)
            return All(ty, b)
        case Ext(d, c):
            check_ty(sig, d)
            check_ty(sig, c)
            return ext_prop(d, c)
    raise TypeError(p)


# ---------------------------------------------------------------------------
# canonical serialization and content identifiers

TY_PROP, TY_BASE, TY_FUNC = 0x00, 0x01, 0x02
TM_DB, TM_PRIM, TM_REF, TM_AP, TM_LA, TM_IMP, TM_ALL = 0x10, 0x11, 0x12, 0x13, 0x14, 0x15, 0x16
THEORY_TAG = 0x20


def ser_ty(ty: Ty) -> bytes:
    match ty:
        case Prop():
            return bytes([TY_PROP])
        case Base(i):
            return bytes([TY_BASE]) + uleb(i)
        case Func(d, c):
            return bytes([TY_FUNC]) + ser_ty(d) + ser_ty(c)
    raise TypeError(ty)


def ser_term(t: Term) -> bytes:
    match t:
        case DB(i):
            return bytes([TM_DB]) + uleb(i)
        case Prim(i):
            return bytes([TM_PRIM]) + uleb(i)
        case Ref(h):
            return bytes([TM_REF]) + h
        case Ap(f, a):
            return bytes([TM_AP]) + ser_term(f) + ser_term(a)
        case La(ty, b):
            return bytes([TM_LA]) + ser_ty(ty) + ser_term(b)
        case Imp(a, b):
            return bytes([TM_IMP]) + ser_term(a) + ser_term(b)
        case All(ty, b):
            return bytes([TM_ALL]) + ser_ty(ty) + ser_term(b)
    raise TypeError(t)


def deser_ty(r: Reader) -> Ty:
    tag = r.byte()
    if tag == TY_PROP:
        return PROP
    if tag == TY_BASE:
        return Base(r.uleb())
    if tag == TY_FUNC:
        d = deser_ty(r)
        return Func(d, deser_ty(r))
    raise_format(tag, "type")


def deser_term(r: Reader) -> Term:
    tag = r.byte()
    if tag == TM_DB:
        return DB(r.uleb())
    if tag == TM_PRIM:
        return Prim(r.uleb())
    if tag == TM_REF:
        return Ref(r.take(32))
    if tag == TM_AP:
        f = deser_term(r)
        return Ap(f, deser_term(r))
    if tag == TM_LA:
        ty = deser_ty(r)
        return La(ty, deser_term(r))
    if tag == TM_IMP:
        a = deser_term(r)
        return Imp(a, deser_term(r))
    if tag == TM_ALL:
        ty = deser_ty(r)
        return All(ty, deser_term(r))
    raise_format(tag, "term")


def raise_format(tag: int, what: str):
    from .serial import FormatError

    raise FormatError(f"bad {what} tag 0x{tag:02x}")


def term_id(t: Term, sig: Signature | None = None) -> bytes:
    """Content id: SHA-256 of the canonical bytes of the beta-eta normal form.

    Refs are not unfolded, so a definition and its body have distinct ids.
    With a signature supplied, well-typedness is enforced.
    """
    if not is_closed(t):
        raise NotClosed("ids are defined for closed terms only")
    if sig is not None:
        try:
            typecheck(sig, [], t)
        except KernelError as e:
            raise IllTyped(str(e)) from e
    return sha256(ser_term(normalize(sig, t)))


# a proposition id is the content id of the (normal-form) statement
prop_id = term_id


def ser_theory(bases: int, prim_tys: list[Ty], axioms: list[Term]) -> bytes:
    out = bytearray([THEORY_TAG])
    out += uleb(bases)
    out += uleb(len(prim_tys))
    for ty in prim_tys:
        out += ser_ty(ty)
    out += uleb(len(axioms))
    for ax in axioms:
        out += ser_term(normalize(None, ax))
    return bytes(out)


def theory_id(bases: int, prim_tys: list[Ty], axioms: list[Term]) -> bytes:
    return sha256(ser_theory(bases, prim_tys, axioms))


# ---------------------------------------------------------------------------
# proof serialization (used by document embedding in transactions)

PF_HYP, PF_KNOWN, PF_PRAP, PF_TMAP, PF_PRLA, PF_TMLA, PF_EXT = (
    0x50, 0x51, 0x52, 0x53, 0x54, 0x55, 0x56,
)


def ser_proof(p: Proof) -> bytes:
    match p:
        case Hyp(i):
            return bytes([PF_HYP]) + uleb(i)
        case Known(h):
            return bytes([PF_KNOWN]) + h
        case PrAp(a, b):
            return bytes([PF_PRAP]) + ser_proof(a) + ser_proof(b)
        case TmAp(a, t):
            return bytes([PF_TMAP]) + ser_proof(a) + ser_term(t)
        case PrLa(h, b):
            return bytes([PF_PRLA]) + ser_term(h) + ser_proof(b)
        case TmLa(ty, b):
            return bytes([PF_TMLA]) + ser_ty(ty) + ser_proof(b)
        case Ext(d, c):
            return bytes([PF_EXT]) + ser_ty(d) + ser_ty(c)
    raise TypeError(p)


def deser_proof(r: Reader) -> Proof:
    tag = r.byte()
    if tag == PF_HYP:
        return Hyp(r.uleb())
    if tag == PF_KNOWN:
        return Known(r.take(32))
    if tag == PF_PRAP:
        a = deser_proof(r)
        return PrAp(a, deser_proof(r))
    if tag == PF_TMAP:
        a = deser_proof(r)
        return TmAp(a, deser_term(r))
    if tag == PF_PRLA:
        h = deser_term(r)
        return PrLa(h, deser_proof(r))
    if tag == PF_TMLA:
        ty = deser_ty(r)
        return TmLa(ty, deser_proof(r))
    if tag == PF_EXT:
        d = deser_ty(r)
        return Ext(d, deser_ty(r))
    raise_format(tag, "proof")
