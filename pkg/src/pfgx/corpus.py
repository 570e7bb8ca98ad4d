"""Built-in theories and the shipped document corpus.

The hereditarily-finite-set theory is the chain's built-in theory: the first
blocks place automatic bounties on pseudorandom propositions over it.  The
larger set-theory signature and the category-theory documents live as text
fixtures under corpus/ and are published on-chain by scenarios.
"""

from __future__ import annotations

from functools import cache
from importlib import resources

from . import docform as D
from . import kernel as K

HF_TEXT = """\
theory
base 1

prim in : set -> set -> prop
prim empty : set
prim ins : set -> set -> set

axiom no_mem_empty : all (x : set) => in x empty -> all (p : prop) => p
axiom mem_ins : all (x : set) (y : set) => in x (ins x y)
axiom mem_ins_mono : all (x : set) (y : set) (z : set) => in z y -> in z (ins x y)
"""

# primitive indices of the HF theory, used by the proposition generator
HF_IN, HF_EMPTY, HF_INS = 0, 1, 2


@cache
def hf_spec() -> D.TheorySpec:
    return D.parse_theory(HF_TEXT)


@cache
def hf_id() -> bytes:
    return D.theory_id_of(hf_spec())


def hf_sig() -> K.Signature:
    return D.check_theory(hf_spec())


@cache
def _corpus_text(name: str) -> str:
    return resources.files("pfgx").joinpath(f"corpus/{name}").read_text("utf-8")


@cache
def hotg_spec() -> D.TheorySpec:
    return D.parse_theory(_corpus_text("mini_hotg.pfgt"))


@cache
def hotg_id() -> bytes:
    return D.theory_id_of(hotg_spec())


def theory_aliases() -> dict[str, D.TheorySpec]:
    """Built-in theory specs by alias and by hex id."""
    table = {"mini_hf": hf_spec(), "mini_hotg": hotg_spec()}
    table[hf_id().hex()] = hf_spec()
    table[hotg_id().hex()] = hotg_spec()
    return table


# document fixtures in dependency order: each may import names defined by
# earlier ones, so offline checking replays the prefix
DOC_ORDER = [
    "logic_base.pfgd",
    "logic_and.pfgd",
    "logic_and_props.pfgd",
    "logic_iff.pfgd",
    "logic_neg.pfgd",
    "eq_basic.pfgd",
    "eq_congr.pfgd",
    "ext_demo.pfgd",
    "forall_demo.pfgd",
    "hf_empty.pfgd",
    "hf_ins.pfgd",
    "cat_defs.pfgd",
    "cat_exists.pfgd",
    "cat_sets.pfgd",
    "cat_binreln.pfgd",
    "cat_irrpartord.pfgd",
    "bounty_targets.pfgd",
    "bounty_proofs.pfgd",
]


def doc_text(name: str) -> str:
    if not name.endswith(".pfgd"):
        name += ".pfgd"
    return _corpus_text(name)


@cache
def corpus_docs() -> list[tuple[str, D.Document]]:
    """All fixture documents parsed against their own theories, in order."""
    aliases = theory_aliases()
    return [(name, D.parse_doc(_corpus_text(name), aliases)) for name in DOC_ORDER]


def resolve_theory_id(ref: str) -> bytes:
    """Theory id for a document header reference (alias or #hex)."""
    ref = ref.lstrip("#")
    if ref == "mini_hf":
        return hf_id()
    if ref == "mini_hotg":
        return hotg_id()
    return bytes.fromhex(ref)


@cache
def corpus_sigs() -> dict[bytes, K.Signature]:
    """Per-theory signatures after checking the whole corpus in order."""
    sigs = {hf_id(): hf_sig(), hotg_id(): D.check_theory(hotg_spec())}
    for name, doc in corpus_docs():
        tid = resolve_theory_id(doc.theory_ref)
        eff = D.check_doc(sigs[tid], doc)
        sigs[tid] = eff.sig_after
    return sigs


def corpus_prop_id(doc_name: str, item_name: str) -> bytes:
    """PropId of a named thm or conj in a corpus document."""
    for name, doc in corpus_docs():
        if name == doc_name or name == doc_name + ".pfgd":
            for item in doc.items:
                if isinstance(item, (D.ThmItem, D.ConjItem)) and item.name == item_name:
                    return K.prop_id(item.stmt)
    raise KeyError(f"{doc_name}:{item_name}")
