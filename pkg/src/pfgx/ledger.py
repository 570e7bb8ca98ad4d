"""Assets, addresses, transactions, blocks, chain state and validation.

Value model: currency and bounty amounts are unsigned integer atomic units.
Fees are burned, so total supply equals the sum of block subsidies minus all
fees ever paid.  Consensus is proof-of-authority: a fixed producer set from
the genesis file signs blocks round-robin by height.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

from . import corpus, docform as D, kernel as K, keys
from .serial import Reader, sha256, uleb

# ---------------------------------------------------------------------------
# errors

class LedgerError(Exception):
    pass


class TxError(LedgerError):
    pass


class MissingInput(TxError):
    pass


class DoubleSpend(TxError):
    pass


class BadSignature(TxError):
    pass


class ValueCreated(TxError):
    pass


class MarkerMissing(TxError):
    pass


class MarkerImmature(TxError):
    pass


class CommitmentMismatch(TxError):
    pass


class DocCheckFailed(TxError):
    pass


class OwnershipOutputsWrong(TxError):
    pass


class BountyNotRedeemable(TxError):
    pass


class BountyTargetMismatch(TxError):
    pass


class BadOutput(TxError):
    pass


class AlreadyPublished(TxError):
    pass


class BlockError(LedgerError):
    pass


class UnknownParent(BlockError):
    pass


class BadProducer(BlockError):
    pass


class BadHeaderSig(BlockError):
    pass


class BadHeader(BlockError):
    pass


class AutoBountyMissing(BlockError):
    pass


class TxInvalid(BlockError):
    def __init__(self, index: int, reason: TxError):
        super().__init__(f"tx {index}: {reason}")
        self.index = index
        self.reason = reason


# ---------------------------------------------------------------------------
# addresses

PAY_TO_KEY = 0x31
PROP_ADDR = 0x30


def derive_addr(pubkey: bytes) -> bytes:
    return bytes([PAY_TO_KEY]) + sha256(pubkey)[:20]


def prop_addr(theory: bytes, prop: bytes) -> bytes:
    return bytes([PROP_ADDR]) + sha256(theory + prop)[:20]


def theory_addr(theory: bytes) -> bytes:
    return prop_addr(theory, theory)


def addr_kind(addr: bytes) -> int:
    if len(addr) != 21 or addr[0] not in (PAY_TO_KEY, PROP_ADDR):
        raise BadOutput(f"malformed address {addr.hex()}")
    return addr[0]


# ---------------------------------------------------------------------------
# asset payloads (wire tags 0x40..0x47)

@dataclass(frozen=True, slots=True)
class Currency:
    amount: int


@dataclass(frozen=True, slots=True)
class Bounty:
    amount: int
    theory: bytes
    prop: bytes  # target proposition; the asset's address commits to it


@dataclass(frozen=True, slots=True)
class OwnsProp:
    holder: bytes


@dataclass(frozen=True, slots=True)
class OwnsNegProp:
    holder: bytes


@dataclass(frozen=True, slots=True)
class OwnsObj:
    holder: bytes


@dataclass(frozen=True, slots=True)
class Marker:
    commitment: bytes


@dataclass(frozen=True, slots=True)
class TheoryPub:
    theory: bytes


@dataclass(frozen=True, slots=True)
class DocPub:
    doc: bytes


Payload = Currency | Bounty | OwnsProp | OwnsNegProp | OwnsObj | Marker | TheoryPub | DocPub

_PAYLOAD_TAGS = [Currency, Bounty, OwnsProp, OwnsNegProp, OwnsObj, Marker, TheoryPub, DocPub]


def ser_payload(p: Payload) -> bytes:
    tag = bytes([0x40 + _PAYLOAD_TAGS.index(type(p))])
    match p:
        case Currency(amount):
            return tag + uleb(amount)
        case Bounty(amount, theory, prop):
            return tag + uleb(amount) + theory + prop
        case OwnsProp(h) | OwnsNegProp(h) | OwnsObj(h):
            return tag + h
        case Marker(c):
            return tag + c
        case TheoryPub(t):
            return tag + t
        case DocPub(d):
            return tag + d
    raise TypeError(p)


def deser_payload(r: Reader) -> Payload:
    from .serial import FormatError

    tag = r.byte() - 0x40
    if not 0 <= tag < len(_PAYLOAD_TAGS):
        raise FormatError(f"bad payload tag 0x{tag + 0x40:02x}")
    cls = _PAYLOAD_TAGS[tag]
    if cls is Currency:
        return Currency(r.uleb())
    if cls is Bounty:
        amount = r.uleb()
        theory = r.take(32)
        return Bounty(amount, theory, r.take(32))
    if cls in (OwnsProp, OwnsNegProp, OwnsObj):
        return cls(r.take(21))
    if cls is Marker:
        return Marker(r.take(32))
    if cls is TheoryPub:
        return TheoryPub(r.take(32))
    return DocPub(r.take(32))


@dataclass(frozen=True, slots=True)
class Asset:
    asset_id: bytes  # sha256(creating txid + uleb(output index))
    addr: bytes
    payload: Payload
    born: int  # block height


# ---------------------------------------------------------------------------
# transactions

@dataclass(frozen=True, slots=True)
class TxInput:
    asset_id: bytes
    pubkey: bytes  # 32 bytes, must control the input's address
    sig: bytes  # 64 bytes over the tx sighash


@dataclass(frozen=True, slots=True)
class TxOutput:
    addr: bytes
    payload: Payload


@dataclass(frozen=True, slots=True)
class DocAttachment:
    theory: bytes
    doc: D.Document


@dataclass(frozen=True, slots=True)
class Tx:
    inputs: tuple[TxInput, ...]
    outputs: tuple[TxOutput, ...]
    attachment: D.TheorySpec | DocAttachment | None = None


def ser_tx(tx: Tx, for_sig: bool = False) -> bytes:
    out = bytearray()
    out += uleb(len(tx.inputs))
    for i in tx.inputs:
        out += i.asset_id + i.pubkey
        if not for_sig:
            out += i.sig
    out += uleb(len(tx.outputs))
    for o in tx.outputs:
        out += o.addr + ser_payload(o.payload)
    if tx.attachment is None:
        out += b"\x00"
    elif isinstance(tx.attachment, D.TheorySpec):
        out += b"\x01" + D.ser_theory_spec(tx.attachment)
    else:
        out += b"\x02" + D.ser_doc(tx.attachment.doc, tx.attachment.theory)
    return bytes(out)


def deser_tx(r: Reader) -> Tx:
    from .serial import FormatError

    inputs = tuple(
        TxInput(r.take(32), r.take(32), r.take(64)) for _ in range(r.uleb())
    )
    outputs = tuple(TxOutput(r.take(21), deser_payload(r)) for _ in range(r.uleb()))
    kind = r.byte()
    if kind == 0:
        attachment = None
    elif kind == 1:
        attachment = D.deser_theory_spec(r)
    elif kind == 2:
        doc, tid = D.deser_doc(r)
        attachment = DocAttachment(tid, doc)
    else:
        raise FormatError(f"bad attachment tag {kind}")
    return Tx(inputs, outputs, attachment)


def txid(tx: Tx) -> bytes:
    return sha256(ser_tx(tx))


def tx_sighash(tx: Tx) -> bytes:
    return sha256(ser_tx(tx, for_sig=True))


def sign_tx(tx: Tx, signers: list[keys.SigningKey]) -> Tx:
    """Fill input pubkeys and signatures; signers align with inputs by
    position.  The sighash covers the final pubkeys, so they are placed
    before hashing."""
    with_keys = replace(
        tx,
        inputs=tuple(
            replace(i, pubkey=k.pubkey) for i, k in zip(tx.inputs, signers)
        ),
    )
    h = tx_sighash(with_keys)
    inputs = tuple(
        replace(i, sig=k.sign(h)) for i, k in zip(with_keys.inputs, signers)
    )
    return replace(with_keys, inputs=inputs)


# ---------------------------------------------------------------------------
# blocks

@dataclass(frozen=True, slots=True)
class BlockHeader:
    parent: bytes
    height: int
    timestamp: int
    producer: bytes  # pubkey
    sig: bytes
    body_hash: bytes


@dataclass(frozen=True, slots=True)
class Block:
    header: BlockHeader
    body: tuple[Tx, ...]


def ser_header(h: BlockHeader, for_sig: bool = False) -> bytes:
    out = h.parent + uleb(h.height) + uleb(h.timestamp) + h.producer
    if not for_sig:
        out += h.sig
    return out + h.body_hash


def body_hash(body: tuple[Tx, ...]) -> bytes:
    out = bytearray(uleb(len(body)))
    for tx in body:
        out += ser_tx(tx)
    return sha256(bytes(out))


def block_hash(b: Block) -> bytes:
    return sha256(ser_header(b.header))


def ser_block(b: Block) -> bytes:
    out = bytearray(ser_header(b.header))
    out += uleb(len(b.body))
    for tx in b.body:
        out += ser_tx(tx)
    return bytes(out)


def deser_block(r: Reader) -> Block:
    header = BlockHeader(
        parent=r.take(32), height=r.uleb(), timestamp=r.uleb(),
        producer=r.take(32), sig=r.take(64), body_hash=r.take(32),
    )
    body = tuple(deser_tx(r) for _ in range(r.uleb()))
    return Block(header, body)


# ---------------------------------------------------------------------------
# chain parameters (genesis file)

@dataclass(frozen=True)
class ChainParams:
    producer_seeds: tuple[int, ...] = (0,)
    subsidy: int = 50
    genesis_subsidy: int = 10_000
    auto_bounty_blocks: int = 10
    auto_bounty_amount: int = 25
    marker_maturity: int = 4
    timestamp: int = 1_700_000_000

    @property
    def producers(self) -> tuple[bytes, ...]:
        return tuple(keys.key_from_seed(s).pubkey for s in self.producer_seeds)

    def producer_for(self, height: int) -> bytes:
        return self.producers[height % len(self.producers)]

    def producer_key(self, height: int) -> keys.SigningKey:
        return keys.key_from_seed(self.producer_seeds[height % len(self.producer_seeds)])

    def to_json(self) -> str:
        return json.dumps(
            {
                "producer_seeds": list(self.producer_seeds),
                "subsidy": self.subsidy,
                "genesis_subsidy": self.genesis_subsidy,
                "auto_bounty_blocks": self.auto_bounty_blocks,
                "auto_bounty_amount": self.auto_bounty_amount,
                "marker_maturity": self.marker_maturity,
                "timestamp": self.timestamp,
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "ChainParams":
        raw = json.loads(text)
        return ChainParams(
            producer_seeds=tuple(raw.get("producer_seeds", [0])),
            subsidy=raw.get("subsidy", 50),
            genesis_subsidy=raw.get("genesis_subsidy", 10_000),
            auto_bounty_blocks=raw.get("auto_bounty_blocks", 10),
            auto_bounty_amount=raw.get("auto_bounty_amount", 25),
            marker_maturity=raw.get("marker_maturity", 4),
            timestamp=raw.get("timestamp", 1_700_000_000),
        )


# ---------------------------------------------------------------------------
# chain state

@dataclass
class TheoryEntry:
    spec: D.TheorySpec
    sig: K.Signature


class ChainState:
    """Confirmed ledger at one block: live assets, spent set, published logic."""

    def __init__(self):
        self.assets: dict[bytes, dict[bytes, Asset]] = {}
        self.by_id: dict[bytes, Asset] = {}
        self.spent: set[bytes] = set()
        self.theories: dict[bytes, TheoryEntry] = {}
        self.height = 0
        self.supply = 0

    def copy(self) -> "ChainState":
        st = ChainState()
        st.assets = {addr: dict(group) for addr, group in self.assets.items()}
        st.by_id = dict(self.by_id)
        st.spent = set(self.spent)
        st.theories = {
            tid: TheoryEntry(e.spec, e.sig.copy()) for tid, e in self.theories.items()
        }
        st.height = self.height
        st.supply = self.supply
        return st

    def asset(self, asset_id: bytes) -> Asset | None:
        return self.by_id.get(asset_id)

    def add_asset(self, a: Asset) -> None:
        self.assets.setdefault(a.addr, {})[a.asset_id] = a
        self.by_id[a.asset_id] = a

    def spend(self, asset_id: bytes) -> None:
        a = self.by_id.pop(asset_id)
        group = self.assets[a.addr]
        del group[asset_id]
        if not group:
            del self.assets[a.addr]
        self.spent.add(asset_id)

    def live_at(self, addr: bytes) -> list[Asset]:
        return sorted(self.assets.get(addr, {}).values(), key=lambda a: a.asset_id)

    def digest(self) -> bytes:
        out = bytearray()
        out += uleb(self.height) + uleb(self.supply)
        out += uleb(len(self.by_id))
        for aid in sorted(self.by_id):
            a = self.by_id[aid]
            out += aid + a.addr + ser_payload(a.payload) + uleb(a.born)
        out += uleb(len(self.spent))
        for aid in sorted(self.spent):
            out += aid
        out += uleb(len(self.theories))
        for tid in sorted(self.theories):
            sig = self.theories[tid].sig
            out += tid + uleb(len(sig.defs))
            for oid in sorted(sig.defs):
                d = sig.defs[oid]
                out += oid + K.ser_ty(d.ty) + K.ser_term(d.body)
            out += uleb(len(sig.thms))
            for pid in sorted(sig.thms):
                out += pid + K.ser_term(sig.thms[pid])
        return sha256(bytes(out))


# ---------------------------------------------------------------------------
# pseudorandom propositions (automatic bounties)

class _HashStream:
    """Deterministic byte stream: SHA-256 chained from a 32-byte seed."""

    def __init__(self, seed: bytes):
        self.state = sha256(seed)
        self.buf = self.state
        self.pos = 0

    def byte(self) -> int:
        if self.pos == len(self.buf):
            self.state = sha256(self.state)
            self.buf = self.state
            self.pos = 0
        b = self.buf[self.pos]
        self.pos += 1
        return b


def gen_random_prop(seed: bytes) -> K.Term:
    """Expand a 32-byte seed into a closed proposition over the HF theory.

    Connectives Imp/All over membership atoms; depth at most 5; the top two
    levels are always connectives so small seeds still spread out.
    """
    rng = _HashStream(seed)
    return _gen_prop(rng, 5, 0)


def _gen_prop(rng: _HashStream, depth: int, nvars: int) -> K.Term:
    if depth <= 1:
        return _gen_atom(rng, nvars)
    c = rng.byte() % (3 if depth >= 4 else 4)
    if c <= 1:
        return K.Imp(_gen_prop(rng, depth - 1, nvars), _gen_prop(rng, depth - 1, nvars))
    if c == 2:
        return K.All(K.SET, _gen_prop(rng, depth - 1, nvars + 1))
    return _gen_atom(rng, nvars)


def _gen_atom(rng: _HashStream, nvars: int) -> K.Term:
    a = _gen_set(rng, 2, nvars)
    b = _gen_set(rng, 2, nvars)
    return K.Ap(K.Ap(K.Prim(corpus.HF_IN), a), b)


def _gen_set(rng: _HashStream, depth: int, nvars: int) -> K.Term:
    c = rng.byte() % 3
    if c == 0 and nvars:
        return K.DB(rng.byte() % nvars)
    if c == 1 and depth > 0:
        return K.Ap(
            K.Ap(K.Prim(corpus.HF_INS), _gen_set(rng, depth - 1, nvars)),
            _gen_set(rng, depth - 1, nvars),
        )
    return K.Prim(corpus.HF_EMPTY)


def auto_bounty_target(parent_hash: bytes) -> tuple[bytes, bytes]:
    """(theory id, prop id) the next block must place its automatic bounty on."""
    pid = K.prop_id(gen_random_prop(parent_hash))
    return corpus.hf_id(), pid


# ---------------------------------------------------------------------------
# transaction effects

@dataclass(frozen=True, slots=True)
class BountyPlaced:
    theory: bytes
    prop: bytes
    amount: int
    asset_id: bytes


@dataclass(frozen=True, slots=True)
class BountyCollected:
    theory: bytes
    prop: bytes
    amount: int
    collector: bytes  # address
    method: str  # "proof" | "disproof"
    asset_id: bytes


@dataclass(frozen=True, slots=True)
class DocPubEffect:
    doc_id: bytes
    theory: bytes
    publisher: bytes  # address
    effect: D.DocEffect


@dataclass(frozen=True, slots=True)
class TxEffect:
    txid: bytes
    coinbase: bool
    fee: int
    volume: int  # currency output total; 0 for coinbase
    spent: tuple[Asset, ...]
    created: tuple[Asset, ...]
    signer: bytes | None  # address of the first input's key
    theory_pub: tuple[bytes, D.TheorySpec] | None
    doc_pub: DocPubEffect | None
    bounty_placed: tuple[BountyPlaced, ...]
    bounty_collected: tuple[BountyCollected, ...]


def _bounty_redemption_method(st: ChainState, addr: bytes, spender: bytes) -> str:
    """Bounties are collectible only by whoever owns a (dis)proof at the
    bounty's proposition address; ownership is referenced, not consumed."""
    for a in st.live_at(addr):
        if isinstance(a.payload, OwnsProp) and a.payload.holder == spender:
            return "proof"
    for a in st.live_at(addr):
        if isinstance(a.payload, OwnsNegProp) and a.payload.holder == spender:
            return "disproof"
    raise BountyNotRedeemable(
        "signer owns no proof or disproof at the bounty's proposition address"
    )


def _output_assets(tx_id: bytes, outputs: tuple[TxOutput, ...], height: int) -> tuple[Asset, ...]:
    return tuple(
        Asset(sha256(tx_id + uleb(i)), o.addr, o.payload, height)
        for i, o in enumerate(outputs)
    )


def _check_outputs(outputs: tuple[TxOutput, ...]) -> int:
    """Shape checks shared by user txs and coinbases; returns value total."""
    value_out = 0
    for o in outputs:
        kind = addr_kind(o.addr)
        pl = o.payload
        if isinstance(pl, (Currency, Bounty)):
            if pl.amount <= 0:
                raise ValueCreated("amounts must be positive")
            value_out += pl.amount
        if isinstance(pl, Bounty):
            if o.addr != prop_addr(pl.theory, pl.prop):
                raise BountyTargetMismatch(
                    "bounty address does not commit to its target proposition"
                )
        if isinstance(pl, Marker) and kind != PAY_TO_KEY:
            raise BadOutput("markers must sit at key addresses")
    return value_out


def validate_tx(st: ChainState, tx: Tx, height: int, params: ChainParams) -> TxEffect:
    """Full validity check of a non-coinbase transaction against a state.

    Read-only; apply the returned effect with apply_tx_effect.
    """
    if not tx.inputs:
        raise MissingInput("transaction has no inputs")
    tx_id = txid(tx)
    sighash = tx_sighash(tx)
    seen: set[bytes] = set()
    value_in = 0
    markers: list[tuple[TxInput, Asset]] = []
    spent_assets: list[Asset] = []
    collected: list[BountyCollected] = []
    for inp in tx.inputs:
        if inp.asset_id in seen:
            raise DoubleSpend(f"input {inp.asset_id.hex()} repeated")
        seen.add(inp.asset_id)
        a = st.asset(inp.asset_id)
        if a is None:
            if inp.asset_id in st.spent:
                raise DoubleSpend(f"asset {inp.asset_id.hex()} already spent")
            raise MissingInput(f"asset {inp.asset_id.hex()} does not exist")
        spender = derive_addr(inp.pubkey)
        pl = a.payload
        if isinstance(pl, (Currency, Marker)):
            if a.addr != spender:
                raise BadSignature("key does not control the input address")
        elif isinstance(pl, (OwnsProp, OwnsNegProp, OwnsObj)):
            if pl.holder != spender:
                raise BadSignature("key does not hold the ownership asset")
        elif isinstance(pl, Bounty):
            method = _bounty_redemption_method(st, a.addr, spender)
            collected.append(
                BountyCollected(pl.theory, pl.prop, pl.amount, spender, method, a.asset_id)
            )
        else:
            raise BadSignature("publication records are not spendable")
        if not keys.verify(inp.pubkey, inp.sig, sighash):
            raise BadSignature("signature does not verify")
        if isinstance(pl, (Currency, Bounty)):
            value_in += pl.amount
        if isinstance(pl, Marker):
            markers.append((inp, a))
        spent_assets.append(a)

    value_out = _check_outputs(tx.outputs)
    fee = value_in - value_out
    if fee < 0:
        raise ValueCreated(f"outputs exceed inputs by {-fee}")

    own_outputs = [
        o for o in tx.outputs
        if isinstance(o.payload, (OwnsProp, OwnsNegProp, OwnsObj, TheoryPub, DocPub))
    ]
    theory_pub = None
    doc_pub = None
    if isinstance(tx.attachment, D.TheorySpec):
        spec = tx.attachment
        try:
            D.check_theory(spec)
        except K.KernelError as e:
            raise DocCheckFailed(f"theory does not check: {e}") from e
        tid = D.theory_id_of(spec)
        if tid in st.theories:
            raise AlreadyPublished(f"theory {tid.hex()} already on chain")
        if [(o.addr, o.payload) for o in own_outputs] != [(theory_addr(tid), TheoryPub(tid))]:
            raise OwnershipOutputsWrong("theory publication must mint exactly its TheoryPub")
        theory_pub = (tid, spec)
    elif isinstance(tx.attachment, DocAttachment):
        att = tx.attachment
        if len(markers) != 1:
            raise MarkerMissing("document publication consumes exactly one marker")
        minp, masset = markers[0]
        if masset.born > height - params.marker_maturity:
            raise MarkerImmature(
                f"marker born at {masset.born}, needs maturity {params.marker_maturity}"
            )
        publisher_pub = minp.pubkey
        publisher = derive_addr(publisher_pub)
        doc_bytes = D.ser_doc(att.doc, att.theory)
        if masset.payload.commitment != sha256(doc_bytes + publisher_pub):
            raise CommitmentMismatch("marker does not commit to this document and key")
        entry = st.theories.get(att.theory)
        if entry is None:
            raise DocCheckFailed(f"unknown theory {att.theory.hex()}")
        try:
            eff = D.check_doc(entry.sig, att.doc)
        except D.DocCheckError as e:
            raise DocCheckFailed(str(e)) from e
        doc_id = sha256(doc_bytes)
        required: list[tuple[bytes, Payload]] = [
            (prop_addr(att.theory, doc_id), DocPub(doc_id))
        ]
        for nd in eff.new_defs:
            required.append((prop_addr(att.theory, nd.id), OwnsObj(publisher)))
        for nt in eff.new_thms:
            required.append((prop_addr(att.theory, nt.id), OwnsProp(publisher)))
        for target, _ in eff.refutations:
            required.append((prop_addr(att.theory, target), OwnsNegProp(publisher)))
        actual = [(o.addr, o.payload) for o in own_outputs]
        if sorted(actual, key=repr) != sorted(required, key=repr):
            raise OwnershipOutputsWrong(
                "document outputs must mint exactly its publication and ownership assets"
            )
        doc_pub = DocPubEffect(doc_id, att.theory, publisher, eff)
    else:
        if own_outputs:
            raise OwnershipOutputsWrong(
                "ownership or publication outputs require an attachment"
            )

    created = _output_assets(tx_id, tx.outputs, height)
    placed = tuple(
        BountyPlaced(a.payload.theory, a.payload.prop, a.payload.amount, a.asset_id)
        for a in created
        if isinstance(a.payload, Bounty)
    )
    return TxEffect(
        txid=tx_id,
        coinbase=False,
        fee=fee,
        volume=sum(o.payload.amount for o in tx.outputs if isinstance(o.payload, Currency)),
        spent=tuple(spent_assets),
        created=created,
        signer=derive_addr(tx.inputs[0].pubkey),
        theory_pub=theory_pub,
        doc_pub=doc_pub,
        bounty_placed=placed,
        bounty_collected=tuple(collected),
    )


def coinbase_input(height: int) -> TxInput:
    """Null input tagging the coinbase with its height, so the subsidy txid
    (and hence its asset ids) differ between otherwise identical blocks."""
    return TxInput(sha256(b"coinbase" + uleb(height)), b"\x00" * 32, b"\x00" * 64)


def validate_coinbase(tx: Tx, height: int, params: ChainParams) -> TxEffect:
    if tx.inputs != (coinbase_input(height),):
        raise ValueCreated("coinbase must carry exactly the height-tagged null input")
    if tx.attachment is not None:
        raise BadOutput("coinbase carries no attachment")
    for o in tx.outputs:
        if not isinstance(o.payload, (Currency, Bounty)):
            raise BadOutput("coinbase mints only currency and bounties")
    total = _check_outputs(tx.outputs)
    subsidy = params.genesis_subsidy if height == 0 else params.subsidy
    if total != subsidy:
        raise ValueCreated(f"coinbase mints {total}, subsidy is {subsidy}")
    tx_id = txid(tx)
    created = _output_assets(tx_id, tx.outputs, height)
    return TxEffect(
        txid=tx_id,
        coinbase=True,
        fee=0,
        volume=0,
        spent=(),
        created=created,
        signer=None,
        theory_pub=None,
        doc_pub=None,
        bounty_placed=tuple(
            BountyPlaced(a.payload.theory, a.payload.prop, a.payload.amount, a.asset_id)
            for a in created
            if isinstance(a.payload, Bounty)
        ),
        bounty_collected=(),
    )


def apply_tx_effect(st: ChainState, eff: TxEffect, subsidy: int = 0) -> None:
    for a in eff.spent:
        st.spend(a.asset_id)
    for a in eff.created:
        st.add_asset(a)
    if eff.theory_pub is not None:
        tid, spec = eff.theory_pub
        st.theories[tid] = TheoryEntry(spec, D.check_theory(spec))
    if eff.doc_pub is not None:
        st.theories[eff.doc_pub.theory].sig = eff.doc_pub.effect.sig_after
    st.supply += subsidy - eff.fee


# ---------------------------------------------------------------------------
# block validation and classification

class NodeClass(Enum):
    THEORY = "green"
    PROOF = "blue"
    TX = "pink"
    MISSING = "yellow"
    INVALID = "red"
    PLAIN = "gray"

    @property
    def color(self) -> str:
        return self.value


def classify_body(body: tuple[Tx, ...]) -> NodeClass:
    """Content class: theory publication beats proof document beats plain
    transactions.  The subsidy coinbase alone (including its mandatory
    automatic bounty) leaves a block Plain."""
    if any(isinstance(tx.attachment, D.TheorySpec) for tx in body):
        return NodeClass.THEORY
    if any(isinstance(tx.attachment, DocAttachment) for tx in body):
        return NodeClass.PROOF
    if len(body) > 1:
        return NodeClass.TX
    return NodeClass.PLAIN


@dataclass(frozen=True, slots=True)
class BlockEffect:
    block_hash: bytes
    height: int
    timestamp: int
    subsidy: int
    node_class: NodeClass
    tx_effects: tuple[TxEffect, ...]


def validate_block(
    parent_hash: bytes, parent_state: ChainState, block: Block, params: ChainParams
) -> tuple[ChainState, NodeClass, BlockEffect]:
    h = block.header
    if h.parent != parent_hash:
        raise BadHeader("parent hash mismatch")
    if h.height != parent_state.height + 1:
        raise BadHeader(f"height {h.height} does not extend {parent_state.height}")
    if h.body_hash != body_hash(block.body):
        raise BadHeader("body hash mismatch")
    if h.producer != params.producer_for(h.height):
        raise BadProducer(f"height {h.height} belongs to another producer")
    if not keys.verify(h.producer, h.sig, sha256(ser_header(h, for_sig=True))):
        raise BadHeaderSig("producer signature does not verify")
    if not block.body:
        raise BadHeader("empty body: coinbase required")

    st = parent_state.copy()
    st.height = h.height
    effects = []
    try:
        cb = validate_coinbase(block.body[0], h.height, params)
    except TxError as e:
        raise TxInvalid(0, e) from e
    apply_tx_effect(st, cb, subsidy=params.subsidy)
    effects.append(cb)
    for i, tx in enumerate(block.body[1:], start=1):
        if not tx.inputs:
            raise TxInvalid(i, MissingInput("only the first tx may be a coinbase"))
        try:
            eff = validate_tx(st, tx, h.height, params)
        except TxError as e:
            raise TxInvalid(i, e) from e
        apply_tx_effect(st, eff)
        effects.append(eff)

    if 1 <= h.height <= params.auto_bounty_blocks:
        tid, pid = auto_bounty_target(h.parent)
        want = Bounty(params.auto_bounty_amount, tid, pid)
        if not any(o.payload == want for tx in block.body for o in tx.outputs):
            raise AutoBountyMissing(
                f"block {h.height} must place {params.auto_bounty_amount} "
                f"on proposition {pid.hex()}"
            )

    cls = classify_body(block.body)
    eff = BlockEffect(
        block_hash=block_hash(block),
        height=h.height,
        timestamp=h.timestamp,
        subsidy=params.subsidy,
        node_class=cls,
        tx_effects=tuple(effects),
    )
    return st, cls, eff


# ---------------------------------------------------------------------------
# genesis

def coinbase_tx(params: ChainParams, height: int, parent_hash: bytes | None) -> Tx:
    """The mandated subsidy transaction for a block at the given height."""
    producer_addr = derive_addr(params.producer_for(height))
    if height == 0:
        return Tx(
            (coinbase_input(0),),
            (TxOutput(producer_addr, Currency(params.genesis_subsidy)),),
        )
    outputs = []
    amount = params.subsidy
    if 1 <= height <= params.auto_bounty_blocks:
        tid, pid = auto_bounty_target(parent_hash)
        outputs.append(TxOutput(prop_addr(tid, pid), Bounty(params.auto_bounty_amount, tid, pid)))
        amount -= params.auto_bounty_amount
    outputs.insert(0, TxOutput(producer_addr, Currency(amount)))
    return Tx((coinbase_input(height),), tuple(outputs))


def make_block(
    params: ChainParams,
    parent_hash: bytes,
    height: int,
    timestamp: int,
    txs: tuple[Tx, ...],
    producer_key: keys.SigningKey | None = None,
) -> Block:
    body = (coinbase_tx(params, height, parent_hash),) + tuple(txs)
    key = producer_key or params.producer_key(height)
    header = BlockHeader(
        parent=parent_hash,
        height=height,
        timestamp=timestamp,
        producer=key.pubkey,
        sig=b"\x00" * 64,
        body_hash=body_hash(body),
    )
    sig = key.sign(sha256(ser_header(header, for_sig=True)))
    return Block(replace(header, sig=sig), body)


def genesis_block(params: ChainParams) -> Block:
    return make_block(params, b"\x00" * 32, 0, params.timestamp, ())


def genesis_state(params: ChainParams) -> ChainState:
    st = ChainState()
    st.theories[corpus.hf_id()] = TheoryEntry(corpus.hf_spec(), corpus.hf_sig())
    cb = validate_coinbase(genesis_block(params).body[0], 0, params)
    apply_tx_effect(st, cb, subsidy=params.genesis_subsidy)
    return st


def genesis_effect(params: ChainParams) -> BlockEffect:
    b = genesis_block(params)
    cb = validate_coinbase(b.body[0], 0, params)
    return BlockEffect(
        block_hash=block_hash(b),
        height=0,
        timestamp=params.timestamp,
        subsidy=params.genesis_subsidy,
        node_class=NodeClass.PLAIN,
        tx_effects=(cb,),
    )
