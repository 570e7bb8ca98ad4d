"""Explorer cache: derived indices over the chain, kept consistent under
connect/disconnect and equal to a full rebuild at the same tip.

The snapshot is one value with named sub-maps.  Incremental updates apply a
block's effects; disconnect exactly inverts a connect.  Derived views that
would need retroactive fixups if stored (bounty categorization, authorship)
are computed on demand from the stored maps instead.
"""

from __future__ import annotations

import copy
import json
import threading
from dataclasses import dataclass, field

from . import corpus, docform as D, ledger as L
from .chaintree import ChainEvent, ChainTree
from .serial import sha256


class InconsistentEvent(Exception):
    """An effect referenced an entity the snapshot does not know: ledger bug."""


@dataclass(frozen=True, slots=True)
class EntityInfo:
    kind: str  # "def" | "thm" | "conj" | "theory"
    name: str
    theory: bytes
    text: str  # printed type (defs) or statement (thms/conjs); "" for theories
    owner: bytes | None
    txid: bytes
    block: bytes
    height: int
    tag: str = ""
    deps: tuple[bytes, ...] = ()


@dataclass(frozen=True, slots=True)
class OpenBounty:
    theory: bytes
    prop: bytes
    amount: int
    born: int


@dataclass(frozen=True, slots=True)
class CollectedBounty:
    theory: bytes
    prop: bytes
    amount: int
    height: int
    collector: bytes
    method: str  # "proof" | "disproof"
    asset_id: bytes
    block: bytes


@dataclass
class IndexSnapshot:
    tip: bytes = b"\x00" * 32
    height: int = -1
    tx_count: int = 0
    tx_volume: int = 0
    supply: int = 0
    defs: dict[bytes, EntityInfo] = field(default_factory=dict)
    thms: dict[bytes, EntityInfo] = field(default_factory=dict)
    conjs: dict[bytes, EntityInfo] = field(default_factory=dict)
    theories: dict[bytes, EntityInfo] = field(default_factory=dict)
    theory_specs: dict[bytes, D.TheorySpec] = field(default_factory=dict)
    # open bounties keyed by the bounty asset id
    bounty_open: dict[bytes, OpenBounty] = field(default_factory=dict)
    bounty_collected: list[CollectedBounty] = field(default_factory=list)
    # per-proposition event history, append-only under connect
    bounty_history: dict[bytes, list[dict]] = field(default_factory=dict)
    # proposition id -> refuting theorem ids with the block that brought them
    refuted: dict[bytes, list[tuple[bytes, bytes]]] = field(default_factory=dict)
    # address -> number of live assets (address_count = len)
    addr_live: dict[bytes, int] = field(default_factory=dict)

    # -- derived views

    @property
    def address_count(self) -> int:
        return len(self.addr_live)

    def entity(self, eid: bytes) -> EntityInfo | None:
        for table in (self.thms, self.defs, self.conjs, self.theories):
            if eid in table:
                return table[eid]
        return None

    def deps(self) -> dict[bytes, tuple[bytes, ...]]:
        out = {}
        for table in (self.defs, self.thms, self.conjs):
            for eid, info in table.items():
                known = tuple(d for d in info.deps if self.entity(d) is not None)
                out[eid] = known
        return out

    def authorship(self) -> dict[bytes, list[bytes]]:
        out: dict[bytes, list[bytes]] = {}
        for table in (self.defs, self.thms, self.conjs, self.theories):
            for eid, info in table.items():
                if info.owner is not None:
                    out.setdefault(info.owner, []).append(eid)
        for ids in out.values():
            ids.sort()
        return out

    def prop_status(self, prop: bytes) -> str:
        if prop in self.thms:
            return "proven"
        if self.refuted.get(prop):
            return "disproven"
        return "conjecture"

    def stats(self) -> dict:
        return {
            "height": self.height,
            "address_count": self.address_count,
            "tx_count": self.tx_count,
            "tx_volume": self.tx_volume,
            "coin_circulation": self.supply,
        }

    def to_canonical(self) -> dict:
        def ent(table):
            return {
                k.hex(): {
                    "kind": e.kind, "name": e.name, "theory": e.theory.hex(),
                    "text": e.text, "owner": e.owner.hex() if e.owner else None,
                    "txid": e.txid.hex(), "block": e.block.hex(),
                    "height": e.height, "tag": e.tag,
                    "deps": [d.hex() for d in e.deps],
                }
                for k, e in sorted(table.items())
            }

        return {
            "tip": self.tip.hex(),
            "height": self.height,
            "tx_count": self.tx_count,
            "tx_volume": self.tx_volume,
            "coin_circulation": self.supply,
            "address_count": self.address_count,
            "defs": ent(self.defs),
            "thms": ent(self.thms),
            "conjs": ent(self.conjs),
            "theories": ent(self.theories),
            "bounty_open": {
                k.hex(): [b.theory.hex(), b.prop.hex(), b.amount, b.born]
                for k, b in sorted(self.bounty_open.items())
            },
            "bounty_collected": [
                [c.theory.hex(), c.prop.hex(), c.amount, c.height,
                 c.collector.hex(), c.method, c.asset_id.hex(), c.block.hex()]
                for c in self.bounty_collected
            ],
            "bounty_history": {
                k.hex(): v for k, v in sorted(self.bounty_history.items())
            },
            "refuted": {
                k.hex(): [[t.hex(), b.hex()] for t, b in v]
                for k, v in sorted(self.refuted.items())
            },
            "addr_live": {k.hex(): v for k, v in sorted(self.addr_live.items())},
        }

    def digest(self) -> bytes:
        blob = json.dumps(self.to_canonical(), sort_keys=True, separators=(",", ":"))
        return sha256(blob.encode())


def empty_snapshot() -> IndexSnapshot:
    snap = IndexSnapshot()
    snap.theory_specs[corpus.hf_id()] = corpus.hf_spec()
    return snap


# ---------------------------------------------------------------------------
# connect / disconnect

def apply_connect(snap: IndexSnapshot, block: L.Block, beff: L.BlockEffect) -> IndexSnapshot:
    s = copy.deepcopy(snap)
    bh = beff.block_hash
    s.tip = bh
    s.height = beff.height
    s.tx_count += len(block.body)
    s.supply += beff.subsidy
    for tx, eff in zip(block.body, beff.tx_effects):
        s.supply -= eff.fee
        s.tx_volume += eff.volume
        for a in eff.spent:
            n = s.addr_live.get(a.addr, 0) - 1
            if n < 0:
                raise InconsistentEvent(f"negative live count at {a.addr.hex()}")
            if n:
                s.addr_live[a.addr] = n
            else:
                s.addr_live.pop(a.addr, None)
        for a in eff.created:
            s.addr_live[a.addr] = s.addr_live.get(a.addr, 0) + 1
        for placed in eff.bounty_placed:
            s.bounty_open[placed.asset_id] = OpenBounty(
                placed.theory, placed.prop, placed.amount, beff.height
            )
            s.bounty_history.setdefault(placed.prop, []).append(
                {
                    "event": "placed", "amount": placed.amount,
                    "height": beff.height, "txid": eff.txid.hex(),
                    "block": bh.hex(),
                }
            )
        for got in eff.bounty_collected:
            if got.asset_id not in s.bounty_open:
                raise InconsistentEvent("collected a bounty the index never saw")
            del s.bounty_open[got.asset_id]
            s.bounty_collected.append(
                CollectedBounty(
                    got.theory, got.prop, got.amount, beff.height,
                    got.collector, got.method, got.asset_id, bh,
                )
            )
            s.bounty_history.setdefault(got.prop, []).append(
                {
                    "event": "collected", "amount": got.amount,
                    "height": beff.height, "txid": eff.txid.hex(),
                    "block": bh.hex(), "method": got.method,
                    "collector": got.collector.hex(),
                }
            )
        if eff.theory_pub is not None:
            tid, spec = eff.theory_pub
            s.theory_specs.setdefault(tid, spec)
            s.theories.setdefault(
                tid,
                EntityInfo(
                    kind="theory", name="", theory=tid, text="",
                    owner=eff.signer, txid=eff.txid, block=bh, height=beff.height,
                ),
            )
        if eff.doc_pub is not None:
            _connect_doc(s, tx, eff, beff, bh)
    return s


def _connect_doc(
    s: IndexSnapshot, tx: L.Tx, eff: L.TxEffect, beff: L.BlockEffect, bh: bytes
) -> None:
    dp = eff.doc_pub
    spec = s.theory_specs.get(dp.theory)
    doc = tx.attachment.doc
    base = dict(
        theory=dp.theory, owner=dp.publisher, txid=eff.txid,
        block=bh, height=beff.height,
    )
    for nd in dp.effect.new_defs:
        s.defs.setdefault(
            nd.id,
            EntityInfo(
                kind="def", name=nd.name,
                text=D.print_ty(nd.ty), deps=nd.deps, **base,
            ),
        )
    for nt in dp.effect.new_thms:
        s.thms.setdefault(
            nt.id,
            EntityInfo(
                kind="thm", name=nt.name,
                text=D.print_term(nt.stmt, spec, doc), deps=nt.deps, **base,
            ),
        )
    for nc in dp.effect.new_conjs:
        s.conjs.setdefault(
            nc.id,
            EntityInfo(
                kind="conj", name=nc.name,
                text=D.print_term(nc.stmt, spec, doc), tag=nc.tag,
                deps=nc.deps, **base,
            ),
        )
    for target, thm_id in dp.effect.refutations:
        s.refuted.setdefault(target, []).append((thm_id, bh))


def apply_disconnect(snap: IndexSnapshot, block: L.Block, beff: L.BlockEffect) -> IndexSnapshot:
    s = copy.deepcopy(snap)
    bh = beff.block_hash
    if s.tip != bh:
        raise InconsistentEvent("disconnect of a block that is not the tip")
    s.tip = block.header.parent
    s.height = beff.height - 1
    s.tx_count -= len(block.body)
    s.supply -= beff.subsidy
    # invert in reverse tx order so intra-block chains unwind cleanly
    for tx, eff in reversed(list(zip(block.body, beff.tx_effects))):
        s.supply += eff.fee
        s.tx_volume -= eff.volume
        for a in eff.created:
            n = s.addr_live.get(a.addr, 0) - 1
            if n:
                s.addr_live[a.addr] = n
            else:
                s.addr_live.pop(a.addr, None)
        for a in eff.spent:
            s.addr_live[a.addr] = s.addr_live.get(a.addr, 0) + 1
        for placed in eff.bounty_placed:
            s.bounty_open.pop(placed.asset_id, None)
            _pop_history(s, placed.prop, bh)
        for got in eff.bounty_collected:
            # restore the open bounty from the spent asset record
            for a in eff.spent:
                if a.asset_id == got.asset_id:
                    s.bounty_open[a.asset_id] = OpenBounty(
                        got.theory, got.prop, got.amount, a.born
                    )
            s.bounty_collected = [
                c for c in s.bounty_collected
                if not (c.asset_id == got.asset_id and c.block == bh)
            ]
            _pop_history(s, got.prop, bh)
        if eff.theory_pub is not None:
            tid, _ = eff.theory_pub
            if tid in s.theories and s.theories[tid].block == bh:
                del s.theories[tid]
                del s.theory_specs[tid]
        if eff.doc_pub is not None:
            dp = eff.doc_pub
            for nd in dp.effect.new_defs:
                if nd.id in s.defs and s.defs[nd.id].block == bh:
                    del s.defs[nd.id]
            for nt in dp.effect.new_thms:
                if nt.id in s.thms and s.thms[nt.id].block == bh:
                    del s.thms[nt.id]
            for nc in dp.effect.new_conjs:
                if nc.id in s.conjs and s.conjs[nc.id].block == bh:
                    del s.conjs[nc.id]
            for target, thm_id in dp.effect.refutations:
                lst = [
                    (t, b) for t, b in s.refuted.get(target, [])
                    if not (t == thm_id and b == bh)
                ]
                if lst:
                    s.refuted[target] = lst
                else:
                    s.refuted.pop(target, None)
    return s


def _pop_history(s: IndexSnapshot, prop: bytes, bh: bytes) -> None:
    events = [e for e in s.bounty_history.get(prop, []) if e["block"] != bh.hex()]
    if events:
        s.bounty_history[prop] = events
    else:
        s.bounty_history.pop(prop, None)


# ---------------------------------------------------------------------------
# rebuild oracle and views

def rebuild(tree: ChainTree, tip: bytes | None = None) -> IndexSnapshot:
    """Full scan from genesis along the (given or best) tip's chain."""
    snap = empty_snapshot()
    for h in tree.chain_to(tip or tree.tip):
        meta = tree.blocks[h]
        snap = apply_connect(snap, meta.block, meta.effect)
    return snap


def bounty_views(snap: IndexSnapshot) -> dict:
    totals: dict[bytes, int] = {}
    born: dict[bytes, int] = {}
    for b in snap.bounty_open.values():
        totals[b.prop] = totals.get(b.prop, 0) + b.amount
        born[b.prop] = min(born.get(b.prop, b.born), b.born)
    open_list = [
        {"prop": p.hex(), "amount": amt, "born": born[p],
         "status": snap.prop_status(p)}
        for p, amt in sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    ]
    collected = [
        {"prop": c.prop.hex(), "amount": c.amount, "height": c.height,
         "collector": c.collector.hex(), "method": c.method}
        for c in sorted(
            snap.bounty_collected,
            key=lambda c: (-c.amount, c.prop, c.height, c.asset_id),
        )
    ]

    def tag_of(prop: bytes) -> str:
        info = snap.conjs.get(prop)
        return info.tag if info is not None and info.tag else "Other"

    categories: dict[str, dict[str, int]] = {}
    for p, amt in totals.items():
        cat = categories.setdefault(tag_of(p), {"open": 0, "collected": 0})
        cat["open"] += amt
    for c in snap.bounty_collected:
        cat = categories.setdefault(tag_of(c.prop), {"open": 0, "collected": 0})
        cat["collected"] += c.amount
    return {
        "highest_open": open_list,
        "highest_collected": collected,
        "categories": dict(sorted(categories.items())),
    }


# ---------------------------------------------------------------------------
# service wrapper

@dataclass(frozen=True)
class RefreshPolicy:
    """Event-driven incremental updates, plus an optional full-rebuild timer
    that atomically replaces the snapshot (off by default)."""

    rebuild_interval: float | None = None


class Indexer:
    """Single writer (chain events), many readers of immutable snapshots."""

    def __init__(self, tree: ChainTree, policy: RefreshPolicy = RefreshPolicy()):
        self.tree = tree
        self.policy = policy
        self._snapshot = rebuild(tree)
        self._lock = threading.Lock()
        self._timer: threading.Timer | None = None
        if policy.rebuild_interval:
            self._schedule_rebuild()

    @property
    def snapshot(self) -> IndexSnapshot:
        return self._snapshot  # atomic reference swap; readers never block

    def on_events(self, events: list[ChainEvent]) -> None:
        with self._lock:
            snap = self._snapshot
            for e in events:
                if e.kind == "connect":
                    snap = apply_connect(snap, e.block, e.effect)
                else:
                    snap = apply_disconnect(snap, e.block, e.effect)
            self._snapshot = snap

    def force_rebuild(self) -> None:
        with self._lock:
            self._snapshot = rebuild(self.tree)

    def _schedule_rebuild(self) -> None:
        def tick():
            self.force_rebuild()
            self._schedule_rebuild()

        self._timer = threading.Timer(self.policy.rebuild_interval, tick)
        self._timer.daemon = True
        self._timer.start()

    def close(self) -> None:
        if self._timer is not None:
            self._timer.cancel()
