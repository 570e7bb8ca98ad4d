"""Deterministic multi-node simulation and scripted scenario engine.

Nodes run in one process against a virtual clock.  Messages (inv/getdata/
block/tx) travel over per-link FIFO queues with seeded jitter; scenarios are
JSON files whose steps produce blocks (optionally corrupted), submit
transactions, partition nodes and wait.  The same scenario and seed always
yield the same per-node tips, snapshots and graphs.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field, replace

from . import corpus, docform as D, kernel as K, keys, ledger as L
from .node import Node
from .serial import sha256

BASE_DELAY = 1.0
STEP_SPACING = 10.0


class ScenarioError(Exception):
    pass


# ---------------------------------------------------------------------------
# virtual network

@dataclass(order=True)
class _Event:
    time: float
    seq: int
    dst: int = field(compare=False)
    src: int = field(compare=False)
    payload: tuple = field(compare=False)


class SimNet:
    """Message scheduler: per-link FIFO, seeded delay jitter, partitions."""

    def __init__(self, n_nodes: int, params: L.ChainParams, seed: int):
        self.rng = random.Random(seed)
        self.nodes = [SimNode(i, self, params) for i in range(n_nodes)]
        self.queue: list[_Event] = []
        self.now = 0.0
        self.seq = 0
        self.link_clock: dict[tuple[int, int], float] = {}
        self.partitions: list[tuple[set[int], float, float]] = []  # (set, start, end)

    def partitioned(self, a: int, b: int, t: float) -> bool:
        for group, start, end in self.partitions:
            if start <= t < end and (a in group) != (b in group):
                return True
        return False

    def send(self, src: int, dst: int, payload: tuple) -> None:
        if src == dst:
            return
        if self.partitioned(src, dst, self.now):
            return
        delay = BASE_DELAY + self.rng.random()
        at = max(self.now + delay, self.link_clock.get((src, dst), 0.0))
        self.link_clock[(src, dst)] = at + 1e-6  # FIFO per link
        self.seq += 1
        heapq.heappush(self.queue, _Event(at, self.seq, dst, src, payload))

    def broadcast(self, src: int, payload: tuple) -> None:
        for n in self.nodes:
            if n.i != src:
                self.send(src, n.i, payload)

    def drain(self) -> None:
        while self.queue:
            ev = heapq.heappop(self.queue)
            self.now = max(self.now, ev.time)
            self.nodes[ev.dst].on_message(ev.src, ev.payload)

    def deliver_to(self, dst: int) -> None:
        """Deliver every queued message addressed to dst right now."""
        pending = sorted(e for e in self.queue if e.dst == dst)
        self.queue = [e for e in self.queue if e.dst != dst]
        heapq.heapify(self.queue)
        for ev in pending:
            self.nodes[dst].on_message(ev.src, ev.payload)

    def settle(self) -> None:
        """Drain, then run anti-entropy rounds until nothing changes.

        Heals nodes that missed announcements during expired partitions;
        nodes still inside a partition window stay isolated.
        """
        self.drain()
        while True:
            sizes = [len(n.node.tree.blocks) for n in self.nodes]
            for n in self.nodes:
                self.broadcast(n.i, ("inv", [n.node.tree.tip]))
            self.drain()
            if [len(n.node.tree.blocks) for n in self.nodes] == sizes:
                return


class SimNode:
    def __init__(self, i: int, net: SimNet, params: L.ChainParams):
        self.i = i
        self.net = net
        self.node = Node(params)
        self.requested: set[bytes] = set()

    def on_message(self, src: int, payload: tuple) -> None:
        kind = payload[0]
        if kind == "inv":
            for h in payload[1]:
                if self.node.tree.meta(h) is None and h not in self.requested:
                    self.requested.add(h)
                    self.net.send(self.i, src, ("getdata", h))
        elif kind == "getdata":
            meta = self.node.tree.meta(payload[1])
            if meta is not None:
                self.net.send(self.i, src, ("block", meta.block))
        elif kind == "block":
            self.accept_block(payload[1], from_peer=src)
        elif kind == "tx":
            tx = payload[1]
            tid = L.txid(tx)
            if tid not in self.node.mempool:
                try:
                    self.node.submit_tx(tx)
                except L.TxError:
                    return
                self.net.broadcast(self.i, ("tx", tx))

    def accept_block(self, block: L.Block, from_peer: int | None = None) -> str:
        h = L.block_hash(block)
        known = self.node.tree.meta(h) is not None
        status = self.node.receive_block(block)
        self.requested.discard(h)
        if known:
            return status
        if status == "detached" and from_peer is not None:
            parent = block.header.parent
            if self.node.tree.meta(parent) is None and parent not in self.requested:
                self.requested.add(parent)
                self.net.send(self.i, from_peer, ("getdata", parent))
        self.net.broadcast(self.i, ("inv", [h]))
        return status


# ---------------------------------------------------------------------------
# transaction builder (wallet view over a working state)

class TxBuilder:
    def __init__(self, params: L.ChainParams, state: L.ChainState, height: int):
        self.params = params
        self.state = state  # mutated as txs apply, so later txs can chain
        self.height = height

    def _spendable(self, seed: int, amount: int) -> tuple[list[L.Asset], int]:
        key = keys.key_from_seed(seed)
        addr = L.derive_addr(key.pubkey)
        picked, total = [], 0
        for a in self.state.live_at(addr):
            if isinstance(a.payload, L.Currency):
                picked.append(a)
                total += a.payload.amount
                if total >= amount:
                    return picked, total
        raise ScenarioError(f"seed {seed} cannot fund {amount} (has {total})")

    def _finish(self, tx: L.Tx, signers: list[keys.SigningKey]) -> L.Tx:
        tx = L.sign_tx(tx, signers)
        eff = L.validate_tx(self.state, tx, self.height, self.params)
        L.apply_tx_effect(self.state, eff)
        return tx

    def build(self, spec: dict) -> L.Tx:
        kind = spec["kind"]
        fee = spec.get("fee", 1)
        key = keys.key_from_seed(spec.get("key_seed", spec.get("from_seed", 0)))
        addr = L.derive_addr(key.pubkey)
        if kind == "transfer":
            to = L.derive_addr(keys.key_from_seed(spec["to_seed"]).pubkey)
            amount = spec["amount"]
            picked, total = self._spendable(spec["from_seed"], amount + fee)
            outs = [L.TxOutput(to, L.Currency(amount))]
            if total - amount - fee > 0:
                outs.append(L.TxOutput(addr, L.Currency(total - amount - fee)))
            tx = L.Tx(
                tuple(L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64) for a in picked),
                tuple(outs),
            )
            return self._finish(tx, [key] * len(picked))
        if kind == "marker":
            doc_name = spec["doc"]
            doc = render_doc(doc_name, bool(spec.get("corrupt")))
            tid = corpus.resolve_theory_id(doc.theory_ref)
            commitment = sha256(D.ser_doc(doc, tid) + key.pubkey)
            picked, total = self._spendable(spec["key_seed"], fee)
            outs = [L.TxOutput(addr, L.Marker(commitment))]
            if total - fee > 0:
                outs.append(L.TxOutput(addr, L.Currency(total - fee)))
            tx = L.Tx(
                tuple(L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64) for a in picked),
                tuple(outs),
            )
            return self._finish(tx, [key] * len(picked))
        if kind == "publish_theory":
            spec_obj = corpus.theory_aliases()[spec["name"]]
            tid = D.theory_id_of(spec_obj)
            picked, total = self._spendable(spec["key_seed"], fee)
            outs = [L.TxOutput(L.theory_addr(tid), L.TheoryPub(tid))]
            if total - fee > 0:
                outs.append(L.TxOutput(addr, L.Currency(total - fee)))
            tx = L.Tx(
                tuple(L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64) for a in picked),
                tuple(outs),
                attachment=spec_obj,
            )
            return self._finish(tx, [key] * len(picked))
        if kind == "publish_doc":
            corrupt = bool(spec.get("corrupt"))
            doc = render_doc(spec["doc"], corrupt)
            tid = corpus.resolve_theory_id(doc.theory_ref)
            doc_bytes = D.ser_doc(doc, tid)
            commitment = sha256(doc_bytes + key.pubkey)
            marker = next(
                (
                    a for a in self.state.live_at(addr)
                    if isinstance(a.payload, L.Marker)
                    and a.payload.commitment == commitment
                ),
                None,
            )
            if marker is None:
                raise ScenarioError(f"no marker for document {spec['doc']}")
            picked, total = self._spendable(spec["key_seed"], fee)
            doc_id = sha256(doc_bytes)
            outs = [L.TxOutput(L.prop_addr(tid, doc_id), L.DocPub(doc_id))]
            entry = self.state.theories.get(tid)
            if entry is None:
                raise ScenarioError(f"theory for {spec['doc']} not on chain")
            # a corrupted doc cannot be checked; mint the outputs its clean
            # form would owe so only the proof failure trips validation
            eff = D.check_doc(entry.sig, render_doc(spec["doc"], False))
            for nd in eff.new_defs:
                outs.append(L.TxOutput(L.prop_addr(tid, nd.id), L.OwnsObj(addr)))
            for nt in eff.new_thms:
                outs.append(L.TxOutput(L.prop_addr(tid, nt.id), L.OwnsProp(addr)))
            for target, _ in eff.refutations:
                outs.append(L.TxOutput(L.prop_addr(tid, target), L.OwnsNegProp(addr)))
            if total - fee > 0:
                outs.append(L.TxOutput(addr, L.Currency(total - fee)))
            inputs = [L.TxInput(marker.asset_id, key.pubkey, b"\x00" * 64)]
            inputs += [L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64) for a in picked]
            tx = L.Tx(tuple(inputs), tuple(outs), attachment=L.DocAttachment(tid, doc))
            if corrupt:
                return L.sign_tx(tx, [key] * len(inputs))
            return self._finish(tx, [key] * len(inputs))
        if kind == "bounty":
            tid, pid = resolve_prop(spec)
            amount = spec["amount"]
            picked, total = self._spendable(spec["key_seed"], amount + fee)
            outs = [L.TxOutput(L.prop_addr(tid, pid), L.Bounty(amount, tid, pid))]
            if total - amount - fee > 0:
                outs.append(L.TxOutput(addr, L.Currency(total - amount - fee)))
            tx = L.Tx(
                tuple(L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64) for a in picked),
                tuple(outs),
            )
            return self._finish(tx, [key] * len(picked))
        if kind == "collect":
            tid, pid = resolve_prop(spec)
            target = L.prop_addr(tid, pid)
            bounties = [
                a for a in self.state.live_at(target) if isinstance(a.payload, L.Bounty)
            ]
            if not bounties:
                raise ScenarioError("no open bounty to collect")
            amount = sum(a.payload.amount for a in bounties)
            outs = [L.TxOutput(addr, L.Currency(amount - fee))]
            tx = L.Tx(
                tuple(L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64) for a in bounties),
                tuple(outs),
            )
            return self._finish(tx, [key] * len(bounties))
        raise ScenarioError(f"unknown tx kind {kind!r}")


def resolve_prop(spec: dict) -> tuple[bytes, bytes]:
    """Proposition reference: "doc_name:item_name" into the corpus, or
    {"theory": ..., "prop": hex}."""
    ref = spec["prop"]
    if ":" in ref:
        doc_name, item = ref.split(":", 1)
        for name, doc in corpus.corpus_docs():
            if name in (doc_name, doc_name + ".pfgd"):
                return corpus.resolve_theory_id(doc.theory_ref), corpus.corpus_prop_id(doc_name, item)
        raise ScenarioError(f"unknown corpus document {doc_name}")
    return corpus.resolve_theory_id(spec["theory"]), bytes.fromhex(ref)


def render_doc(name: str, corrupt: bool = False) -> D.Document:
    """Corpus document by name; optionally with one proof node broken."""
    for doc_name, doc in corpus.corpus_docs():
        if doc_name in (name, name + ".pfgd"):
            if not corrupt:
                return doc
            items = []
            broken = False
            for item in doc.items:
                if not broken and isinstance(item, D.ThmItem):
                    # an out-of-range hypothesis always fails the checker
                    items.append(replace(item, proof=K.Hyp(0)))
                    broken = True
                else:
                    items.append(item)
            if not broken:
                raise ScenarioError(f"document {name} has no proof to corrupt")
            return D.Document(doc.theory_ref, tuple(items))
    raise ScenarioError(f"unknown corpus document {name}")


# ---------------------------------------------------------------------------
# scenarios

@dataclass
class Scenario:
    seed: int
    nodes: int
    params: L.ChainParams
    steps: list[dict]

    @staticmethod
    def from_dict(raw: dict) -> "Scenario":
        params = L.ChainParams.from_json(json.dumps(raw.get("genesis", {})))
        return Scenario(
            seed=raw.get("seed", 0),
            nodes=raw.get("nodes", 1),
            params=params,
            steps=list(raw.get("steps", [])),
        )

    @staticmethod
    def load(path: str) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return Scenario.from_dict(json.load(fh))


def run_scenario(sc: Scenario, n_nodes: int | None = None) -> dict:
    """Execute all steps; returns per-node tips, digests, graphs and the
    name->hash map of produced blocks."""
    return run_scenario_net(sc, n_nodes)[0]


def run_scenario_net(sc: Scenario, n_nodes: int | None = None) -> tuple[dict, SimNet]:
    """run_scenario, also handing back the simulated network for inspection."""
    n = n_nodes or sc.nodes
    net = SimNet(n, sc.params, sc.seed)
    rng = random.Random(sc.seed ^ 0x5CE11A71)
    named: dict[str, bytes] = {"genesis": net.nodes[0].node.tree.genesis_hash}
    blocks: dict[str, L.Block] = {}

    for step in sc.steps:
        op = step.get("op", "produce")
        net.now += step.get("dt", STEP_SPACING) if op == "wait" else 0.0
        if op == "wait":
            net.drain()
            continue
        if op == "partition":
            start = net.now
            net.partitions.append(
                (set(step["nodes"]), start, start + step["duration"])
            )
            continue
        if op == "deliver":
            net.deliver_to(step["node"])
            continue
        if op == "submit_tx":
            node = net.nodes[step["node"]]
            state = node.node.tip_state()
            builder = TxBuilder(sc.params, state.copy(), state.height + 1)
            tx = builder.build(step["tx"])
            node.node.submit_tx(tx)
            net.broadcast(node.i, ("tx", tx))
            net.drain()
            continue
        if op != "produce":
            raise ScenarioError(f"unknown step op {op!r}")

        net.now += STEP_SPACING
        node = net.nodes[step.get("node", 0)]
        parent_ref = step.get("parent", "tip")
        flags = step.get("flags", {})
        if parent_ref == "tip":
            parent = node.node.tree.tip
        elif parent_ref == "unknown" or flags.get("orphan_parent"):
            parent = bytes(rng.randrange(256) for _ in range(32))
        elif parent_ref in named:
            parent = named[parent_ref]
        else:
            raise ScenarioError(f"parent ref {parent_ref!r} does not resolve")

        meta = node.node.tree.meta(parent)
        if meta is not None and meta.state is not None:
            height = meta.block.header.height + 1
            state = meta.state.copy()
        else:
            height = step.get("height", 1)
            state = L.genesis_state(sc.params)
        state.height = height

        # thread the coinbase through the builder state so user txs can
        # spend freshly minted coins within the same block
        cb = L.coinbase_tx(sc.params, height, parent)
        cb_eff = L.validate_coinbase(cb, height, sc.params)
        L.apply_tx_effect(state, cb_eff, subsidy=sc.params.subsidy)
        builder = TxBuilder(sc.params, state, height)
        txs = []
        for tx_spec in step.get("txs", []):
            if flags.get("corrupt_proof") and tx_spec.get("kind") == "publish_doc":
                tx_spec = dict(tx_spec, corrupt=True)
            txs.append(builder.build(tx_spec))
        if flags.get("double_spend") and txs:
            victim = txs[0]
            doubled = L.Tx(victim.inputs + (victim.inputs[0],), victim.outputs, victim.attachment)
            key = keys.key_from_seed(step["txs"][0].get("key_seed", step["txs"][0].get("from_seed", 0)))
            txs[0] = L.sign_tx(doubled, [key] * len(doubled.inputs))

        timestamp = int(sc.params.timestamp + net.now)
        block = L.make_block(sc.params, parent, height, timestamp, tuple(txs))
        if flags.get("bad_sig"):
            h = block.header
            bad = h.sig[:-1] + bytes([h.sig[-1] ^ 0x01])
            block = L.Block(replace(h, sig=bad), block.body)
        name = step.get("name")
        if name:
            named[name] = L.block_hash(block)
            blocks[name] = block
        node.accept_block(block)
        net.drain()

    net.settle()
    results = {"blocks": {k: v.hex() for k, v in named.items()}, "nodes": []}
    for sim in net.nodes:
        tree = sim.node.tree
        graph = tree.classify_graph()
        counts: dict[str, int] = {}
        for e in graph:
            counts[e["color"]] = counts.get(e["color"], 0) + 1
        results["nodes"].append(
            {
                "tip": tree.tip.hex(),
                "height": tree.tip_height(),
                "digest": sim.node.snapshot.digest().hex(),
                "graph": graph,
                "dot": tree.graph_dot(),
                "color_counts": counts,
            }
        )
    return results, net


def random_scenario(seed: int) -> Scenario:
    """Small seeded scenario: forks, transfers, bounties, optional faults.

    Used by determinism, convergence and index-oracle checks.
    """
    rng = random.Random(seed)
    n_nodes = rng.randint(2, 3)
    params = L.ChainParams(
        producer_seeds=(0, 1),
        auto_bounty_blocks=rng.choice([0, 2]),
        marker_maturity=1,
        genesis_subsidy=5_000,
    )
    steps: list[dict] = []
    names: list[str] = ["genesis"]
    heights = {"genesis": 0}
    for i in range(rng.randint(5, 10)):
        name = f"b{i}"
        parent = "tip" if rng.random() < 0.7 else rng.choice(names)
        txs = []
        roll = rng.random()
        if roll < 0.3:
            txs.append(
                {"kind": "transfer", "from_seed": 0, "to_seed": rng.randint(1, 3),
                 "amount": rng.randint(1, 30), "fee": 1}
            )
        elif roll < 0.4:
            txs.append(
                {"kind": "bounty", "prop": "bounty_targets:universal_empty",
                 "theory": "mini_hotg", "amount": rng.randint(5, 50),
                 "key_seed": 0, "fee": 1}
            )
        flags = {}
        if rng.random() < 0.12:
            flags["orphan_parent"] = True
        elif rng.random() < 0.1:
            flags["bad_sig"] = True
        steps.append(
            {"op": "produce", "name": name, "node": rng.randrange(n_nodes),
             "parent": parent, "txs": txs, "flags": flags}
        )
        if not flags:
            names.append(name)
    return Scenario(seed=seed, nodes=n_nodes, params=params, steps=steps)
