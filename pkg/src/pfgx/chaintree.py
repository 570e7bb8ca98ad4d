"""Block tree: connect/disconnect bookkeeping, tip selection, reorgs,
missing-parent placeholders and the colored chain graph."""

from __future__ import annotations

from dataclasses import dataclass

from . import ledger as L

ORPHAN_POOL_CAP = 64


@dataclass
class BlockMeta:
    block: L.Block
    hash: bytes
    status: str  # "valid" | "invalid" | "detached"
    reason: str = ""
    state: L.ChainState | None = None
    effect: L.BlockEffect | None = None
    node_class: L.NodeClass = L.NodeClass.PLAIN


@dataclass(frozen=True, slots=True)
class ChainEvent:
    kind: str  # "connect" | "disconnect"
    block: L.Block
    effect: L.BlockEffect


class ChainTree:
    """All blocks ever seen, valid or not, plus the current best tip.

    Invalid blocks are retained and colored red; blocks whose parent is
    unknown (or whose ancestry contains an invalid or detached block) are
    "detached" and classified by content only.  The best tip is the highest
    fully valid block, ties broken by lexicographically smaller hash.
    """

    def __init__(self, params: L.ChainParams):
        self.params = params
        self.genesis = L.genesis_block(params)
        self.genesis_hash = L.block_hash(self.genesis)
        gmeta = BlockMeta(
            block=self.genesis,
            hash=self.genesis_hash,
            status="valid",
            state=L.genesis_state(params),
            effect=L.genesis_effect(params),
            node_class=L.NodeClass.PLAIN,
        )
        self.blocks: dict[bytes, BlockMeta] = {self.genesis_hash: gmeta}
        self.children: dict[bytes, list[bytes]] = {}
        self.tip = self.genesis_hash
        self._detached_order: list[bytes] = []  # FIFO for orphan pool eviction

    # -- queries

    def meta(self, h: bytes) -> BlockMeta | None:
        return self.blocks.get(h)

    def tip_state(self) -> L.ChainState:
        return self.blocks[self.tip].state

    def tip_height(self) -> int:
        return self.blocks[self.tip].block.header.height

    def chain_to(self, h: bytes) -> list[bytes]:
        """Hashes from genesis to h along parent links."""
        path = []
        cur = h
        while True:
            meta = self.blocks[cur]
            path.append(cur)
            if cur == self.genesis_hash:
                break
            cur = meta.block.header.parent
        path.reverse()
        return path

    def missing_parents(self) -> set[bytes]:
        return {
            m.block.header.parent
            for m in self.blocks.values()
            if m.hash != self.genesis_hash and m.block.header.parent not in self.blocks
        }

    # -- growth

    def add_block(self, block: L.Block) -> tuple[str, list[ChainEvent]]:
        """Insert a block, validate what became validatable, reselect the tip.

        Returns the new block's status and the connect/disconnect events of
        any tip change, in application order.
        """
        h = L.block_hash(block)
        if h in self.blocks:
            return self.blocks[h].status, []
        meta = BlockMeta(block=block, hash=h, status="detached")
        meta.node_class = L.classify_body(block.body)
        self.blocks[h] = meta
        self.children.setdefault(block.header.parent, []).append(h)
        parent = self.blocks.get(block.header.parent)
        if parent is None:
            self._detached_order.append(h)
            self._evict_orphans()
        else:
            self._try_validate(meta, parent)
        return self.blocks[h].status if h in self.blocks else "evicted", self._reselect_tip()

    def _evict_orphans(self) -> None:
        while len(self._detached_order) > ORPHAN_POOL_CAP:
            victim = self._detached_order.pop(0)
            meta = self.blocks.pop(victim, None)
            if meta is not None:
                sibs = self.children.get(meta.block.header.parent, [])
                if victim in sibs:
                    sibs.remove(victim)

    def _try_validate(self, meta: BlockMeta, parent: BlockMeta) -> None:
        if meta.hash in self._detached_order:
            self._detached_order.remove(meta.hash)
        if parent.status != "valid":
            # hereditary: unvalidatable ancestry keeps descendants detached
            meta.status = "detached"
        else:
            try:
                state, cls, effect = L.validate_block(
                    parent.hash, parent.state, meta.block, self.params
                )
                meta.status = "valid"
                meta.state = state
                meta.effect = effect
                meta.node_class = cls
            except L.BlockError as e:
                meta.status = "invalid"
                meta.reason = str(e)
                meta.node_class = L.NodeClass.INVALID
        for child in list(self.children.get(meta.hash, [])):
            self._try_validate(self.blocks[child], meta)

    def _best_tip(self) -> bytes:
        return min(
            (h for h, m in self.blocks.items() if m.status == "valid"),
            key=lambda h: (-self.blocks[h].block.header.height, h),
        )

    def _reselect_tip(self) -> list[ChainEvent]:
        best = self._best_tip()
        if best == self.tip:
            return []
        old_path = self.chain_to(self.tip)
        new_path = self.chain_to(best)
        fork = 0
        for a, b in zip(old_path, new_path):
            if a != b:
                break
            fork += 1
        events = []
        for h in reversed(old_path[fork:]):
            m = self.blocks[h]
            events.append(ChainEvent("disconnect", m.block, m.effect))
        for h in new_path[fork:]:
            m = self.blocks[h]
            events.append(ChainEvent("connect", m.block, m.effect))
        self.tip = best
        return events

    def initial_events(self) -> list[ChainEvent]:
        """Connect events for the current best chain (fresh consumers)."""
        return [
            ChainEvent("connect", self.blocks[h].block, self.blocks[h].effect)
            for h in self.chain_to(self.tip)
        ]

    # -- the colored graph

    def classify_graph(self) -> list[dict]:
        """One entry per known block plus one yellow placeholder per
        referenced-but-absent parent, ordered by (height, hash)."""
        entries = []
        for h, m in self.blocks.items():
            entries.append(
                {
                    "id": h.hex(),
                    "parent": m.block.header.parent.hex(),
                    "height": m.block.header.height,
                    "class": m.node_class.name,
                    "color": m.node_class.color,
                    "status": m.status,
                }
            )
        for missing in sorted(self.missing_parents()):
            child_heights = [
                self.blocks[c].block.header.height for c in self.children.get(missing, [])
            ]
            entries.append(
                {
                    "id": missing.hex(),
                    "parent": None,
                    "height": min(child_heights) - 1 if child_heights else 0,
                    "class": L.NodeClass.MISSING.name,
                    "color": L.NodeClass.MISSING.color,
                    "status": "missing",
                }
            )
        entries.sort(key=lambda e: (e["height"], e["id"]))
        return entries

    def graph_dot(self) -> str:
        """Graphviz rendering of the block graph; deterministic output."""
        lines = [
            "digraph chain {",
            "  rankdir=BT;",
            '  node [shape=box, style=filled, fontname="monospace"];',
        ]
        entries = self.classify_graph()
        for e in entries:
            label = f'{e["id"][:8]}\\nh={e["height"]} {e["class"].lower()}'
            lines.append(f'  "{e["id"][:16]}" [label="{label}", fillcolor={e["color"]}];')
        for e in entries:
            if e["parent"] is not None:
                lines.append(f'  "{e["id"][:16]}" -> "{e["parent"][:16]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"
