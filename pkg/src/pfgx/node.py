"""A single node: chain tree, mempool, index, block production."""

from __future__ import annotations

from . import indexer as I, ledger as L
from .chaintree import ChainTree


class Node:
    def __init__(self, params: L.ChainParams, policy: I.RefreshPolicy = I.RefreshPolicy()):
        self.params = params
        self.tree = ChainTree(params)
        self.indexer = I.Indexer(self.tree, policy)
        self.mempool: dict[bytes, L.Tx] = {}

    @property
    def snapshot(self) -> I.IndexSnapshot:
        return self.indexer.snapshot

    def tip_state(self) -> L.ChainState:
        return self.tree.tip_state()

    def receive_block(self, block: L.Block) -> str:
        status, events = self.tree.add_block(block)
        if events:
            self.indexer.on_events(events)
            for tx in self.tree.blocks[self.tree.tip].block.body:
                self.mempool.pop(L.txid(tx), None)
        return status

    def submit_tx(self, tx: L.Tx) -> bytes:
        """Admit to the mempool iff valid against the current tip state."""
        state = self.tip_state()
        L.validate_tx(state, tx, state.height + 1, self.params)
        tid = L.txid(tx)
        self.mempool[tid] = tx
        return tid

    def next_block(self, timestamp: int | None = None) -> L.Block:
        """Produce the next block from the mempool and connect it locally."""
        tip_meta = self.tree.blocks[self.tree.tip]
        height = tip_meta.block.header.height + 1
        if timestamp is None:
            timestamp = tip_meta.block.header.timestamp + 1
        state = tip_meta.state.copy()
        state.height = height
        cb = L.validate_coinbase(L.coinbase_tx(self.params, height, self.tree.tip), height, self.params)
        L.apply_tx_effect(state, cb, subsidy=self.params.subsidy)
        included = []
        stale = []
        for tid, tx in self.mempool.items():
            try:
                eff = L.validate_tx(state, tx, height, self.params)
            except L.TxError:
                stale.append(tid)
                continue
            L.apply_tx_effect(state, eff)
            included.append(tx)
        for tid in stale:
            del self.mempool[tid]
        block = L.make_block(self.params, self.tree.tip, height, timestamp, tuple(included))
        self.receive_block(block)
        return block
