from pfgx import ledger as L
from pfgx.node import Node
from pfgx.store import Store


def test_genesis_round_trip(tmp_path):
    store = Store(tmp_path)
    params = L.ChainParams(producer_seeds=(0, 1, 2), subsidy=77)
    store.write_genesis(params)
    assert store.read_genesis() == params


def test_block_log_replay(tmp_path):
    params = L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=2)
    store = Store(tmp_path)
    store.write_genesis(params)
    node = Node(params)
    for _ in range(4):
        store.append_block(node.next_block())
    replayed = Node(params)
    for block in store.iter_blocks():
        assert replayed.receive_block(block) == "valid"
    assert replayed.tree.tip == node.tree.tip
    assert replayed.tip_state().digest() == node.tip_state().digest()
    assert replayed.snapshot == node.snapshot


def test_kv_last_write_wins(tmp_path):
    store = Store(tmp_path)
    k1, k2 = b"\x01" * 32, b"\x02" * 32
    store.kv_put(k1, b"one")
    store.kv_put(k2, b"two")
    store.kv_put(k1, b"three")
    assert store.kv_get(k1) == b"three"
    assert store.kv_get(k2) == b"two"
    assert store.kv_get(b"\x03" * 32) is None
