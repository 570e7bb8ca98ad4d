"""Record API fixture responses for the UI snapshot tests.

Runs the shipped scenarios in-process, captures endpoint bodies verbatim,
and freezes them under fixtures/.  Also prepares a signed transaction (and
its genesis) for the live submission test.
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from pfgx import api as A, corpus, keys, ledger as L, simnet as S
from pfgx.node import Node

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def load(name: str) -> S.Scenario:
    from importlib import resources

    raw = json.loads(
        resources.files("pfgx").joinpath(f"scenarios/{name}.json").read_text("utf-8")
    )
    return S.Scenario.from_dict(raw)


def record(client: TestClient, path: str, name: str) -> None:
    resp = client.get(path)
    assert resp.status_code == 200, (path, resp.text)
    (OUT / f"{name}.json").write_bytes(resp.content)
    print(f"{name}.json <- {path}")


def main() -> None:
    OUT.mkdir(exist_ok=True)

    _, net = S.run_scenario_net(load("lifecycle"))
    node = net.nodes[0].node
    client = TestClient(A.build_app(node))
    record(client, "/status", "status")
    record(client, "/bounties/open", "bounties_open")
    record(client, "/bounties/collected", "bounties_collected")
    record(client, "/bounties/categories", "bounties_categories")
    record(client, "/block/" + node.tree.tip.hex(), "block")
    tip_block = node.tree.blocks[node.tree.tip].block
    # height 6 carries the resolving proof document
    chain = node.tree.chain_to(node.tree.tip)
    doc_block = node.tree.blocks[chain[6]].block
    record(client, "/tx/" + L.txid(doc_block.body[1]).hex(), "tx_document")
    record(client, "/tx/" + L.txid(tip_block.body[0]).hex(), "tx_coinbase")
    proven = corpus.corpus_prop_id("bounty_targets", "sets_form_category")
    refuted = corpus.corpus_prop_id("bounty_targets", "universal_empty")
    record(client, "/prop/" + proven.hex(), "prop_proven")
    record(client, "/prop/" + refuted.hex(), "prop_disproven")
    record(client, "/theory/" + corpus.hotg_id().hex(), "theory")
    top_id = "17ae0ba758e07a5d65bd0fbabf1dd684bcaaffa727e9defb9ec00cc81e41675d"
    record(client, "/object/" + top_id, "object")
    addr2 = L.derive_addr(keys.key_from_seed(2).pubkey)
    record(client, "/address/" + addr2.hex(), "address")

    _, net12 = S.run_scenario_net(load("graph12"))
    client12 = TestClient(A.build_app(net12.nodes[0].node))
    record(client12, "/graph", "graph")

    empty = Node(L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0))
    client0 = TestClient(A.build_app(empty))
    record(client0, "/status", "empty_status")
    record(client0, "/graph", "empty_graph")
    record(client0, "/bounties/open", "empty_bounties_open")
    record(client0, "/bounties/collected", "empty_bounties_collected")
    record(client0, "/bounties/categories", "empty_bounties_categories")

    # signed transfer for the live submission test, valid on a fresh chain
    # with the genesis below
    params = L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0)
    fresh = Node(params)
    key = keys.key_from_seed(0)
    addr = L.derive_addr(key.pubkey)
    asset = next(
        a for a in fresh.tip_state().live_at(addr)
        if isinstance(a.payload, L.Currency)
    )
    to = L.derive_addr(keys.key_from_seed(7).pubkey)
    tx = L.sign_tx(
        L.Tx(
            (L.TxInput(asset.asset_id, key.pubkey, b"\x00" * 64),),
            (
                L.TxOutput(to, L.Currency(123)),
                L.TxOutput(addr, L.Currency(asset.payload.amount - 124)),
            ),
        ),
        [key],
    )
    (OUT / "live_submit.json").write_text(
        json.dumps(
            {
                "genesis": json.loads(params.to_json()),
                "tx_hex": L.ser_tx(tx).hex(),
                "txid": L.txid(tx).hex(),
            },
            indent=2,
            sort_keys=True,
        ),
        encoding="utf-8",
    )
    print("live_submit.json")


if __name__ == "__main__":
    sys.exit(main())
