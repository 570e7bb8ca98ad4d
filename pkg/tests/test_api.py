import json

import pytest
from fastapi.testclient import TestClient

from pfgx import api as A, corpus, docform as D, indexer as I, keys, ledger as L
from pfgx.node import Node


@pytest.fixture(scope="module")
def lifecycle_client(request):
    lifecycle = request.getfixturevalue("lifecycle")
    _, res, net = lifecycle
    node = net.nodes[0].node
    client = TestClient(A.build_app(node))
    return res, node, client


def get(client, path):
    r = client.get(path)
    assert r.status_code == 200, (path, r.text)
    return r


class TestStatus:
    def test_empty_chain_status(self):
        node = Node(L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0))
        client = TestClient(A.build_app(node))
        data = get(client, "/status").json()
        assert data["height"] == 0
        assert data["tx_count"] == 1
        assert data["tx_volume"] == 0
        assert data["tip_hash"] == node.tree.genesis_hash.hex()

    def test_matches_independent_scan(self, lifecycle_client):
        _, node, client = lifecycle_client
        data = get(client, "/status").json()
        st = node.tip_state()
        # independent full scan of the chain for the dashboard numbers
        chain = node.tree.chain_to(node.tree.tip)
        txs = sum(len(node.tree.blocks[h].block.body) for h in chain)
        volume = 0
        for h in chain:
            meta = node.tree.blocks[h]
            for tx in meta.block.body[1:]:
                volume += sum(
                    o.payload.amount
                    for o in tx.outputs
                    if isinstance(o.payload, L.Currency)
                )
        assert data["height"] == st.height
        assert data["tx_count"] == txs
        assert data["tx_volume"] == volume
        assert data["coin_circulation"] == st.supply
        assert data["address_count"] == len({a.addr for a in st.by_id.values()})
        assert data["snapshot_digest"] == node.snapshot.digest().hex()


class TestPurity:
    def test_byte_identical_across_service_restarts(self, lifecycle_client):
        res, node, client = lifecycle_client
        paths = [
            "/status", "/graph", "/graph.dot",
            "/bounties/open", "/bounties/collected", "/bounties/categories",
            "/block/" + node.tree.tip.hex(),
        ]
        pid = corpus.corpus_prop_id("bounty_targets", "sets_form_category")
        paths.append("/prop/" + pid.hex())
        first = {p: get(client, p).content for p in paths}
        client2 = TestClient(A.build_app(node, A.ApiConfig()))
        for p in paths:
            assert get(client2, p).content == first[p]

    def test_graph_json_dot_same_node_set(self, lifecycle_client):
        _, _, client = lifecycle_client
        graph = get(client, "/graph").json()
        dot = get(client, "/graph.dot").text
        for entry in graph:
            assert entry["id"][:16] in dot
            assert entry["color"] in dot


class TestDetailPages:
    def test_genesis_block(self, lifecycle_client):
        _, node, client = lifecycle_client
        g = node.tree.genesis_hash.hex()
        data = get(client, "/block/" + g).json()
        assert data["height"] == 0
        assert data["parent"] == "00" * 32
        assert data["class"] == "PLAIN"

    def test_tx_with_document_lists_items(self, lifecycle_client):
        res, node, client = lifecycle_client
        b6 = node.tree.blocks[bytes.fromhex(res["blocks"]["b6"])]
        doc_tx = b6.block.body[1]
        data = get(client, "/tx/" + L.txid(doc_tx).hex()).json()
        att = data["attachment"]
        assert att["type"] == "document"
        kinds = [i["kind"] for i in att["items"]]
        assert kinds.count("thm") == 2 and kinds.count("def") == 5
        thm = next(i for i in att["items"] if i["name"] == "sets_form_category_proven")
        assert "MetaCat" in thm["statement"]
        # ownership outputs minted to the publisher
        assert any(o["payload"]["type"] == "owns_prop" for o in data["outputs"])
        assert any(o["payload"]["type"] == "owns_neg_prop" for o in data["outputs"])

    def test_prop_views(self, lifecycle_client):
        _, node, client = lifecycle_client
        proven = corpus.corpus_prop_id("bounty_targets", "sets_form_category")
        data = get(client, "/prop/" + proven.hex()).json()
        assert data["status"] == "proven"
        assert data["bounty_open"] == 0
        assert data["bounty_collected"][0]["amount"] == 750
        assert data["bounty_collected"][0]["method"] == "proof"
        assert data["statement"].startswith("MetaCat")
        refuted = corpus.corpus_prop_id("bounty_targets", "universal_empty")
        data = get(client, "/prop/" + refuted.hex()).json()
        assert data["status"] == "disproven"
        assert data["refuted_by"]
        open_conj = corpus.corpus_prop_id("bounty_targets", "comp_unit_pointwise")
        data = get(client, "/prop/" + open_conj.hex()).json()
        assert data["status"] == "conjecture"

    def test_theory_pages(self, lifecycle_client):
        _, node, client = lifecycle_client
        hotg = get(client, "/theory/" + corpus.hotg_id().hex()).json()
        assert hotg["builtin"] is False
        assert len(hotg["prims"]) == 15
        hf = get(client, "/theory/" + corpus.hf_id().hex()).json()
        assert hf["builtin"] is True
        assert hf["prims"][0] == {"name": "in", "ty": "set -> set -> prop"}

    def test_object_page(self, lifecycle_client):
        _, node, client = lifecycle_client
        top_id = "17ae0ba758e07a5d65bd0fbabf1dd684bcaaffa727e9defb9ec00cc81e41675d"
        data = get(client, "/object/" + top_id).json()
        assert data["kind"] == "def"
        assert data["name"] == "top"
        assert data["body"] == "all (x0 : prop) => x0 -> x0"

    def test_address_page(self, lifecycle_client):
        _, node, client = lifecycle_client
        addr = L.derive_addr(keys.key_from_seed(2).pubkey)
        data = get(client, "/address/" + addr.hex()).json()
        assert data["balance"] == 1346
        assert data["published"]

    def test_unknown_ids_404_structured(self, lifecycle_client):
        _, _, client = lifecycle_client
        for path in ("/block/" + "00" * 32, "/tx/" + "11" * 32,
                     "/prop/" + "22" * 32, "/object/" + "33" * 32,
                     "/theory/" + "44" * 32):
            r = client.get(path)
            assert r.status_code == 404
            assert r.json()["error"]["code"] == "NotFound"

    def test_bad_hex_rejected(self, lifecycle_client):
        _, _, client = lifecycle_client
        r = client.get("/block/zznothex")
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "DecodeError"


class TestBountiesEndpoints:
    def test_mirror_views(self, lifecycle_client):
        _, node, client = lifecycle_client
        views = I.bounty_views(node.snapshot)
        assert get(client, "/bounties/open").json() == views["highest_open"]
        assert get(client, "/bounties/collected").json() == views["highest_collected"]
        assert get(client, "/bounties/categories").json() == views["categories"]

    def test_page_limit_capped(self, lifecycle_client):
        _, _, client = lifecycle_client
        r = client.get("/bounties/open?limit=99999")
        assert r.status_code == 200  # capped internally at 500


class TestSubmission:
    def make_transfer(self, node, frm, to, amount):
        key = keys.key_from_seed(frm)
        addr = L.derive_addr(key.pubkey)
        st = node.tip_state()
        assets = [a for a in st.live_at(addr) if isinstance(a.payload, L.Currency)]
        picked, total = [], 0
        for a in assets:
            picked.append(a)
            total += a.payload.amount
            if total >= amount + 1:
                break
        outs = [L.TxOutput(L.derive_addr(keys.key_from_seed(to).pubkey), L.Currency(amount))]
        if total - amount - 1 > 0:
            outs.append(L.TxOutput(addr, L.Currency(total - amount - 1)))
        tx = L.Tx(
            tuple(L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64) for a in picked),
            tuple(outs),
        )
        return L.sign_tx(tx, [key] * len(picked))

    def test_accept_then_next_block(self):
        node = Node(L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0))
        client = TestClient(A.build_app(node))
        tx = self.make_transfer(node, 0, 5, 100)
        r = client.post("/tx", content=L.ser_tx(tx).hex())
        assert r.status_code == 200
        assert r.json()["txid"] == L.txid(tx).hex()
        block = node.next_block()
        assert L.txid(block.body[1]) == L.txid(tx)

    def test_double_spend_rejected(self):
        node = Node(L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0))
        client = TestClient(A.build_app(node))
        tx = self.make_transfer(node, 0, 5, 100)
        client.post("/tx", content=L.ser_tx(tx).hex())
        node.next_block()
        r = client.post("/tx", content=L.ser_tx(tx).hex())
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "DoubleSpend"

    def test_malformed_hex(self):
        node = Node(L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0))
        client = TestClient(A.build_app(node))
        r = client.post("/tx", content="zz-not-hex")
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "DecodeError"

    def test_read_only_disables_posts(self):
        node = Node(L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0))
        client = TestClient(A.build_app(node, A.ApiConfig(read_only=True)))
        r = client.post("/tx", content="00")
        assert r.status_code == 403
        assert r.json()["error"]["code"] == "ReadOnly"
        r = client.post("/doc/check", content="theory mini_hf")
        assert r.status_code == 403

    def test_accept_reject_equals_validate_tx(self):
        node = Node(L.ChainParams(producer_seeds=(0,), auto_bounty_blocks=0))
        client = TestClient(A.build_app(node))
        node.next_block()
        fixtures = []
        ok_tx = self.make_transfer(node, 0, 4, 10)
        fixtures.append(ok_tx)
        # over-spend
        key = keys.key_from_seed(0)
        addr = L.derive_addr(key.pubkey)
        st = node.tip_state()
        a = next(x for x in st.live_at(addr) if isinstance(x.payload, L.Currency))
        over = L.sign_tx(
            L.Tx(
                (L.TxInput(a.asset_id, key.pubkey, b"\x00" * 64),),
                (L.TxOutput(addr, L.Currency(a.payload.amount + 1)),),
            ),
            [key],
        )
        fixtures.append(over)
        ghost = L.sign_tx(
            L.Tx(
                (L.TxInput(b"\x77" * 32, key.pubkey, b"\x00" * 64),),
                (L.TxOutput(addr, L.Currency(1)),),
            ),
            [key],
        )
        fixtures.append(ghost)
        for tx in fixtures:
            st = node.tip_state()
            try:
                L.validate_tx(st, tx, st.height + 1, node.params)
                expected = 200
            except L.TxError:
                expected = 400
            r = client.post("/tx", content=L.ser_tx(tx).hex())
            assert r.status_code == expected
            node.mempool.clear()


class TestDocCheck:
    def test_valid_fixture_ok(self, lifecycle_client):
        _, _, client = lifecycle_client
        text = corpus.doc_text("eq_basic")
        r = client.post("/doc/check", content=text.encode())
        assert r.status_code == 200
        body = r.json()
        assert body["ok"] is True
        assert all(i["status"] == "ok" for i in body["items"])

    def test_mutated_proof_item_level_failure(self, lifecycle_client):
        _, _, client = lifecycle_client
        text = corpus.doc_text("eq_basic").replace(
            "thm eq_sym : all (x : set) (y : set) => eq x y -> eq y x",
            "thm eq_sym : all (x : set) (y : set) => eq y x -> eq y x",
        )
        r = client.post("/doc/check", content=text.encode())
        body = r.json()
        assert body["ok"] is False
        failing = [i for i in body["items"] if i["status"] == "error"]
        assert failing and failing[0]["error"] == "ConvFailure"

    def test_unknown_theory_structured_error(self, lifecycle_client):
        _, _, client = lifecycle_client
        text = "theory #" + "ab" * 32 + "\nconj c : all (p : prop) => p"
        r = client.post("/doc/check", content=text.encode())
        assert r.status_code in (400, 404)
        assert "error" in r.json()
