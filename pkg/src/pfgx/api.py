"""HTTP/JSON service over a node: explorer queries, graph export,
transaction submission and offline document checking.

Every GET is a pure function of the current index snapshot and chain store,
serialized with sorted keys, so identical snapshots yield byte-identical
bodies.  POSTs go through the same validation as block building.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from . import corpus, docform as D, indexer as I, kernel as K, ledger as L
from .node import Node
from .serial import FormatError, Reader


@dataclass
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8368
    read_only: bool = False
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    page_limit: int = 100  # default page size; hard cap 500
    static_dir: str | None = None


MAX_PAGE = 500


def _json(data, status: int = 200) -> Response:
    body = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return Response(content=body, status_code=status, media_type="application/json")


def _error(code: str, detail: str, status: int) -> Response:
    return _json({"error": {"code": code, "detail": detail}}, status)


def _payload_json(p: L.Payload) -> dict:
    match p:
        case L.Currency(amount):
            return {"type": "currency", "amount": amount}
        case L.Bounty(amount, theory, prop):
            return {"type": "bounty", "amount": amount,
                    "theory": theory.hex(), "prop": prop.hex()}
        case L.OwnsProp(holder):
            return {"type": "owns_prop", "holder": holder.hex()}
        case L.OwnsNegProp(holder):
            return {"type": "owns_neg_prop", "holder": holder.hex()}
        case L.OwnsObj(holder):
            return {"type": "owns_obj", "holder": holder.hex()}
        case L.Marker(commitment):
            return {"type": "marker", "commitment": commitment.hex()}
        case L.TheoryPub(theory):
            return {"type": "theory_pub", "theory": theory.hex()}
        case L.DocPub(doc):
            return {"type": "doc_pub", "doc": doc.hex()}
    raise TypeError(p)


def _entity_json(eid: bytes, e: I.EntityInfo) -> dict:
    return {
        "id": eid.hex(),
        "kind": e.kind,
        "name": e.name,
        "theory": e.theory.hex(),
        "text": e.text,
        "owner": e.owner.hex() if e.owner else None,
        "txid": e.txid.hex(),
        "block": e.block.hex(),
        "height": e.height,
        "tag": e.tag,
        "deps": [d.hex() for d in e.deps],
    }


def _tx_json(node: Node, tx: L.Tx, block_hash: bytes, index: int) -> dict:
    att = None
    if isinstance(tx.attachment, D.TheorySpec):
        att = {
            "type": "theory",
            "theory": D.theory_id_of(tx.attachment).hex(),
            "bases": tx.attachment.bases,
            "prims": len(tx.attachment.prims),
            "axioms": len(tx.attachment.axioms),
        }
    elif isinstance(tx.attachment, L.DocAttachment):
        spec = node.snapshot.theory_specs.get(tx.attachment.theory)
        items = []
        for item in tx.attachment.doc.items:
            kind = {
                D.ParamObj: "param", D.ParamProp: "param", D.DefItem: "def",
                D.ThmItem: "thm", D.ConjItem: "conj",
            }[type(item)]
            entry = {"kind": kind, "name": item.name}
            if isinstance(item, (D.ThmItem, D.ConjItem)) and spec is not None:
                entry["statement"] = D.print_term(item.stmt, spec, tx.attachment.doc)
                entry["id"] = K.prop_id(item.stmt).hex()
            if isinstance(item, D.DefItem):
                entry["ty"] = D.print_ty(item.ty)
                entry["id"] = K.term_id(item.term).hex()
            items.append(entry)
        att = {
            "type": "document",
            "theory": tx.attachment.theory.hex(),
            "items": items,
        }
    return {
        "txid": L.txid(tx).hex(),
        "block": block_hash.hex(),
        "index": index,
        "coinbase": index == 0,
        "inputs": [
            {"asset_id": i.asset_id.hex(), "pubkey": i.pubkey.hex()}
            for i in tx.inputs
        ],
        "outputs": [
            {"addr": o.addr.hex(), "payload": _payload_json(o.payload)}
            for o in tx.outputs
        ],
        "attachment": att,
    }


def _find_tx(node: Node, txid: bytes) -> tuple[L.Tx, bytes, int] | None:
    for h in reversed(node.tree.chain_to(node.tree.tip)):
        for i, tx in enumerate(node.tree.blocks[h].block.body):
            if L.txid(tx) == txid:
                return tx, h, i
    for h, meta in node.tree.blocks.items():
        for i, tx in enumerate(meta.block.body):
            if L.txid(tx) == txid:
                return tx, h, i
    return None


def build_app(node: Node, config: ApiConfig = ApiConfig(), broadcast=None) -> FastAPI:
    app = FastAPI(title="pfgx explorer", docs_url=None, redoc_url=None)
    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    def limit(request: Request) -> int:
        try:
            n = int(request.query_params.get("limit", config.page_limit))
        except ValueError:
            n = config.page_limit
        return max(1, min(n, MAX_PAGE))

    @app.get("/status")
    def status():
        snap = node.snapshot
        data = snap.stats()
        data["tip_hash"] = node.tree.tip.hex()
        data["snapshot_digest"] = snap.digest().hex()
        return _json(data)

    @app.get("/graph")
    def graph():
        return _json(node.tree.classify_graph())

    @app.get("/graph.dot")
    def graph_dot():
        return Response(node.tree.graph_dot(), media_type="text/vnd.graphviz")

    @app.get("/block/{block_hash}")
    def block(block_hash: str):
        try:
            h = bytes.fromhex(block_hash)
        except ValueError:
            return _error("DecodeError", "block hash must be hex", 400)
        meta = node.tree.meta(h)
        if meta is None:
            return _error("NotFound", "unknown block", 404)
        hd = meta.block.header
        return _json(
            {
                "hash": h.hex(),
                "parent": hd.parent.hex(),
                "height": hd.height,
                "timestamp": hd.timestamp,
                "producer": hd.producer.hex(),
                "body_hash": hd.body_hash.hex(),
                "status": meta.status,
                "reason": meta.reason,
                "class": meta.node_class.name,
                "color": meta.node_class.color,
                "txids": [L.txid(tx).hex() for tx in meta.block.body],
            }
        )

    @app.get("/tx/{txid_hex}")
    def tx_detail(txid_hex: str):
        try:
            t = bytes.fromhex(txid_hex)
        except ValueError:
            return _error("DecodeError", "txid must be hex", 400)
        found = _find_tx(node, t)
        if found is None:
            return _error("NotFound", "unknown transaction", 404)
        tx, bh, i = found
        return _json(_tx_json(node, tx, bh, i))

    @app.get("/address/{addr_hex}")
    def address(addr_hex: str):
        try:
            addr = bytes.fromhex(addr_hex)
        except ValueError:
            return _error("DecodeError", "address must be hex", 400)
        state = node.tip_state()
        assets = [
            {
                "asset_id": a.asset_id.hex(),
                "payload": _payload_json(a.payload),
                "born": a.born,
            }
            for a in state.live_at(addr)
        ]
        published = node.snapshot.authorship().get(addr, [])
        return _json(
            {
                "addr": addr.hex(),
                "kind": "key" if addr[:1] == bytes([L.PAY_TO_KEY]) else "prop",
                "assets": assets,
                "balance": sum(
                    a.payload.amount
                    for a in state.live_at(addr)
                    if isinstance(a.payload, L.Currency)
                ),
                "published": [p.hex() for p in published],
            }
        )

    @app.get("/theory/{tid_hex}")
    def theory(tid_hex: str):
        try:
            tid = bytes.fromhex(tid_hex)
        except ValueError:
            return _error("DecodeError", "theory id must be hex", 400)
        spec = node.snapshot.theory_specs.get(tid)
        if spec is None:
            return _error("NotFound", "unknown theory", 404)
        names = D._Names(spec, None)
        info = node.snapshot.theories.get(tid)
        return _json(
            {
                "id": tid.hex(),
                "bases": spec.bases,
                "prims": [
                    {"name": n, "ty": D.print_ty(ty)} for n, ty in spec.prims
                ],
                "axioms": [
                    {"name": n, "statement": D._print_term(t, [], names),
                     "id": K.prop_id(t).hex()}
                    for n, t in spec.axioms
                ],
                "builtin": info is None,
                "entity": _entity_json(tid, info) if info else None,
            }
        )

    @app.get("/object/{oid_hex}")
    def obj(oid_hex: str):
        try:
            oid = bytes.fromhex(oid_hex)
        except ValueError:
            return _error("DecodeError", "object id must be hex", 400)
        info = node.snapshot.defs.get(oid)
        if info is None:
            return _error("NotFound", "unknown object", 404)
        data = _entity_json(oid, info)
        entry = node.tip_state().theories.get(info.theory)
        if entry is not None and oid in entry.sig.defs:
            spec = node.snapshot.theory_specs.get(info.theory)
            data["body"] = D.print_term(entry.sig.defs[oid].body, spec)
        return _json(data)

    @app.get("/prop/{pid_hex}")
    def prop(pid_hex: str):
        try:
            pid = bytes.fromhex(pid_hex)
        except ValueError:
            return _error("DecodeError", "proposition id must be hex", 400)
        snap = node.snapshot
        info = snap.thms.get(pid) or snap.conjs.get(pid)
        history = snap.bounty_history.get(pid, [])
        if info is None and not history:
            return _error("NotFound", "unknown proposition", 404)
        open_amount = sum(
            b.amount for b in snap.bounty_open.values() if b.prop == pid
        )
        collected = [
            {"amount": c.amount, "height": c.height,
             "collector": c.collector.hex(), "method": c.method}
            for c in snap.bounty_collected
            if c.prop == pid
        ]
        return _json(
            {
                "id": pid.hex(),
                "status": snap.prop_status(pid),
                "statement": info.text if info else None,
                "name": info.name if info else None,
                "owner": info.owner.hex() if info and info.owner else None,
                "theory": info.theory.hex() if info else None,
                "tag": (info.tag or "Other") if info else "Other",
                "bounty_open": open_amount,
                "bounty_collected": collected,
                "history": history,
                "refuted_by": [t.hex() for t, _ in snap.refuted.get(pid, [])],
            }
        )

    @app.get("/bounties/open")
    def bounties_open(request: Request):
        views = I.bounty_views(node.snapshot)
        return _json(views["highest_open"][: limit(request)])

    @app.get("/bounties/collected")
    def bounties_collected(request: Request):
        views = I.bounty_views(node.snapshot)
        return _json(views["highest_collected"][: limit(request)])

    @app.get("/bounties/categories")
    def bounties_categories():
        return _json(I.bounty_views(node.snapshot)["categories"])

    @app.post("/tx")
    async def submit_tx(request: Request):
        if config.read_only:
            return _error("ReadOnly", "node does not accept transactions", 403)
        raw = (await request.body()).decode("ascii", errors="replace").strip()
        try:
            blob = bytes.fromhex(raw)
            tx = L.deser_tx(Reader(blob))
        except (ValueError, FormatError) as e:
            return _error("DecodeError", str(e) or "bad hex transaction", 400)
        try:
            tid = node.submit_tx(tx)
        except L.TxError as e:
            return _error(type(e).__name__, str(e), 400)
        if broadcast is not None:
            broadcast(tx)
        return _json({"txid": tid.hex()})

    @app.post("/doc/check")
    async def doc_check(request: Request):
        if config.read_only:
            return _error("ReadOnly", "node does not accept submissions", 403)
        text = (await request.body()).decode("utf-8", errors="replace")
        state = node.tip_state()
        tables = dict(corpus.theory_aliases())
        for tid, spec in node.snapshot.theory_specs.items():
            tables[tid.hex()] = spec
        try:
            doc = D.parse_doc(text, tables)
            tid = corpus.resolve_theory_id(doc.theory_ref)
        except (D.DocError, ValueError) as e:
            return _error(type(e).__name__, str(e), 400)
        entry = state.theories.get(tid)
        if entry is not None:
            sig = entry.sig
        else:
            spec = tables.get(tid.hex()) or tables.get(doc.theory_ref.lstrip("#"))
            if spec is None:
                return _error("NotFound", "unknown theory", 404)
            sig = D.check_theory(spec)
        report = D.doc_report(sig, doc)
        ok = all(item["status"] == "ok" for item in report)
        return _json({"ok": ok, "items": report})

    if config.static_dir:
        app.mount("/ui", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
