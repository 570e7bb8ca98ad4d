"""Operator command line: run the node and API, keys, offline document
checking, transaction building and submission, scenarios, graph export,
index maintenance and status queries.

Config: key=value lines in $PFG_HOME/config provide defaults (node_url,
listen, home); flags override.  With --json every command prints a single
JSON value on stdout.  Exit codes: 0 success, 1 validation failure,
2 usage error.
"""

from __future__ import annotations

import json
import os
import sys
import threading
import time
import urllib.error
import urllib.request
from pathlib import Path

import click

from . import corpus, docform as D, indexer as I, keys as Keys, ledger as L, simnet as S
from .node import Node
from .serial import FormatError, Reader
from .store import Store

DEFAULT_URL = "http://127.0.0.1:8368"


def pfg_home() -> Path:
    return Path(os.environ.get("PFG_HOME", Path.home() / ".pfgx"))


def load_config() -> dict[str, str]:
    path = pfg_home() / "config"
    conf: dict[str, str] = {}
    if path.exists():
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            k, v = line.split("=", 1)
            conf[k.strip()] = v.strip()
    return conf


def emit(data, as_json: bool, text: str | None = None) -> None:
    if as_json:
        click.echo(json.dumps(data, sort_keys=True))
    else:
        click.echo(text if text is not None else json.dumps(data, indent=2, sort_keys=True))


def fail(code: str, detail: str, as_json: bool) -> None:
    emit({"error": {"code": code, "detail": detail}}, as_json, f"error: {code}: {detail}")
    sys.exit(1)


def http(url: str, data: bytes | None = None, method: str = "GET") -> tuple[int, dict | str]:
    req = urllib.request.Request(url, data=data, method=method)
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            body = resp.read().decode("utf-8")
            status = resp.status
    except urllib.error.HTTPError as e:
        body = e.read().decode("utf-8")
        status = e.code
    except urllib.error.URLError as e:
        return 0, str(e)
    try:
        return status, json.loads(body)
    except json.JSONDecodeError:
        return status, body


@click.group()
def main():
    """Desk-scale formal-math chain node, explorer backend and tools."""


@main.command()
@click.option("--seed", type=int, required=True, help="deterministic test key seed")
@click.option("--json", "as_json", is_flag=True)
def keygen(seed: int, as_json: bool):
    """Derive a test keypair and its pay-to-key address."""
    key = Keys.key_from_seed(seed)
    addr = L.derive_addr(key.pubkey)
    data = {"seed": seed, "pubkey": key.pubkey.hex(), "addr": addr.hex()}
    emit(data, as_json, f"pubkey {data['pubkey']}\naddr   {data['addr']}")


@main.group()
def doc():
    """Work with proof documents."""


@doc.command("check")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--theory", "theory_ref", default=None, help="theory id or alias override")
@click.option("--with-corpus", is_flag=True, help="preload the shipped corpus into the signature")
@click.option("--json", "as_json", is_flag=True)
def doc_check(files, theory_ref, with_corpus, as_json):
    """Check documents in order against the built-in theories offline."""
    tables = corpus.theory_aliases()
    if with_corpus:
        sigs = {tid: sig.copy() for tid, sig in corpus.corpus_sigs().items()}
    else:
        sigs = {
            corpus.hf_id(): corpus.hf_sig(),
            corpus.hotg_id(): D.check_theory(corpus.hotg_spec()),
        }
    reports = []
    failed = False
    for path in files:
        text = Path(path).read_text(encoding="utf-8")
        try:
            parsed = D.parse_doc(text, tables)
            tid = corpus.resolve_theory_id(theory_ref or parsed.theory_ref)
        except (D.DocError, ValueError) as e:
            reports.append({"file": str(path), "ok": False,
                            "error": type(e).__name__, "detail": str(e)})
            failed = True
            break
        sig = sigs.get(tid)
        if sig is None:
            reports.append({"file": str(path), "ok": False,
                            "error": "NotFound", "detail": "unknown theory"})
            failed = True
            break
        report = D.doc_report(sig, parsed)
        ok = all(item["status"] == "ok" for item in report)
        reports.append({"file": str(path), "ok": ok, "items": report})
        if not ok:
            failed = True
            break
        sigs[tid] = D.check_doc(sig, parsed).sig_after
    data = {"ok": not failed, "documents": reports}
    lines = []
    for rep in reports:
        mark = "ok" if rep["ok"] else "FAIL"
        lines.append(f"{rep['file']}: {mark}")
        for item in rep.get("items", []):
            if item["status"] == "error":
                lines.append(f"  item {item['index']} ({item['name']}): "
                             f"{item['error']}: {item['detail']}")
        if not rep["ok"] and "detail" in rep:
            lines.append(f"  {rep.get('error')}: {rep['detail']}")
    emit(data, as_json, "\n".join(lines))
    sys.exit(0 if not failed else 1)


@main.group()
def tx():
    """Build, sign and submit transactions."""


@tx.command("build")
@click.option("--in", "inputs", multiple=True, required=True,
              help="asset id (hex) to spend")
@click.option("--out", "outputs", multiple=True, required=True,
              help="ADDR_HEX:AMOUNT currency output")
@click.option("--json", "as_json", is_flag=True)
def tx_build(inputs, outputs, as_json):
    """Assemble an unsigned currency transaction as hex."""
    try:
        ins = tuple(L.TxInput(bytes.fromhex(i), b"\x00" * 32, b"\x00" * 64) for i in inputs)
        outs = []
        for o in outputs:
            addr, amount = o.rsplit(":", 1)
            outs.append(L.TxOutput(bytes.fromhex(addr), L.Currency(int(amount))))
    except ValueError as e:
        fail("DecodeError", str(e), as_json)
    blob = L.ser_tx(L.Tx(ins, tuple(outs))).hex()
    emit({"tx": blob}, as_json, blob)


@tx.command("sign")
@click.argument("tx_hex")
@click.option("--key", "seeds", multiple=True, type=int, required=True,
              help="signing seed; repeat per input or give one for all")
@click.option("--json", "as_json", is_flag=True)
def tx_sign(tx_hex, seeds, as_json):
    """Sign a hex transaction with deterministic test keys."""
    try:
        t = L.deser_tx(Reader(bytes.fromhex(tx_hex.strip())))
    except (ValueError, FormatError) as e:
        fail("DecodeError", str(e), as_json)
    signer_seeds = list(seeds)
    if len(signer_seeds) == 1:
        signer_seeds *= len(t.inputs)
    if len(signer_seeds) != len(t.inputs):
        fail("Usage", "need one --key per input", as_json)
    signed = L.sign_tx(t, [Keys.key_from_seed(s) for s in signer_seeds])
    blob = L.ser_tx(signed).hex()
    emit({"tx": blob, "txid": L.txid(signed).hex()}, as_json, blob)


@tx.command("submit")
@click.argument("tx_hex")
@click.option("--node", "url", default=None, help="node base URL")
@click.option("--json", "as_json", is_flag=True)
def tx_submit(tx_hex, url, as_json):
    """POST a signed hex transaction to a node."""
    url = url or load_config().get("node_url", DEFAULT_URL)
    status, body = http(f"{url}/tx", tx_hex.strip().encode(), "POST")
    if status != 200:
        detail = body.get("error", body) if isinstance(body, dict) else body
        code = detail.get("code", "Error") if isinstance(detail, dict) else "Error"
        fail(code, json.dumps(detail) if isinstance(detail, dict) else str(detail), as_json)
    emit(body, as_json, f"txid {body['txid']}")


@main.group()
def bounty():
    """Bounty operations."""


@bounty.command("place")
@click.option("--prop", required=True, help="proposition id (hex)")
@click.option("--theory", "theory_ref", default="mini_hotg", help="theory id or alias")
@click.option("--amount", type=int, required=True)
@click.option("--fee", type=int, default=1)
@click.option("--key", "seed", type=int, required=True)
@click.option("--node", "url", default=None)
@click.option("--json", "as_json", is_flag=True)
def bounty_place(prop, theory_ref, amount, fee, seed, url, as_json):
    """Fund a bounty on a proposition via a running node."""
    url = url or load_config().get("node_url", DEFAULT_URL)
    key = Keys.key_from_seed(seed)
    addr = L.derive_addr(key.pubkey)
    status, body = http(f"{url}/address/{addr.hex()}")
    if status != 200:
        fail("Unreachable", str(body), as_json)
    picked, total = [], 0
    for a in body["assets"]:
        if a["payload"]["type"] == "currency":
            picked.append(bytes.fromhex(a["asset_id"]))
            total += a["payload"]["amount"]
            if total >= amount + fee:
                break
    if total < amount + fee:
        fail("Insufficient", f"address holds {total}, need {amount + fee}", as_json)
    tid = corpus.resolve_theory_id(theory_ref)
    pid = bytes.fromhex(prop)
    outs = [L.TxOutput(L.prop_addr(tid, pid), L.Bounty(amount, tid, pid))]
    if total - amount - fee > 0:
        outs.append(L.TxOutput(addr, L.Currency(total - amount - fee)))
    t = L.Tx(
        tuple(L.TxInput(aid, key.pubkey, b"\x00" * 64) for aid in picked),
        tuple(outs),
    )
    t = L.sign_tx(t, [key] * len(picked))
    status, body = http(f"{url}/tx", L.ser_tx(t).hex().encode(), "POST")
    if status != 200:
        fail("TxInvalid", json.dumps(body), as_json)
    emit(body, as_json, f"txid {body['txid']}")


@main.group()
def scenario():
    """Deterministic simulation scenarios."""


@scenario.command("run")
@click.argument("file", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="override scenario seed")
@click.option("--nodes", type=int, default=None, help="override node count")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="write per-node graph JSON/DOT and digests here")
@click.option("--json", "as_json", is_flag=True)
def scenario_run(file, seed, nodes, out_dir, as_json):
    """Run a scenario file and report per-node tips and digests."""
    sc = S.Scenario.load(file)
    if seed is not None:
        sc.seed = seed
    try:
        res = S.run_scenario(sc, nodes)
    except S.ScenarioError as e:
        fail("ScenarioError", str(e), as_json)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        digests = {}
        for i, n in enumerate(res["nodes"]):
            (out / f"node{i}.graph.json").write_text(
                json.dumps(n["graph"], indent=2, sort_keys=True), encoding="utf-8"
            )
            (out / f"node{i}.graph.dot").write_text(n["dot"], encoding="utf-8")
            digests[f"node{i}"] = n["digest"]
        (out / "digests.json").write_text(
            json.dumps(digests, indent=2, sort_keys=True), encoding="utf-8"
        )
    summary = {
        "blocks": res["blocks"],
        "nodes": [
            {"tip": n["tip"], "height": n["height"], "digest": n["digest"],
             "color_counts": n["color_counts"]}
            for n in res["nodes"]
        ],
    }
    lines = [
        f"node {i}: tip {n['tip'][:16]} height {n['height']} digest {n['digest'][:16]}"
        for i, n in enumerate(summary["nodes"])
    ]
    emit(summary, as_json, "\n".join(lines))


@main.group()
def graph():
    """Chain graph export."""


@graph.command("export")
@click.option("--node", "url", default=None)
@click.option("--dot", "dot_path", type=click.Path(), default=None)
@click.option("--out", "json_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def graph_export(url, dot_path, json_path, as_json):
    """Fetch the colored chain graph from a node."""
    url = url or load_config().get("node_url", DEFAULT_URL)
    status, body = http(f"{url}/graph")
    if status != 200:
        fail("Unreachable", str(body), as_json)
    if json_path:
        Path(json_path).write_text(json.dumps(body, indent=2, sort_keys=True), encoding="utf-8")
    if dot_path:
        status2, dot = http(f"{url}/graph.dot")
        if status2 != 200:
            fail("Unreachable", str(dot), as_json)
        Path(dot_path).write_text(dot if isinstance(dot, str) else str(dot), encoding="utf-8")
    emit({"nodes": len(body)}, as_json, f"{len(body)} graph nodes")


@main.group()
def index():
    """Explorer index maintenance."""


@index.command("rebuild")
@click.option("--home", "home_dir", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def index_rebuild(home_dir, as_json):
    """Replay the local block store and print the rebuilt snapshot digest."""
    store = Store(home_dir or pfg_home())
    params = store.read_genesis()
    if params is None:
        fail("NotFound", "no genesis in store", as_json)
    node = Node(params)
    count = 0
    for block in store.iter_blocks():
        node.receive_block(block)
        count += 1
    snap = I.rebuild(node.tree)
    store.kv_put(node.tree.tip, snap.digest())
    data = {"blocks": count, "tip": node.tree.tip.hex(), "digest": snap.digest().hex()}
    emit(data, as_json, f"replayed {count} blocks, digest {data['digest']}")


@main.command()
@click.option("--node", "url", default=None)
@click.option("--json", "as_json", is_flag=True)
def status(url, as_json):
    """Node status summary."""
    url = url or load_config().get("node_url", DEFAULT_URL)
    code, body = http(f"{url}/status")
    if code != 200:
        fail("Unreachable", str(body), as_json)
    emit(body, as_json,
         "\n".join(f"{k}: {v}" for k, v in sorted(body.items())))


@main.group()
def node():
    """Run a node."""


@node.command("run")
@click.option("--genesis", "genesis_path", type=click.Path(exists=True), default=None)
@click.option("--listen", default=None, help="HOST:PORT")
@click.option("--home", "home_dir", type=click.Path(), default=None)
@click.option("--read-only", is_flag=True)
@click.option("--produce/--no-produce", default=True)
@click.option("--interval", type=float, default=2.0, help="block production period (s)")
@click.option("--rebuild-interval", type=float, default=None,
              help="periodic full index rebuild (s); off by default")
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None,
              help="serve a browser UI from this directory at /ui")
def node_run(genesis_path, listen, home_dir, read_only, produce, interval,
             rebuild_interval, static_dir):
    """Run the node, block producer and HTTP API."""
    import uvicorn

    from .api import ApiConfig, build_app

    conf = load_config()
    store = Store(home_dir or pfg_home())
    if genesis_path:
        params = L.ChainParams.from_json(Path(genesis_path).read_text(encoding="utf-8"))
        existing = store.read_genesis()
        if existing is not None and existing != params:
            raise click.ClickException("genesis file conflicts with the store")
        store.write_genesis(params)
    else:
        params = store.read_genesis()
        if params is None:
            raise click.ClickException("no genesis: pass --genesis FILE")

    policy = I.RefreshPolicy(rebuild_interval=rebuild_interval)
    live = Node(params, policy)
    for block in store.iter_blocks():
        live.receive_block(block)

    listen = listen or conf.get("listen", "127.0.0.1:8368")
    host, _, port = listen.partition(":")
    config = ApiConfig(
        host=host or "127.0.0.1",
        port=int(port or 8368),
        read_only=read_only,
        static_dir=static_dir,
    )
    app = build_app(live, config)

    stop = threading.Event()

    def producer_loop():
        while not stop.is_set():
            time.sleep(interval)
            if live.mempool:
                block = live.next_block(timestamp=int(time.time()))
                store.append_block(block)

    if produce:
        threading.Thread(target=producer_loop, daemon=True).start()
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    finally:
        stop.set()
        live.indexer.close()


if __name__ == "__main__":
    main()
