// Pure page renderers: API payloads in, HTML strings out. No fetching, no
// state, no ledger math; the golden-render tests snapshot these directly.

import { amount, esc, short, statusBadge, sugar } from "./format.js"
import { renderGraphSvg } from "./graph.js"
import type {
    AddressInfo, Block, Categories, CollectedBounty, DocReport, Entity,
    GraphNode, OpenBounty, Prop, Status, Theory, Tx,
} from "./types.js"

const COLOR_LEGEND: Array<[string, string]> = [
    ["green", "theory publication"],
    ["blue", "proof document"],
    ["pink", "transactions or bounties"],
    ["yellow", "missing block"],
    ["red", "invalid block"],
    ["gray", "plain block"],
]

function link(kind: string, id: string, text?: string): string {
    return `<a href="#/${kind}/${esc(id)}" class="mono">${esc(text ?? short(id))}</a>`
}

function kv(rows: Array<[string, string]>): string {
    return (
        `<dl class="kv">` +
        rows.map(([k, v]) => `<dt>${esc(k)}</dt><dd>${v}</dd>`).join("") +
        `</dl>`
    )
}

export function notice(code: string, detail: string): string {
    return (
        `<div class="notice error"><strong>${esc(code)}</strong>` +
        (detail ? `<span>${esc(detail)}</span>` : "") +
        `</div>`
    )
}

export function renderDashboard(status: Status): string {
    const tiles: Array<[string, string]> = [
        ["block height", amount(status.height)],
        ["addresses", amount(status.address_count)],
        ["transactions", amount(status.tx_count)],
        ["transaction volume", amount(status.tx_volume)],
        ["coins in circulation", amount(status.coin_circulation)],
    ]
    return (
        `<section class="dashboard"><h1>Chain overview</h1>` +
        `<div class="tiles">` +
        tiles
            .map(
                ([label, value]) =>
                    `<div class="tile"><div class="value">${value}</div>` +
                    `<div class="label">${esc(label)}</div></div>`,
            )
            .join("") +
        `</div>` +
        kv([
            ["tip", link("block", status.tip_hash)],
            ["snapshot digest", `<span class="mono">${esc(short(status.snapshot_digest, 24))}</span>`],
        ]) +
        `<nav class="quick"><a href="#/graph">chain graph</a>` +
        `<a href="#/bounties">bounties</a><a href="#/submit">submit tx</a>` +
        `<a href="#/doccheck">check a document</a></nav>` +
        `</section>`
    )
}

export function renderGraphPage(nodes: GraphNode[]): string {
    const legend = COLOR_LEGEND.map(
        ([color, label]) =>
            `<span class="legend-item"><i class="swatch" style="background:var(--c-${color})"></i>${esc(label)}</span>`,
    ).join("")
    const body = nodes.length
        ? renderGraphSvg(nodes)
        : `<p class="empty">no blocks yet</p>`
    return (
        `<section><h1>Chain graph</h1>` +
        `<div class="legend">${legend}</div>${body}</section>`
    )
}

export function renderBounties(
    open: OpenBounty[], collected: CollectedBounty[], categories: Categories,
): string {
    const openRows = open.length
        ? open
            .map(
                (b) =>
                    `<tr><td>${link("prop", b.prop)}</td>` +
                    `<td class="num">${amount(b.amount)}</td>` +
                    `<td class="num">${b.born}</td>` +
                    `<td>${statusBadge(b.status)}</td></tr>`,
            )
            .join("")
        : `<tr><td colspan="4" class="empty">no open bounties</td></tr>`
    const colRows = collected.length
        ? collected
            .map(
                (c) =>
                    `<tr><td>${link("prop", c.prop)}</td>` +
                    `<td class="num">${amount(c.amount)}</td>` +
                    `<td class="num">${c.height}</td>` +
                    `<td>${link("address", c.collector)}</td>` +
                    `<td>${esc(c.method)}</td></tr>`,
            )
            .join("")
        : `<tr><td colspan="5" class="empty">nothing collected yet</td></tr>`
    const maxCat = Math.max(
        1,
        ...Object.values(categories).map((c) => c.open + c.collected),
    )
    const catRows = Object.entries(categories)
        .map(([tag, sums]) => {
            const openW = Math.round((sums.open / maxCat) * 100)
            const colW = Math.round((sums.collected / maxCat) * 100)
            return (
                `<div class="cat-row"><span class="cat-tag">${esc(tag)}</span>` +
                `<span class="cat-bars">` +
                `<i class="bar open" style="width:${openW}%"></i>` +
                `<i class="bar collected" style="width:${colW}%"></i></span>` +
                `<span class="cat-nums">${amount(sums.open)} open / ${amount(sums.collected)} collected</span></div>`
            )
        })
        .join("")
    return (
        `<section><h1>Bounties</h1>` +
        `<h2>Highest open</h2><table><thead><tr><th>proposition</th><th>amount</th><th>since</th><th>status</th></tr></thead><tbody>${openRows}</tbody></table>` +
        `<h2>Highest collected</h2><table><thead><tr><th>proposition</th><th>amount</th><th>height</th><th>collector</th><th>by</th></tr></thead><tbody>${colRows}</tbody></table>` +
        `<h2>Categories</h2><div class="cats">${catRows || '<p class="empty">no bounties</p>'}</div>` +
        `</section>`
    )
}

export function renderBlock(b: Block): string {
    const txList = b.txids
        .map(
            (t, i) =>
                `<li>${link("tx", t)}${i === 0 ? ' <span class="tag">coinbase</span>' : ""}</li>`,
        )
        .join("")
    return (
        `<section><h1>Block <span class="mono">${esc(short(b.hash, 20))}</span></h1>` +
        kv([
            ["height", String(b.height)],
            ["class", `<i class="swatch" style="background:var(--c-${b.color})"></i> ${esc(b.class.toLowerCase())}`],
            ["status", statusBadge(b.status) + (b.reason ? ` <span class="reason">${esc(b.reason)}</span>` : "")],
            ["parent", link("block", b.parent)],
            ["timestamp", String(b.timestamp)],
            ["producer", `<span class="mono">${esc(short(b.producer, 20))}</span>`],
        ]) +
        `<h2>Transactions</h2><ol class="txs">${txList}</ol></section>`
    )
}

function payloadHtml(p: { type: string; [k: string]: unknown }): string {
    switch (p.type) {
        case "currency":
            return `currency ${amount(p.amount as number)}`
        case "bounty":
            return `bounty ${amount(p.amount as number)} on ${link("prop", p.prop as string)}`
        case "owns_prop":
            return `proof ownership, holder ${link("address", p.holder as string)}`
        case "owns_neg_prop":
            return `disproof ownership, holder ${link("address", p.holder as string)}`
        case "owns_obj":
            return `object ownership, holder ${link("address", p.holder as string)}`
        case "marker":
            return `marker <span class="mono">${esc(short(p.commitment as string))}</span>`
        case "theory_pub":
            return `theory publication ${link("theory", p.theory as string)}`
        case "doc_pub":
            return `document publication <span class="mono">${esc(short(p.doc as string))}</span>`
        default:
            return esc(p.type)
    }
}

export function renderTx(tx: Tx): string {
    const inputs = tx.coinbase
        ? `<li class="empty">coinbase (new coins)</li>`
        : tx.inputs
            .map((i) => `<li><span class="mono">${esc(short(i.asset_id, 20))}</span></li>`)
            .join("")
    const outputs = tx.outputs
        .map(
            (o) =>
                `<li>${link("address", o.addr)} &larr; ${payloadHtml(o.payload as never)}</li>`,
        )
        .join("")
    let attachment = ""
    if (tx.attachment?.type === "theory") {
        attachment =
            `<h2>Published theory</h2>` +
            kv([
                ["theory", link("theory", tx.attachment.theory)],
                ["primitives", String(tx.attachment.prims)],
                ["axioms", String(tx.attachment.axioms)],
            ])
    } else if (tx.attachment?.type === "document") {
        const items = (tx.attachment.items ?? [])
            .map((item) => {
                const head =
                    `<span class="tag">${esc(item.kind)}</span> <strong>${esc(item.name)}</strong>`
                const body = item.statement
                    ? `<div class="statement">${sugar(item.statement)}</div>`
                    : item.ty
                        ? `<div class="statement">${sugar(item.ty)}</div>`
                        : ""
                const ref = item.id
                    ? `<div class="sub">${item.kind === "def"
                        ? link("object", item.id)
                        : link("prop", item.id)}</div>`
                    : ""
                return `<details><summary>${head}</summary>${body}${ref}</details>`
            })
            .join("")
        attachment =
            `<h2>Published document</h2>` +
            kv([["theory", link("theory", tx.attachment.theory)]]) +
            `<div class="doc-items">${items}</div>`
    }
    return (
        `<section><h1>Transaction <span class="mono">${esc(short(tx.txid, 20))}</span></h1>` +
        kv([["block", link("block", tx.block)], ["position", String(tx.index)]]) +
        `<h2>Inputs</h2><ul>${inputs}</ul>` +
        `<h2>Outputs</h2><ul>${outputs}</ul>` +
        attachment +
        `</section>`
    )
}

export function renderAddress(a: AddressInfo): string {
    const assets = a.assets.length
        ? a.assets
            .map(
                (x) =>
                    `<li>${payloadHtml(x.payload as never)} ` +
                    `<span class="sub">born ${x.born}</span></li>`,
            )
            .join("")
        : `<li class="empty">no live assets</li>`
    const published = a.published.length
        ? a.published.map((p) => `<li>${link("prop", p)}</li>`).join("")
        : `<li class="empty">nothing published</li>`
    return (
        `<section><h1>Address <span class="mono">${esc(short(a.addr, 20))}</span></h1>` +
        kv([
            ["kind", a.kind === "key" ? "pay-to-key" : "proposition"],
            ["balance", amount(a.balance)],
        ]) +
        `<h2>Live assets</h2><ul>${assets}</ul>` +
        `<h2>Published</h2><ul>${published}</ul></section>`
    )
}

export function renderTheory(t: Theory): string {
    const prims = t.prims
        .map(
            (p) =>
                `<li><strong>${esc(p.name)}</strong> : <span class="statement">${sugar(p.ty)}</span></li>`,
        )
        .join("")
    const axioms = t.axioms
        .map(
            (a) =>
                `<li><strong>${esc(a.name)}</strong> : ` +
                `<span class="statement">${sugar(a.statement)}</span> ` +
                `<span class="sub">${link("prop", a.id)}</span></li>`,
        )
        .join("")
    return (
        `<section><h1>Theory <span class="mono">${esc(short(t.id, 20))}</span></h1>` +
        kv([
            ["base types", String(t.bases)],
            ["origin", t.builtin ? "built-in" : "published on chain"],
        ]) +
        `<h2>Primitives</h2><ul class="decls">${prims}</ul>` +
        `<h2>Axioms</h2><ul class="decls">${axioms}</ul></section>`
    )
}

export function renderObject(e: Entity): string {
    return (
        `<section><h1>Object <strong>${esc(e.name)}</strong></h1>` +
        kv([
            ["id", `<span class="mono">${esc(short(e.id, 24))}</span>`],
            ["type", `<span class="statement">${sugar(e.text)}</span>`],
            ["theory", link("theory", e.theory)],
            ["owner", e.owner ? link("address", e.owner) : "—"],
            ["published in", link("tx", e.txid)],
        ]) +
        (e.body ? `<h2>Definition</h2><div class="statement">${sugar(e.body)}</div>` : "") +
        (e.deps.length
            ? `<h2>Depends on</h2><ul>${e.deps.map((d) => `<li>${link("object", d)}</li>`).join("")}</ul>`
            : "") +
        `</section>`
    )
}

export function renderProp(p: Prop): string {
    const collected = p.bounty_collected
        .map(
            (c) =>
                `<li>${amount(c.amount)} collected at height ${c.height} by ` +
                `${link("address", c.collector)} (${esc(c.method)})</li>`,
        )
        .join("")
    const history = p.history
        .map((h) => `<li class="mono sub">${esc(JSON.stringify(h))}</li>`)
        .join("")
    return (
        `<section><h1>Proposition ${p.name ? `<strong>${esc(p.name)}</strong>` : ""}</h1>` +
        kv([
            ["id", `<span class="mono">${esc(short(p.id, 24))}</span>`],
            ["status", statusBadge(p.status)],
            ["category", esc(p.tag)],
            ["owner", p.owner ? link("address", p.owner) : "—"],
            ["open bounty", amount(p.bounty_open)],
        ]) +
        (p.statement
            ? `<h2>Statement</h2><div class="statement big">${sugar(p.statement)}</div>`
            : `<p class="empty">statement not published in a document</p>`) +
        (p.refuted_by.length
            ? `<h2>Refuted by</h2><ul>${p.refuted_by.map((r) => `<li>${link("prop", r)}</li>`).join("")}</ul>`
            : "") +
        (collected ? `<h2>Collections</h2><ul>${collected}</ul>` : "") +
        (history ? `<h2>Bounty history</h2><ul>${history}</ul>` : "") +
        `</section>`
    )
}

export function renderSubmitPage(): string {
    return (
        `<section><h1>Submit a transaction</h1>` +
        `<p>Paste the hex of an already constructed and signed transaction. ` +
        `This page never builds or signs anything.</p>` +
        `<form id="submit-form">` +
        `<textarea id="tx-hex" rows="6" spellcheck="false" placeholder="signed transaction hex"></textarea>` +
        `<button type="submit">broadcast</button></form>` +
        `<div id="submit-result"></div></section>`
    )
}

export function renderDocCheckPage(): string {
    return (
        `<section><h1>Check a document</h1>` +
        `<p>Paste document text; it is checked against the current tip ` +
        `without publishing anything.</p>` +
        `<form id="doccheck-form">` +
        `<textarea id="doc-text" rows="14" spellcheck="false" placeholder="theory mini_hotg&#10;&#10;thm …"></textarea>` +
        `<button type="submit">check</button></form>` +
        `<div id="doccheck-result"></div></section>`
    )
}

export function renderDocReport(report: DocReport): string {
    const rows = report.items
        .map(
            (i) =>
                `<tr class="st-${i.status}"><td>${i.index}</td><td>${esc(i.kind)}</td>` +
                `<td>${esc(i.name)}</td><td>${statusBadge(i.status)}` +
                (i.error ? ` <span class="reason">${esc(i.error)}: ${esc(i.detail ?? "")}</span>` : "") +
                `</td></tr>`,
        )
        .join("")
    return (
        `<div class="notice ${report.ok ? "ok" : "error"}">` +
        `${report.ok ? "document checks" : "document fails"}</div>` +
        `<table><thead><tr><th>#</th><th>kind</th><th>name</th><th>status</th></tr></thead>` +
        `<tbody>${rows}</tbody></table>`
    )
}

export function renderNotFound(what: string): string {
    return `<section><h1>Not here</h1><p class="empty">${esc(what)}</p></section>`
}
