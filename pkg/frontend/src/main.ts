// Hash router and form wiring. Pages are rendered by the pure functions in
// render.ts from freshly fetched API payloads.

import * as api from "./api.js"
import { isHexTx } from "./format.js"
import * as render from "./render.js"

const app = () => document.getElementById("app")!

type Route = (args: string[]) => Promise<string> | string

const routes: Record<string, Route> = {
    "": async () => render.renderDashboard(await api.getStatus()),
    graph: async () => render.renderGraphPage(await api.getGraph()),
    bounties: async () =>
        render.renderBounties(
            await api.getOpenBounties(),
            await api.getCollectedBounties(),
            await api.getCategories(),
        ),
    block: async ([hash]) => render.renderBlock(await api.getBlock(hash)),
    tx: async ([txid]) => render.renderTx(await api.getTx(txid)),
    address: async ([addr]) => render.renderAddress(await api.getAddress(addr)),
    theory: async ([id]) => render.renderTheory(await api.getTheory(id)),
    object: async ([id]) => render.renderObject(await api.getObject(id)),
    prop: async ([id]) => render.renderProp(await api.getProp(id)),
    submit: () => render.renderSubmitPage(),
    doccheck: () => render.renderDocCheckPage(),
}

async function navigate(): Promise<void> {
    const [name, ...args] = location.hash.replace(/^#\/?/, "").split("/")
    const route = routes[name] ?? (() => render.renderNotFound(`no page ${name}`))
    try {
        app().innerHTML = await route(args)
    } catch (e) {
        if (e instanceof api.RequestFailed) {
            app().innerHTML = render.notice(e.code, e.detail)
        } else {
            app().innerHTML = render.notice("Unreachable", String(e))
        }
        return
    }
    wireForms()
}

function wireForms(): void {
    const submit = document.getElementById("submit-form")
    if (submit) {
        submit.addEventListener("submit", async (ev) => {
            ev.preventDefault()
            const hex = (document.getElementById("tx-hex") as HTMLTextAreaElement).value
            const out = document.getElementById("submit-result")!
            if (!isHexTx(hex)) {
                // rejected locally; no network call for malformed input
                out.innerHTML = render.notice("DecodeError", "input is not hex")
                return
            }
            try {
                const { txid } = await api.submitTx(hex)
                out.innerHTML =
                    `<div class="notice ok">accepted <a href="#/tx/${txid}" class="mono">${txid}</a></div>`
            } catch (e) {
                const err = e as api.RequestFailed
                out.innerHTML = render.notice(err.code ?? "Error", err.detail ?? String(e))
            }
        })
    }
    const doccheck = document.getElementById("doccheck-form")
    if (doccheck) {
        doccheck.addEventListener("submit", async (ev) => {
            ev.preventDefault()
            const text = (document.getElementById("doc-text") as HTMLTextAreaElement).value
            const out = document.getElementById("doccheck-result")!
            try {
                out.innerHTML = render.renderDocReport(await api.checkDoc(text))
            } catch (e) {
                const err = e as api.RequestFailed
                out.innerHTML = render.notice(err.code ?? "Error", err.detail ?? String(e))
            }
        })
    }
}

export function start(base = ""): void {
    api.setBase(base)
    window.addEventListener("hashchange", navigate)
    void navigate()
}

declare global {
    interface Window {
        pfgxStart: typeof start
    }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
    window.pfgxStart = start
    if (document.getElementById("app")) {
        start(new URLSearchParams(location.search).get("api") ?? "")
    }
}
