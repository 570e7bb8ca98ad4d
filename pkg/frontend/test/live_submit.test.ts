// Live round trip: a paste-ready fixture-signed transaction goes through
// the submission endpoint of a real node run and lands in the next block.

import { spawn, spawnSync, type ChildProcess } from "node:child_process"
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs"
import { tmpdir } from "node:os"
import { join } from "node:path"
import { afterAll, beforeAll, describe, expect, it } from "vitest"

import { isHexTx } from "../src/format.js"

const FIX = join(__dirname, "..", "fixtures")
const live = JSON.parse(readFileSync(join(FIX, "live_submit.json"), "utf-8"))
const PORT = 8979
const BASE = `http://127.0.0.1:${PORT}`
const hasNode = spawnSync("pfgx", ["--help"], { stdio: "ignore" }).status === 0

let proc: ChildProcess | null = null

async function waitStatus(pred: (s: { height: number }) => boolean, ms = 30000) {
    const end = Date.now() + ms
    while (Date.now() < end) {
        try {
            const resp = await fetch(BASE + "/status")
            const body = (await resp.json()) as { height: number }
            if (pred(body)) return body
        } catch {
            // server still booting
        }
        await new Promise((r) => setTimeout(r, 250))
    }
    throw new Error("timed out waiting for node status")
}

describe.skipIf(!hasNode)("live submission round trip", () => {
    beforeAll(async () => {
        const home = mkdtempSync(join(tmpdir(), "pfgx-ui-"))
        const genesis = join(home, "genesis.json")
        writeFileSync(genesis, JSON.stringify(live.genesis))
        proc = spawn(
            "pfgx",
            ["node", "run", "--genesis", genesis, "--listen", `127.0.0.1:${PORT}`,
             "--interval", "0.3"],
            { env: { ...process.env, PFG_HOME: join(home, "data") }, stdio: "ignore" },
        )
        await waitStatus((s) => s.height >= 0)
    }, 40000)

    afterAll(() => {
        proc?.kill()
    })

    it("posts the fixture tx and sees it in the next block", async () => {
        expect(isHexTx(live.tx_hex)).toBe(true)
        const resp = await fetch(BASE + "/tx", { method: "POST", body: live.tx_hex })
        const body = (await resp.json()) as { txid?: string }
        expect(resp.ok).toBe(true)
        expect(body.txid).toBe(live.txid)

        const status = await waitStatus((s) => s.height >= 1)
        const blockResp = await fetch(BASE + "/block/" + (status as never as { tip_hash: string }).tip_hash)
        const block = (await blockResp.json()) as { txids: string[] }
        expect(block.txids).toContain(live.txid)
    }, 40000)
})
