// Client-side layered layout of the chain graph: one row per height,
// siblings spread horizontally, edges drawn child -> parent.

import { esc, short } from "./format.js"
import type { GraphNode } from "./types.js"

const CELL_W = 150
const CELL_H = 64
const BOX_W = 118
const BOX_H = 34

interface Placed extends GraphNode {
    x: number
    y: number
}

export function layoutGraph(nodes: GraphNode[]): Placed[] {
    const byHeight = new Map<number, GraphNode[]>()
    for (const n of nodes) {
        const row = byHeight.get(n.height) ?? []
        row.push(n)
        byHeight.set(n.height, row)
    }
    const heights = [...byHeight.keys()].sort((a, b) => a - b)
    const maxHeight = heights.length ? heights[heights.length - 1] : 0
    const placed: Placed[] = []
    for (const h of heights) {
        const row = byHeight.get(h)!
        row.sort((a, b) => (a.id < b.id ? -1 : 1))
        row.forEach((n, i) => {
            placed.push({
                ...n,
                x: i * CELL_W + 10,
                y: (maxHeight - n.height) * CELL_H + 10,
            })
        })
    }
    return placed
}

export function renderGraphSvg(nodes: GraphNode[]): string {
    const placed = layoutGraph(nodes)
    const index = new Map(placed.map((n) => [n.id, n]))
    const width = Math.max(...placed.map((n) => n.x + CELL_W), CELL_W) + 10
    const height = Math.max(...placed.map((n) => n.y + CELL_H), CELL_H) + 10
    const parts: string[] = []
    for (const n of placed) {
        if (n.parent !== null && index.has(n.parent)) {
            const p = index.get(n.parent)!
            parts.push(
                `<line x1="${n.x + BOX_W / 2}" y1="${n.y}" ` +
                `x2="${p.x + BOX_W / 2}" y2="${p.y + BOX_H}" class="edge"/>`,
            )
        }
    }
    for (const n of placed) {
        const label = `${short(n.id, 10)} h=${n.height}`
        parts.push(
            `<g class="gnode">` +
            `<a href="#/block/${esc(n.id)}">` +
            `<rect x="${n.x}" y="${n.y}" width="${BOX_W}" height="${BOX_H}" rx="4" ` +
            `fill="var(--c-${n.color})" data-class="${esc(n.class)}"/>` +
            `<text x="${n.x + 6}" y="${n.y + 15}">${esc(label)}</text>` +
            `<text x="${n.x + 6}" y="${n.y + 28}" class="sub">${esc(n.class.toLowerCase())}</text>` +
            `</a></g>`,
        )
    }
    return (
        `<svg class="chain-graph" viewBox="0 0 ${width} ${height}" ` +
        `width="${width}" height="${height}" xmlns="http://www.w3.org/2000/svg">` +
        parts.join("") +
        `</svg>`
    )
}
