// Small pure helpers: HTML escaping, hash shortening, and the client-side
// unicode sugar for formal statements (the API always sends plain ASCII).

export function esc(s: string): string {
    return s
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;")
}

export function short(hash: string, n = 12): string {
    return hash.length > n ? hash.slice(0, n) + "…" : hash
}

/** Render a formal statement with quantifier/arrow/lambda sugar.
    Applied client-side only; ids and hashes stay untouched. */
export function sugar(statement: string): string {
    return esc(statement)
        .replace(/\ball\b/g, "∀")
        .replace(/\bfun\b/g, "λ")
        .replace(/-&gt;/g, "→")
        .replace(/=&gt;/g, ".")
}

export function amount(n: number): string {
    return n.toLocaleString("en-US")
}

/** Strict hex check used by the submission form before any network call. */
export function isHexTx(s: string): boolean {
    const t = s.trim()
    return t.length > 0 && t.length % 2 === 0 && /^[0-9a-fA-F]+$/.test(t)
}

export function statusBadge(status: string): string {
    return `<span class="badge badge-${esc(status)}">${esc(status)}</span>`
}
