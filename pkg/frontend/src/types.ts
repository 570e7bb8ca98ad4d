// API payload shapes, mirroring docs/api-schema.json. The UI renders these
// verbatim and never recomputes ledger math.

export interface Status {
    height: number
    address_count: number
    tx_count: number
    tx_volume: number
    coin_circulation: number
    tip_hash: string
    snapshot_digest: string
}

export type NodeColor = "green" | "blue" | "pink" | "yellow" | "red" | "gray"

export interface GraphNode {
    id: string
    parent: string | null
    height: number
    class: string
    color: NodeColor
    status: string
}

export interface Block {
    hash: string
    parent: string
    height: number
    timestamp: number
    producer: string
    body_hash: string
    status: string
    reason: string
    class: string
    color: NodeColor
    txids: string[]
}

export interface Payload {
    type: string
    amount?: number
    theory?: string
    prop?: string
    holder?: string
    commitment?: string
    doc?: string
}

export interface DocItemSummary {
    kind: string
    name: string
    statement?: string
    ty?: string
    id?: string
}

export interface Attachment {
    type: "theory" | "document"
    theory: string
    bases?: number
    prims?: number
    axioms?: number
    items?: DocItemSummary[]
}

export interface Tx {
    txid: string
    block: string
    index: number
    coinbase: boolean
    inputs: Array<{ asset_id: string; pubkey: string }>
    outputs: Array<{ addr: string; payload: Payload }>
    attachment: Attachment | null
}

export interface AddressInfo {
    addr: string
    kind: "key" | "prop"
    balance: number
    assets: Array<{ asset_id: string; payload: Payload; born: number }>
    published: string[]
}

export interface Theory {
    id: string
    bases: number
    prims: Array<{ name: string; ty: string }>
    axioms: Array<{ name: string; statement: string; id: string }>
    builtin: boolean
    entity: Entity | null
}

export interface Entity {
    id: string
    kind: string
    name: string
    theory: string
    text: string
    owner: string | null
    txid: string
    block: string
    height: number
    tag: string
    deps: string[]
    body?: string
}

export interface Prop {
    id: string
    status: "conjecture" | "proven" | "disproven"
    statement: string | null
    name: string | null
    owner: string | null
    theory: string | null
    tag: string
    bounty_open: number
    bounty_collected: Array<{
        amount: number
        height: number
        collector: string
        method: "proof" | "disproof"
    }>
    history: Array<Record<string, unknown>>
    refuted_by: string[]
}

export interface OpenBounty {
    prop: string
    amount: number
    born: number
    status: string
}

export interface CollectedBounty {
    prop: string
    amount: number
    height: number
    collector: string
    method: "proof" | "disproof"
}

export type Categories = Record<string, { open: number; collected: number }>

export interface DocReportItem {
    index: number
    kind: string
    name: string
    status: "ok" | "error" | "skipped" | "pending"
    error?: string
    detail?: string
}

export interface DocReport {
    ok: boolean
    items: DocReportItem[]
}

export interface ApiError {
    error: { code: string; detail: string }
}
