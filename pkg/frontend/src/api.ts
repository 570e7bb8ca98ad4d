// Thin fetch layer. The UI only ever talks to these endpoints.

import type {
    AddressInfo, ApiError, Block, Categories, CollectedBounty, DocReport,
    Entity, GraphNode, OpenBounty, Prop, Status, Theory, Tx,
} from "./types.js"

export let baseEndpoint = ""

export function setBase(url: string): void {
    baseEndpoint = url.replace(/\/$/, "")
}

export class RequestFailed extends Error {
    constructor(public code: string, public detail: string) {
        super(`${code}: ${detail}`)
    }
}

async function call<T>(path: string): Promise<T> {
    const resp = await fetch(baseEndpoint + path)
    const body = await resp.json()
    if (!resp.ok) {
        const err = (body as ApiError).error ?? { code: "HTTP" + resp.status, detail: "" }
        throw new RequestFailed(err.code, err.detail)
    }
    return body as T
}

export const getStatus = () => call<Status>("/status")
export const getGraph = () => call<GraphNode[]>("/graph")
export const getBlock = (hash: string) => call<Block>(`/block/${hash}`)
export const getTx = (txid: string) => call<Tx>(`/tx/${txid}`)
export const getAddress = (addr: string) => call<AddressInfo>(`/address/${addr}`)
export const getTheory = (id: string) => call<Theory>(`/theory/${id}`)
export const getObject = (id: string) => call<Entity>(`/object/${id}`)
export const getProp = (id: string) => call<Prop>(`/prop/${id}`)
export const getOpenBounties = () => call<OpenBounty[]>("/bounties/open")
export const getCollectedBounties = () => call<CollectedBounty[]>("/bounties/collected")
export const getCategories = () => call<Categories>("/bounties/categories")

async function post<T>(path: string, body: string): Promise<T> {
    const resp = await fetch(baseEndpoint + path, { method: "POST", body })
    const data = await resp.json()
    if (!resp.ok) {
        const err = (data as ApiError).error ?? { code: "HTTP" + resp.status, detail: "" }
        throw new RequestFailed(err.code, err.detail)
    }
    return data as T
}

export const submitTx = (hex: string) => post<{ txid: string }>("/tx", hex.trim())
export const checkDoc = (text: string) => post<DocReport>("/doc/check", text)
