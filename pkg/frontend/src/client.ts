/** Typed client for the citymesh session service wire protocol. */

export interface MeshBuffers {
  revision: number
  vertexCount: number
  faceCount: number
  positions: number[]
  indices: number[]
  normals: number[]
  classNames: string[]
  classes: number[]
  selected: number[]
  upVector: number[]
}

export interface SelectionPayload {
  faces: number[]
  size: number
  provenance: string
  status: string
}

export interface SessionInfo {
  revision: number
  modelPath: string
  vertexCount: number
  faceCount: number
  droppedDegenerate: number
  bounds: [number[], number[]]
  upVector: number[]
  weldPrecision: number | null
  savedSelections: string[]
  classNames: string[]
}

export interface RayPayload {
  origin: [number, number, number]
  direction: [number, number, number]
}

export interface SegmentParams {
  mode: string
  seed: number
  weight: number
  band?: [number, number]
  literalDots?: boolean
}

export class ApiError extends Error {
  constructor(public code: string, message: string) {
    super(message)
  }
}

type FetchLike = typeof fetch

export class SessionClient {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: 'GET' | 'POST', path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    })
    const payload = await response.json()
    if (!response.ok || payload.error) {
      const err = payload.error ?? { code: 'http-' + response.status, message: response.statusText }
      throw new ApiError(err.code, err.message)
    }
    return payload as T
  }

  info(): Promise<SessionInfo> {
    return this.request('GET', '/api/info')
  }

  meshBuffers(): Promise<MeshBuffers> {
    return this.request('GET', '/api/meshBuffers')
  }

  components(): Promise<{ revision: number; components: number[][] }> {
    return this.request('GET', '/api/components')
  }

  segment(params: SegmentParams): Promise<{ revision: number; selection: SelectionPayload }> {
    const { mode, seed, weight, band, literalDots } = params
    const extras: Record<string, unknown> = {}
    if (band) extras.band = band
    if (literalDots) extras.literalDots = true
    return this.request('POST', '/api/segment', { mode, seed, weight, params: extras })
  }

  pick(ray: RayPayload): Promise<{ revision: number; face: number | null }> {
    return this.request('POST', '/api/pick', ray)
  }

  paint(rays: RayPayload[], erase = false): Promise<{ revision: number; selection: SelectionPayload }> {
    return this.request('POST', '/api/paint', { rays, erase })
  }

  setSelection(mode: 'all' | 'none' | 'invert'): Promise<{ revision: number; selection: SelectionPayload }> {
    return this.request('POST', '/api/selection/set', { mode })
  }

  saveSelection(name: string): Promise<{ revision: number; saved: string[] }> {
    return this.request('POST', '/api/selection/save', { name })
  }

  combineWith(op: 'union' | 'difference' | 'intersection', name: string) {
    return this.request<{ revision: number; selection: SelectionPayload }>(
      'POST', '/api/combine', { op, with: name },
    )
  }

  setWeldPrecision(precision: number | null) {
    return this.request<{ revision: number; weldPrecision: number | null; componentCount: number }>(
      'POST', '/api/weldPrecision', { precision },
    )
  }

  assignClass(className: string): Promise<{ revision: number; counts: Record<string, number> }> {
    return this.request('POST', '/api/assign', { class: className })
  }

  setUpVector(up: [number, number, number]): Promise<{ revision: number; upVector: number[] }> {
    return this.request('POST', '/api/upVector', { up })
  }

  exportDocument(name: string): Promise<{ revision: number; document: string; unclassified: number }> {
    return this.request('POST', '/api/export', { name })
  }
}
