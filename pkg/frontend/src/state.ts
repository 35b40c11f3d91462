/** UI session state: active tool, render mode cycling, live weight slider
 * replay and stale-response discarding. The UI never mutates geometry; all
 * changes round-trip through the service and re-render from its revision. */

import type { SegmentParams } from './client'
import { RENDER_MODES, type RenderMode } from './geometry'

export type Tool = 'orbit' | 'seed' | 'paint' | 'erase'

export interface ViewState {
  renderMode: RenderMode
  tool: Tool
  segmentationMode: string
  weight: number
  weldPrecision: number | null
  classChoice: string
  revision: number
  /** last segmentation issued, re-run when the weight slider moves */
  lastRequest: SegmentParams | null
}

export function createState(): ViewState {
  return {
    renderMode: 'editable',
    tool: 'orbit',
    segmentationMode: 'Normal',
    weight: 0.1,
    weldPrecision: null,
    classChoice: 'WallSurface',
    revision: 0,
    lastRequest: null,
  }
}

export function nextRenderMode(mode: RenderMode): RenderMode {
  const index = RENDER_MODES.indexOf(mode)
  return RENDER_MODES[(index + 1) % RENDER_MODES.length]
}

/**
 * Accept a response revision: returns false (discard) when the response is
 * older than what the UI already shows.
 */
export function acceptRevision(state: ViewState, revision: number): boolean {
  if (revision < state.revision) return false
  state.revision = revision
  return true
}

/** Segmentation request for a fresh seed click at the current settings. */
export function requestForSeed(state: ViewState, seed: number): SegmentParams {
  return { mode: state.segmentationMode, seed, weight: state.weight }
}

/** The last request re-issued with a new weight, or null if none yet. */
export function requestForWeight(state: ViewState, weight: number): SegmentParams | null {
  if (!state.lastRequest) return null
  return { ...state.lastRequest, weight }
}
