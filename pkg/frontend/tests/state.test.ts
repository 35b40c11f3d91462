import { describe, expect, it } from 'vitest'
import {
  acceptRevision,
  createState,
  nextRenderMode,
  requestForSeed,
  requestForWeight,
} from '../src/state'

describe('render mode cycle', () => {
  it('cycles through the three modes and wraps', () => {
    const state = createState()
    expect(state.renderMode).toBe('editable')
    const seen = [state.renderMode]
    for (let i = 0; i < 3; i++) {
      state.renderMode = nextRenderMode(state.renderMode)
      seen.push(state.renderMode)
    }
    expect(seen).toEqual(['editable', 'shaded', 'wireframe', 'editable'])
  })
})

describe('revision tracking', () => {
  it('accepts newer revisions and discards stale ones', () => {
    const state = createState()
    expect(acceptRevision(state, 3)).toBe(true)
    expect(state.revision).toBe(3)
    expect(acceptRevision(state, 2)).toBe(false)
    expect(state.revision).toBe(3)
    expect(acceptRevision(state, 3)).toBe(true)
  })
})

describe('segmentation requests', () => {
  it('builds a seed request from the current settings', () => {
    const state = createState()
    state.segmentationMode = 'Wall'
    state.weight = 0.25
    expect(requestForSeed(state, 7)).toEqual({ mode: 'Wall', seed: 7, weight: 0.25 })
  })

  it('re-issues the last request with a new weight for live preview', () => {
    const state = createState()
    expect(requestForWeight(state, 0.4)).toBeNull()
    state.lastRequest = { mode: 'Curve', seed: 4, weight: 0.9 }
    expect(requestForWeight(state, 0.95)).toEqual({ mode: 'Curve', seed: 4, weight: 0.95 })
    // the stored request is untouched
    expect(state.lastRequest.weight).toBe(0.9)
  })
})
