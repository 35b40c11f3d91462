/** Buffer-to-scene conversion: expanded triangle geometry with per-face
 * colors from the class legend, selection tint layered on top. */

import * as THREE from 'three'
import type { MeshBuffers } from './client'

/** Fixed class color legend (hex), documented for reproducible screenshots. */
export const CLASS_COLORS: Record<string, number> = {
  WallSurface: 0xd9c9a3,
  RoofSurface: 0xb33a3a,
  GroundSurface: 0x6b4f2a,
  ClosureSurface: 0x8fb3c7,
  OuterCeilingSurface: 0xc78fb3,
  OuterFloorSurface: 0x9a8fc7,
  Window: 0x4fa3d9,
  Door: 0x2f7f4f,
  BuildingInstallation: 0xcc8b3c,
  Unclassified: 0x9e9e9e,
}

export const SELECTION_COLOR = 0xffd633

export interface LegendEntry {
  className: string
  color: number
  faceCount: number
}

function classNameOf(buffers: MeshBuffers, face: number): string {
  return buffers.classNames[buffers.classes[face]] ?? 'Unclassified'
}

/**
 * Build non-indexed geometry (three corners per triangle) so each face can
 * carry flat colors; triangle i of the geometry is face i of the mesh.
 */
export function buildGeometry(buffers: MeshBuffers): THREE.BufferGeometry {
  const positions = new Float32Array(buffers.faceCount * 9)
  const normals = new Float32Array(buffers.faceCount * 9)
  for (let face = 0; face < buffers.faceCount; face++) {
    for (let corner = 0; corner < 3; corner++) {
      const vertex = buffers.indices[face * 3 + corner]
      for (let axis = 0; axis < 3; axis++) {
        positions[(face * 3 + corner) * 3 + axis] = buffers.positions[vertex * 3 + axis]
        normals[(face * 3 + corner) * 3 + axis] = buffers.normals[face * 3 + axis]
      }
    }
  }
  const geometry = new THREE.BufferGeometry()
  geometry.setAttribute('position', new THREE.BufferAttribute(positions, 3))
  geometry.setAttribute('normal', new THREE.BufferAttribute(normals, 3))
  geometry.setAttribute('color', new THREE.BufferAttribute(new Float32Array(buffers.faceCount * 9), 3))
  applyFaceColors(geometry, buffers)
  return geometry
}

/** Refresh the color attribute from class assignments and selection flags. */
export function applyFaceColors(geometry: THREE.BufferGeometry, buffers: MeshBuffers): void {
  const attribute = geometry.getAttribute('color') as THREE.BufferAttribute
  const scratch = new THREE.Color()
  for (let face = 0; face < buffers.faceCount; face++) {
    if (buffers.selected[face]) {
      scratch.setHex(SELECTION_COLOR)
    } else {
      scratch.setHex(CLASS_COLORS[classNameOf(buffers, face)] ?? CLASS_COLORS.Unclassified)
    }
    for (let corner = 0; corner < 3; corner++) {
      attribute.setXYZ(face * 3 + corner, scratch.r, scratch.g, scratch.b)
    }
  }
  attribute.needsUpdate = true
}

/** One legend row per class present in the buffers. */
export function legendFor(buffers: MeshBuffers): LegendEntry[] {
  const counts = new Map<string, number>()
  for (let face = 0; face < buffers.faceCount; face++) {
    const name = classNameOf(buffers, face)
    counts.set(name, (counts.get(name) ?? 0) + 1)
  }
  return [...counts.entries()].map(([className, faceCount]) => ({
    className,
    faceCount,
    color: CLASS_COLORS[className] ?? CLASS_COLORS.Unclassified,
  }))
}

export type RenderMode = 'editable' | 'shaded' | 'wireframe'

export const RENDER_MODES: RenderMode[] = ['editable', 'shaded', 'wireframe']

export interface MaterialSettings {
  vertexColors: boolean
  wireframe: boolean
  flatShading: boolean
  showEdges: boolean
}

/** Material configuration per render mode; pure data so it tests headless. */
export function materialSettings(mode: RenderMode): MaterialSettings {
  switch (mode) {
    case 'editable':
      return { vertexColors: true, wireframe: false, flatShading: true, showEdges: true }
    case 'shaded':
      return { vertexColors: true, wireframe: false, flatShading: false, showEdges: false }
    case 'wireframe':
      return { vertexColors: false, wireframe: true, flatShading: true, showEdges: false }
  }
}
