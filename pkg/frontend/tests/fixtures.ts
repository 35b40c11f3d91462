import type { MeshBuffers } from '../src/client'

/** Buffer payload for a unit cube as the service emits it: quad order
 * bottom, top, front, back, left, right; face pairs per quad. */
export function cubeBuffers(): MeshBuffers {
  const positions = [
    0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0,
    0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1,
  ]
  const quads: [number, number, number, number][] = [
    [0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4],
    [2, 3, 7, 6], [0, 4, 7, 3], [1, 2, 6, 5],
  ]
  const quadNormals = [
    [0, 0, -1], [0, 0, 1], [0, -1, 0], [0, 1, 0], [-1, 0, 0], [1, 0, 0],
  ]
  const indices: number[] = []
  const normals: number[] = []
  quads.forEach((quad, q) => {
    indices.push(quad[0], quad[1], quad[2], quad[0], quad[2], quad[3])
    normals.push(...quadNormals[q], ...quadNormals[q])
  })
  const classNames = [
    'WallSurface', 'RoofSurface', 'GroundSurface', 'ClosureSurface',
    'OuterCeilingSurface', 'OuterFloorSurface', 'Window', 'Door',
    'BuildingInstallation', 'Unclassified',
  ]
  return {
    revision: 0,
    vertexCount: 8,
    faceCount: 12,
    positions,
    indices,
    normals,
    classNames,
    classes: new Array(12).fill(9),
    selected: new Array(12).fill(0),
    upVector: [0, 0, 1],
  }
}
