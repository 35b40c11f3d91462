/** Screen click to world-space pick ray; the service does the actual
 * ray-triangle work, the camera unprojection happens here. */

import * as THREE from 'three'
import type { RayPayload } from './client'

const raycaster = new THREE.Raycaster()

/**
 * ndcX/ndcY are normalized device coordinates in [-1, 1] (x right, y up).
 */
export function clickToRay(ndcX: number, ndcY: number, camera: THREE.Camera): RayPayload {
  raycaster.setFromCamera(new THREE.Vector2(ndcX, ndcY), camera)
  const { origin, direction } = raycaster.ray
  return {
    origin: [origin.x, origin.y, origin.z],
    direction: [direction.x, direction.y, direction.z],
  }
}

/** Pixel coordinates within a canvas rect to NDC. */
export function pixelToNdc(
  px: number, py: number, width: number, height: number,
): { x: number; y: number } {
  return {
    x: (px / width) * 2 - 1,
    y: -((py / height) * 2 - 1),
  }
}
