import { describe, expect, it } from 'vitest'
import * as THREE from 'three'
import { clickToRay, pixelToNdc } from '../src/picking'

function lookDownMinusZ(): THREE.PerspectiveCamera {
  const camera = new THREE.PerspectiveCamera(50, 1, 0.1, 100)
  camera.position.set(0, 0, 5)
  camera.lookAt(0, 0, 0)
  camera.updateMatrixWorld()
  return camera
}

describe('clickToRay', () => {
  it('viewport center looking down -z gives direction (0, 0, -1)', () => {
    const ray = clickToRay(0, 0, lookDownMinusZ())
    expect(ray.direction[0]).toBeCloseTo(0, 8)
    expect(ray.direction[1]).toBeCloseTo(0, 8)
    expect(ray.direction[2]).toBeCloseTo(-1, 8)
    expect(ray.origin[2]).toBeCloseTo(5, 6)
  })

  it('corner clicks stay inside the frustum', () => {
    const camera = lookDownMinusZ()
    const forward = new THREE.Vector3(0, 0, -1)
    const halfDiagonal = Math.atan(Math.tan(THREE.MathUtils.degToRad(25)) * Math.SQRT2)
    for (const [x, y] of [[-1, -1], [1, -1], [-1, 1], [1, 1]] as const) {
      const ray = clickToRay(x, y, camera)
      const direction = new THREE.Vector3(...ray.direction)
      expect(direction.length()).toBeCloseTo(1, 8)
      const angle = direction.angleTo(forward)
      expect(angle).toBeLessThanOrEqual(halfDiagonal + 1e-6)
      expect(angle).toBeGreaterThan(0)
    }
  })
})

describe('pixelToNdc', () => {
  it('maps canvas corners and center', () => {
    expect(pixelToNdc(400, 300, 800, 600)).toEqual({ x: 0, y: -0 })
    expect(pixelToNdc(0, 0, 800, 600)).toEqual({ x: -1, y: 1 })
    expect(pixelToNdc(800, 600, 800, 600)).toEqual({ x: 1, y: -1 })
  })
})
