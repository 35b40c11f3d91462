/** Browser entry point: renderer, camera orbit, toolbar wiring. All model
 * state lives in the service; every mutation refetches buffers and
 * re-renders, so the scene always reflects a single service revision. */

import * as THREE from 'three'
import { ApiError, SessionClient, type MeshBuffers, type RayPayload } from './client'
import { buildGeometry, legendFor, materialSettings } from './geometry'
import { clickToRay, pixelToNdc } from './picking'
import { acceptRevision, createState, nextRenderMode, requestForSeed, requestForWeight } from './state'

const SEGMENTATION_MODES = [
  'Normal', 'Spatial', 'NormalAndSpatial', 'Coplanar',
  'SpatialCoplanar', 'Wall', 'Curve', 'Cylinder',
]

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

const state = createState()
const client = new SessionClient('')

const container = el<HTMLDivElement>('viewport')
const renderer = new THREE.WebGLRenderer({ antialias: true })
renderer.setPixelRatio(Math.min(window.devicePixelRatio, 2))
renderer.setClearColor(0x1c2430)
container.appendChild(renderer.domElement)

const scene = new THREE.Scene()
scene.add(new THREE.AmbientLight(0xffffff, 0.55))
const keyLight = new THREE.DirectionalLight(0xffffff, 1.1)
keyLight.position.set(3, -4, 6)
scene.add(keyLight)

const camera = new THREE.PerspectiveCamera(50, 1, 0.01, 5000)

// minimal orbit rig: yaw/pitch around a target, wheel dolly
const orbit = {
  target: new THREE.Vector3(),
  radius: 10,
  yaw: Math.PI / 4,
  pitch: Math.PI / 5,
}

function applyOrbit(): void {
  const { target, radius, yaw, pitch } = orbit
  camera.position.set(
    target.x + radius * Math.cos(pitch) * Math.cos(yaw),
    target.y + radius * Math.cos(pitch) * Math.sin(yaw),
    target.z + radius * Math.sin(pitch),
  )
  camera.up.set(0, 0, 1)
  camera.lookAt(target)
}

let buffers: MeshBuffers | null = null
let surface: THREE.Mesh | null = null
let edges: THREE.LineSegments | null = null

function rebuildScene(next: MeshBuffers): void {
  buffers = next
  if (surface) {
    scene.remove(surface)
    surface.geometry.dispose()
    ;(surface.material as THREE.Material).dispose()
  }
  if (edges) {
    scene.remove(edges)
    edges.geometry.dispose()
  }
  const geometry = buildGeometry(next)
  const settings = materialSettings(state.renderMode)
  const material = new THREE.MeshLambertMaterial({
    vertexColors: settings.vertexColors,
    wireframe: settings.wireframe,
    flatShading: settings.flatShading,
    side: THREE.DoubleSide,
  })
  surface = new THREE.Mesh(geometry, material)
  scene.add(surface)
  if (settings.showEdges) {
    edges = new THREE.LineSegments(
      new THREE.EdgesGeometry(geometry, 1),
      new THREE.LineBasicMaterial({ color: 0x10151c }),
    )
    scene.add(edges)
  } else {
    edges = null
  }
  renderLegend(next)
  draw()
}

async function refresh(): Promise<void> {
  const next = await client.meshBuffers()
  if (!acceptRevision(state, next.revision)) return
  rebuildScene(next)
  setStatus(`revision ${next.revision}`)
}

function draw(): void {
  renderer.render(scene, camera)
}

function resize(): void {
  const width = container.clientWidth
  const height = container.clientHeight
  renderer.setSize(width, height)
  camera.aspect = width / Math.max(1, height)
  camera.updateProjectionMatrix()
  draw()
}

function setStatus(text: string): void {
  el<HTMLSpanElement>('status').textContent = text
}

function renderLegend(current: MeshBuffers): void {
  const legend = el<HTMLDivElement>('legend')
  legend.replaceChildren()
  for (const entry of legendFor(current)) {
    const row = document.createElement('div')
    row.className = 'legend-row'
    const swatch = document.createElement('span')
    swatch.className = 'swatch'
    swatch.style.background = '#' + entry.color.toString(16).padStart(6, '0')
    row.appendChild(swatch)
    row.appendChild(document.createTextNode(` ${entry.className} (${entry.faceCount})`))
    legend.appendChild(row)
  }
}

function rayAt(event: PointerEvent): RayPayload {
  const rect = renderer.domElement.getBoundingClientRect()
  const ndc = pixelToNdc(event.clientX - rect.left, event.clientY - rect.top, rect.width, rect.height)
  return clickToRay(ndc.x, ndc.y, camera)
}

async function guard(action: () => Promise<void>): Promise<void> {
  try {
    await action()
  } catch (error) {
    if (error instanceof ApiError) setStatus(`${error.code}: ${error.message}`)
    else setStatus(String(error))
  }
}

// -- pointer handling --------------------------------------------------------

let dragging = false
let strokeRays: RayPayload[] = []

renderer.domElement.addEventListener('pointerdown', (event) => {
  dragging = true
  if (state.tool === 'paint' || state.tool === 'erase') {
    strokeRays = [rayAt(event)]
  }
})

renderer.domElement.addEventListener('pointermove', (event) => {
  if (!dragging) return
  if (state.tool === 'orbit') {
    orbit.yaw -= event.movementX * 0.01
    orbit.pitch = Math.min(1.5, Math.max(-1.5, orbit.pitch + event.movementY * 0.01))
    applyOrbit()
    draw()
  } else if (state.tool === 'paint' || state.tool === 'erase') {
    strokeRays.push(rayAt(event))
  }
})

renderer.domElement.addEventListener('pointerup', (event) => {
  dragging = false
  if (state.tool === 'seed') {
    const ray = rayAt(event)
    void guard(async () => {
      const picked = await client.pick(ray)
      if (picked.face === null) {
        setStatus('no face under cursor')
        return
      }
      const request = requestForSeed(state, picked.face)
      state.lastRequest = request
      const result = await client.segment(request)
      setStatus(`${result.selection.provenance}: ${result.selection.size} faces (${result.selection.status})`)
      await refresh()
    })
  } else if ((state.tool === 'paint' || state.tool === 'erase') && strokeRays.length) {
    const rays = strokeRays
    strokeRays = []
    void guard(async () => {
      await client.paint(rays, state.tool === 'erase')
      await refresh()
    })
  }
})

renderer.domElement.addEventListener('wheel', (event) => {
  event.preventDefault()
  orbit.radius *= Math.exp(event.deltaY * 0.001)
  applyOrbit()
  draw()
})

// -- toolbar wiring ------------------------------------------------------------

for (const tool of ['orbit', 'seed', 'paint', 'erase'] as const) {
  el<HTMLButtonElement>(`tool-${tool}`).addEventListener('click', () => {
    state.tool = tool
    for (const other of ['orbit', 'seed', 'paint', 'erase']) {
      el(`tool-${other}`).classList.toggle('active', other === tool)
    }
  })
}

const modeSelect = el<HTMLSelectElement>('segmentation-mode')
for (const mode of SEGMENTATION_MODES) {
  const option = document.createElement('option')
  option.value = mode
  option.textContent = mode
  modeSelect.appendChild(option)
}
modeSelect.addEventListener('change', () => {
  state.segmentationMode = modeSelect.value
})

const weightSlider = el<HTMLInputElement>('weight')
const weightLabel = el<HTMLSpanElement>('weight-value')
weightSlider.addEventListener('input', () => {
  state.weight = Number(weightSlider.value)
  weightLabel.textContent = weightSlider.value
  const request = requestForWeight(state, state.weight)
  if (!request) return
  state.lastRequest = request
  void guard(async () => {
    const result = await client.segment(request)
    setStatus(`${result.selection.provenance}: ${result.selection.size} faces`)
    await refresh()
  })
})

el<HTMLButtonElement>('render-mode').addEventListener('click', () => {
  state.renderMode = nextRenderMode(state.renderMode)
  el<HTMLButtonElement>('render-mode').textContent = `view: ${state.renderMode}`
  if (buffers) rebuildScene(buffers)
})

for (const op of ['all', 'none', 'invert'] as const) {
  el<HTMLButtonElement>(`select-${op}`).addEventListener('click', () => {
    void guard(async () => {
      await client.setSelection(op)
      await refresh()
    })
  })
}

el<HTMLButtonElement>('save-selection').addEventListener('click', () => {
  const name = el<HTMLInputElement>('selection-name').value.trim()
  if (!name) return
  void guard(async () => {
    await client.saveSelection(name)
    setStatus(`saved selection '${name}'`)
  })
})

el<HTMLButtonElement>('combine').addEventListener('click', () => {
  const name = el<HTMLInputElement>('selection-name').value.trim()
  const op = el<HTMLSelectElement>('combine-op').value as 'union' | 'difference' | 'intersection'
  if (!name) return
  void guard(async () => {
    await client.combineWith(op, name)
    await refresh()
  })
})

const palette = el<HTMLDivElement>('palette')

function buildPalette(classNames: string[]): void {
  palette.replaceChildren()
  for (const name of classNames) {
    if (name === 'Unclassified') continue
    const button = document.createElement('button')
    button.textContent = name
    button.addEventListener('click', () => {
      state.classChoice = name
      void guard(async () => {
        await client.assignClass(name)
        await refresh()
      })
    })
    palette.appendChild(button)
  }
}

el<HTMLButtonElement>('weld-apply').addEventListener('click', () => {
  const raw = el<HTMLInputElement>('weld-precision').value.trim()
  const precision = raw === '' ? null : Number(raw)
  void guard(async () => {
    const result = await client.setWeldPrecision(precision)
    state.weldPrecision = result.weldPrecision
    setStatus(`weld precision ${result.weldPrecision ?? 'off'}: ${result.componentCount} component(s)`)
    await refresh()
  })
})

el<HTMLButtonElement>('export').addEventListener('click', () => {
  const name = el<HTMLInputElement>('doc-name').value.trim() || 'Building'
  void guard(async () => {
    const result = await client.exportDocument(name)
    const blob = new Blob([result.document], { type: 'application/gml+xml' })
    const link = document.createElement('a')
    link.href = URL.createObjectURL(blob)
    link.download = `${name}.gml`
    link.click()
    URL.revokeObjectURL(link.href)
    setStatus(
      result.unclassified
        ? `exported with ${result.unclassified} unclassified face(s) as installations`
        : 'exported',
    )
  })
})

// -- boot ---------------------------------------------------------------------

void guard(async () => {
  const info = await client.info()
  buildPalette(info.classNames)
  const [lo, hi] = info.bounds
  orbit.target.set((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2)
  const spanX = hi[0] - lo[0]
  const spanY = hi[1] - lo[1]
  const spanZ = hi[2] - lo[2]
  orbit.radius = Math.max(Math.hypot(spanX, spanY, spanZ), 1) * 1.8
  applyOrbit()
  resize()
  await refresh()
})

window.addEventListener('resize', resize)
