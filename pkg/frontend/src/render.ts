// Isometric board rendering plus the pure geometry helpers behind it.
// The projection/picking math is kept free of DOM types so it can be unit
// tested in node.

import { SceneData, BlockData } from "./api.js";

export const EDGE = 1; // block edge length in world units
export const SNAP = 0.25; // placement cursor pitch

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface ViewConfig {
  originX: number; // screen position of world (0, 0, 0)
  originY: number;
  unit: number; // pixels per world unit along an iso axis
}

export const DEFAULT_VIEW: ViewConfig = { originX: 320, originY: 300, unit: 48 };

// Classic 2:1 isometric projection: +x runs down-right, +z (toward the
// viewer) runs down-left, +y straight up.
export function project(x: number, y: number, z: number, view: ViewConfig = DEFAULT_VIEW): ScreenPoint {
  return {
    x: view.originX + (x - z) * view.unit * 0.866,
    y: view.originY + (x + z) * view.unit * 0.5 - y * view.unit,
  };
}

// Invert the projection at a fixed height (the table surface sits at y=0).
export function unproject(sx: number, sy: number, y = 0, view: ViewConfig = DEFAULT_VIEW): { x: number; z: number } {
  const a = (sx - view.originX) / (view.unit * 0.866); // x - z
  const b = (sy - view.originY + y * view.unit) / (view.unit * 0.5); // x + z
  return { x: (a + b) / 2, z: (b - a) / 2 };
}

export function snap(value: number, pitch = SNAP): number {
  return Math.round(value / pitch) * pitch;
}

// Where would a block land if dropped at table cell (x, z)?  Height is
// derived from the tallest block whose footprint covers the cell, so
// clicking a stack places on its top.
export function placementAt(scene: SceneData, x: number, z: number): [number, number, number] {
  let top = 0;
  for (const b of scene.blocks) {
    const [bx, by, bz] = b.pos;
    if (Math.abs(bx - x) < EDGE / 2 + 1e-9 && Math.abs(bz - z) < EDGE / 2 + 1e-9) {
      top = Math.max(top, by + EDGE / 2);
    }
  }
  return [x, top + EDGE / 2, z];
}

export function placementFromClick(
  scene: SceneData,
  sx: number,
  sy: number,
  view: ViewConfig = DEFAULT_VIEW,
): [number, number, number] | null {
  const { x, z } = unproject(sx, sy, 0, view);
  const cx = snap(x);
  const cz = snap(z);
  const hw = scene.table.width / 2 - EDGE / 2;
  const hd = scene.table.depth / 2 - EDGE / 2;
  if (Math.abs(cx) > hw + 1e-9 || Math.abs(cz) > hd + 1e-9) return null;
  return placementAt(scene, cx, cz);
}

// Painter's order: far cells first (low x+z), then bottom-up.
export function drawOrder(blocks: BlockData[]): BlockData[] {
  return [...blocks].sort((a, b) => {
    const da = a.pos[0] + a.pos[2];
    const db = b.pos[0] + b.pos[2];
    return da !== db ? da - db : a.pos[1] - b.pos[1];
  });
}

function shade(color: string, factor: number): string {
  const named: Record<string, [number, number, number]> = {
    red: [214, 69, 65],
    blue: [64, 105, 225],
    green: [60, 160, 85],
    yellow: [230, 195, 50],
  };
  const rgb = named[color] ?? [150, 150, 150];
  return `rgb(${rgb.map((c) => Math.round(c * factor)).join(",")})`;
}

function facePath(ctx: CanvasRenderingContext2D, pts: ScreenPoint[]): void {
  ctx.beginPath();
  ctx.moveTo(pts[0].x, pts[0].y);
  for (const p of pts.slice(1)) ctx.lineTo(p.x, p.y);
  ctx.closePath();
}

function drawCube(ctx: CanvasRenderingContext2D, b: BlockData, view: ViewConfig): void {
  const [x, y, z] = b.pos;
  const h = EDGE / 2;
  const p = (dx: number, dy: number, dz: number) => project(x + dx, y + dy, z + dz, view);
  const top = [p(-h, h, -h), p(h, h, -h), p(h, h, h), p(-h, h, h)];
  const front = [p(-h, h, h), p(h, h, h), p(h, -h, h), p(-h, -h, h)];
  const side = [p(h, h, h), p(h, h, -h), p(h, -h, -h), p(h, -h, h)];
  ctx.strokeStyle = "rgba(0,0,0,0.35)";
  for (const [pts, factor] of [
    [top, 1.0],
    [front, 0.78],
    [side, 0.6],
  ] as [ScreenPoint[], number][]) {
    facePath(ctx, pts);
    ctx.fillStyle = shade(b.color, factor);
    ctx.fill();
    ctx.stroke();
  }
}

function drawTable(ctx: CanvasRenderingContext2D, scene: SceneData, view: ViewConfig): void {
  const hw = scene.table.width / 2;
  const hd = scene.table.depth / 2;
  const corners = [
    project(-hw, 0, -hd, view),
    project(hw, 0, -hd, view),
    project(hw, 0, hd, view),
    project(-hw, 0, hd, view),
  ];
  facePath(ctx, corners);
  ctx.fillStyle = "#e8e2d4";
  ctx.fill();
  ctx.strokeStyle = "#b0a890";
  ctx.stroke();
  ctx.strokeStyle = "rgba(0,0,0,0.08)";
  for (let x = -hw + EDGE / 2; x <= hw - EDGE / 2 + 1e-9; x += EDGE) {
    const a = project(x, 0, -hd, view);
    const b = project(x, 0, hd, view);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
  for (let z = -hd + EDGE / 2; z <= hd - EDGE / 2 + 1e-9; z += EDGE) {
    const a = project(-hw, 0, z, view);
    const b = project(hw, 0, z, view);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
}

export function renderScene(
  canvas: HTMLCanvasElement,
  scene: SceneData,
  cursor: [number, number, number] | null = null,
  view: ViewConfig = DEFAULT_VIEW,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    renderFallback(canvas, scene);
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  drawTable(ctx, scene, view);
  for (const b of drawOrder(scene.blocks)) drawCube(ctx, b, view);
  if (cursor) {
    const [x, y, z] = cursor;
    const s = project(x, y - EDGE / 2, z, view);
    ctx.beginPath();
    ctx.ellipse(s.x, s.y, view.unit * 0.5, view.unit * 0.25, 0, 0, Math.PI * 2);
    ctx.strokeStyle = "#2266cc";
    ctx.setLineDash([4, 3]);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}

// Top-down text grid for contexts with no 2D canvas.
export function renderFallback(canvas: HTMLCanvasElement, scene: SceneData): void {
  const rows: string[] = [];
  const hw = scene.table.width / 2;
  const hd = scene.table.depth / 2;
  for (let z = hd - EDGE / 2; z >= -hd + EDGE / 2 - 1e-9; z -= EDGE) {
    let row = "";
    for (let x = -hw + EDGE / 2; x <= hw - EDGE / 2 + 1e-9; x += EDGE) {
      const n = scene.blocks.filter(
        (b) => Math.abs(b.pos[0] - x) < EDGE / 2 && Math.abs(b.pos[2] - z) < EDGE / 2,
      ).length;
      row += n === 0 ? "." : String(n);
    }
    rows.push(row);
  }
  canvas.setAttribute("data-fallback", rows.join("\n"));
}
