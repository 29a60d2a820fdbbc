import { describe, expect, it } from "vitest";

import { SceneData } from "../src/api.js";
import {
  DEFAULT_VIEW,
  drawOrder,
  placementAt,
  placementFromClick,
  project,
  snap,
  unproject,
} from "../src/render.js";

const EMPTY: SceneData = { table: { width: 5, depth: 5 }, blocks: [] };

// End state of the shipped six-step demo plan.
const DEMO_END: SceneData = {
  table: { width: 5, depth: 5 },
  blocks: [
    { id: "b1", pos: [-1.5, 0.5, -1.0], color: "red" },
    { id: "b2", pos: [-1.5, 1.5, -1.0], color: "red" },
    { id: "b3", pos: [-1.5, 0.5, 0.0], color: "red" },
    { id: "b4", pos: [-0.5, 0.5, 0.0], color: "red" },
    { id: "b5", pos: [-1.5, 1.5, 0.0], color: "red" },
    { id: "b6", pos: [-1.5, 2.5, 0.0], color: "red" },
  ],
};

describe("projection", () => {
  it("maps the world origin to the view origin", () => {
    const p = project(0, 0, 0);
    expect(p.x).toBe(DEFAULT_VIEW.originX);
    expect(p.y).toBe(DEFAULT_VIEW.originY);
  });

  it("raises +y straight up on screen", () => {
    const base = project(1, 0, 1);
    const lifted = project(1, 2, 1);
    expect(lifted.x).toBeCloseTo(base.x);
    expect(lifted.y).toBeCloseTo(base.y - 2 * DEFAULT_VIEW.unit);
  });

  it("round-trips through unproject at any height", () => {
    for (const [x, y, z] of [
      [0, 0, 0],
      [-1.5, 0, -1],
      [2, 1.5, -2],
      [0.25, 3, 1.75],
    ]) {
      const s = project(x, y, z);
      const back = unproject(s.x, s.y, y);
      expect(back.x).toBeCloseTo(x);
      expect(back.z).toBeCloseTo(z);
    }
  });
});

describe("placement", () => {
  it("snaps to the quarter-edge grid", () => {
    expect(snap(0.31)).toBe(0.25);
    expect(snap(-1.4)).toBe(-1.5);
  });

  it("drops to the table surface when the cell is empty", () => {
    expect(placementAt(EMPTY, 0.5, -1.5)).toEqual([0.5, 0.5, -1.5]);
  });

  it("derives height from the tallest support under the cell", () => {
    // Clicking the three-tall stack targets its top face.
    expect(placementAt(DEMO_END, -1.5, 0)).toEqual([-1.5, 3.5, 0]);
    expect(placementAt(DEMO_END, -0.5, 0)).toEqual([-0.5, 1.5, 0]);
  });

  it("turns a screen click into a snapped world placement", () => {
    const s = project(-1.5, 0, -1.0);
    expect(placementFromClick(EMPTY, s.x, s.y)).toEqual([-1.5, 0.5, -1.0]);
  });

  it("rejects clicks past the table rim", () => {
    const s = project(4.5, 0, 0);
    expect(placementFromClick(EMPTY, s.x, s.y)).toBeNull();
  });
});

describe("draw order", () => {
  it("paints far and low cubes first", () => {
    const order = drawOrder(DEMO_END.blocks).map((b) => b.id);
    // The back stack (x+z = -2.5) precedes the front one; within a cell,
    // bottom precedes top.
    expect(order.indexOf("b1")).toBeLessThan(order.indexOf("b3"));
    expect(order.indexOf("b3")).toBeLessThan(order.indexOf("b5"));
    expect(order.indexOf("b5")).toBeLessThan(order.indexOf("b6"));
  });

  it("leaves the input array alone", () => {
    const blocks = [...DEMO_END.blocks];
    drawOrder(blocks);
    expect(blocks).toEqual(DEMO_END.blocks);
  });
});
