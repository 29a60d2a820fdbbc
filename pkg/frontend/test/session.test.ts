// Scripted session against a real service instance: six steps over the
// demo fixture, accurate placements throughout, context directives at the
// expected steps, and idempotency on double-submit.

import { ChildProcess, spawn } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, Client, PlanStep, SceneData } from "../src/api.js";
import { placementAt } from "../src/render.js";
import { SessionRunner } from "../src/runner.js";

const ROOT = join(__dirname, "..", "..");
const PORT = 8731;
const BASE = `http://127.0.0.1:${PORT}`;

const scene: SceneData = JSON.parse(readFileSync(join(ROOT, "fixtures", "demo_scene.json"), "utf8"));
const plan: { steps: PlanStep[] } = JSON.parse(readFileSync(join(ROOT, "fixtures", "demo_plan.json"), "utf8"));

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${BASE}/sessions/nope`);
      if (res.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "blockspeak.cli", "serve", "--port", String(PORT)], {
    cwd: ROOT,
    stdio: "ignore",
  });
  await waitForServer();
}, 30000);

afterAll(() => {
  server?.kill();
});

describe("scripted session over the demo fixture", () => {
  it("completes all six steps with context directives where expected", async () => {
    const runner = new SessionRunner(new Client(BASE));
    const state = await runner.start(scene, plan);
    expect(state.scene.blocks).toHaveLength(0);

    const surfaces: string[] = [];
    for (let i = 0; i < plan.steps.length; i++) {
      const step = await runner.nextDirective();
      surfaces.push(step.directive);
      // Place exactly where the plan says; with correct execution the UI's
      // click-derived height agrees with the machine target.
      const target = plan.steps[i].to;
      expect(placementAt(runner.state!.scene, target[0], target[2])).toEqual(target);
      const outcome = await runner.submitPlacement(target);
      expect(outcome.accurate).toBe(true);
      expect(outcome.nextAvailable).toBe(i < plan.steps.length - 1);
      expect(outcome.responseTimeMs).toBeGreaterThanOrEqual(0);
    }

    expect(surfaces).toHaveLength(6);
    expect(surfaces[1]).toBe("Put a block on top of it.");
    expect(surfaces[5]).toBe("Add one more.");
    expect(runner.state!.done).toBe(true);
    expect(runner.state!.scene.blocks).toHaveLength(6);

    const log = await new Client(BASE).getLog(runner.state!.sessionId);
    expect(log.entries).toHaveLength(6);
  }, 30000);

  it("rejects a double-submit of the same directive", async () => {
    const client = new Client(BASE);
    const runner = new SessionRunner(client);
    const state = await runner.start(scene, plan);
    const step = await runner.nextDirective();
    const target = plan.steps[0].to;
    await runner.submitPlacement(target);
    // Replay the same directiveId by hand: the server must refuse.
    await expect(client.action(state.sessionId, step.directiveId, target, 1234)).rejects.toMatchObject({
      status: 409,
    });
  }, 30000);

  it("re-presents the same directive if stepped twice", async () => {
    const runner = new SessionRunner(new Client(BASE));
    await runner.start(scene, plan);
    const first = await runner.nextDirective();
    const again = await runner.nextDirective();
    expect(again.directiveId).toBe(first.directiveId);
    expect(again.directive).toBe(first.directive);
  }, 30000);
});
