// Browser entry point: wires the board, directive banner, and controls to
// a SessionRunner against a local blockspeak service.

import { Client, SceneData, PlanStep } from "./api.js";
import { placementFromClick, renderScene } from "./render.js";
import { SessionRunner } from "./runner.js";
import { presentDirective } from "./speech.js";

const DEFAULT_SCENE: SceneData = { table: { width: 5, depth: 5 }, blocks: [] };
const DEFAULT_PLAN: { steps: PlanStep[] } = {
  steps: [
    { block: "new", color: "red", to: [-1.5, 0.5, -1.0] },
    { block: "new", color: "red", to: [-1.5, 1.5, -1.0] },
    { block: "new", color: "red", to: [-1.5, 0.5, 0.0] },
    { block: "new", color: "red", to: [-0.5, 0.5, 0.0] },
    { block: "new", color: "red", to: [-1.5, 1.5, 0.0] },
    { block: "new", color: "red", to: [-1.5, 2.5, 0.0] },
  ],
};

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

async function boot(): Promise<void> {
  const canvas = byId<HTMLCanvasElement>("board");
  const banner = byId<HTMLElement>("directive");
  const status = byId<HTMLElement>("status");
  const startBtn = byId<HTMLButtonElement>("start");

  const base = (document.body.dataset.api ?? "http://127.0.0.1:8000").trim();
  const runner = new SessionRunner(new Client(base));
  let busy = false;

  async function advance(): Promise<void> {
    const step = await runner.nextDirective();
    const presentation = presentDirective(step.directive, (t) => {
      banner.textContent = t;
    });
    presentation.finished.then(({ speechDurationMs }) => runner.reportSpeechDuration(speechDurationMs));
  }

  startBtn.addEventListener("click", async () => {
    const state = await runner.start(DEFAULT_SCENE, DEFAULT_PLAN);
    renderScene(canvas, state.scene);
    status.textContent = `session ${state.sessionId}`;
    await advance();
  });

  canvas.addEventListener("click", async (event: MouseEvent) => {
    const state = runner.state;
    if (!state || !state.pending || busy) return;
    const rect = canvas.getBoundingClientRect();
    const placedAt = placementFromClick(state.scene, event.clientX - rect.left, event.clientY - rect.top);
    if (!placedAt) return;
    busy = true;
    try {
      const outcome = await runner.submitPlacement(placedAt);
      renderScene(canvas, runner.state!.scene);
      status.textContent = outcome.accurate ? "✓ accurate" : "✗ off target";
      status.className = outcome.accurate ? "ok" : "bad";
      if (outcome.nextAvailable) {
        await advance();
      } else {
        banner.textContent = "Plan complete.";
      }
    } finally {
      busy = false;
    }
  });
}

boot().catch((err) => {
  console.error(err);
  const status = document.getElementById("status");
  if (status) status.textContent = String(err);
});
