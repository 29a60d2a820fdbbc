// Session state machine: one pending directive at a time, response time
// measured from the moment presentation starts.

import {
  ActionResponse,
  Client,
  PlanStep,
  SceneData,
  StepResponse,
} from "./api.js";

export interface ViewState {
  sessionId: string;
  scene: SceneData;
  pending: { text: string; id: string } | null;
  timerStart: number | null;
  selectedCell: [number, number, number] | null;
  done: boolean;
}

export interface StepOutcome {
  accurate: boolean;
  nextAvailable: boolean;
  responseTimeMs: number;
}

export interface Clock {
  now(): number;
}

export class SessionRunner {
  state: ViewState | null = null;
  private speechDurationMs: number | undefined;

  constructor(
    private client: Client,
    private clock: Clock = Date,
  ) {}

  async start(scene: SceneData, plan: { steps: PlanStep[] }, generator: "egt" | "naive" = "egt"): Promise<ViewState> {
    const created = await this.client.createSession(scene, plan, generator);
    this.state = {
      sessionId: created.id,
      scene: created.scene,
      pending: null,
      timerStart: null,
      selectedCell: null,
      done: false,
    };
    return this.state;
  }

  private require(): ViewState {
    if (!this.state) throw new Error("session not started");
    return this.state;
  }

  // Fetch the next directive and start the response timer.  Re-entrant:
  // if a directive is already pending it is returned unchanged (the
  // server step call is idempotent too).
  async nextDirective(): Promise<StepResponse> {
    const state = this.require();
    const step = await this.client.step(state.sessionId);
    if (!state.pending || state.pending.id !== step.directiveId) {
      state.pending = { text: step.directive, id: step.directiveId };
      state.timerStart = this.clock.now();
      this.speechDurationMs = undefined;
    }
    return step;
  }

  reportSpeechDuration(ms: number): void {
    this.speechDurationMs = ms;
  }

  async submitPlacement(placedAt: [number, number, number]): Promise<StepOutcome> {
    const state = this.require();
    if (!state.pending || state.timerStart === null) {
      throw new Error("no pending directive to act on");
    }
    const responseTimeMs = Math.max(0, this.clock.now() - state.timerStart);
    const result: ActionResponse = await this.client.action(
      state.sessionId,
      state.pending.id,
      placedAt,
      responseTimeMs,
      this.speechDurationMs,
    );
    state.pending = null;
    state.timerStart = null;
    state.selectedCell = null;
    state.done = !result.nextAvailable;
    state.scene = (await this.client.getSession(state.sessionId)).scene;
    return { ...result, responseTimeMs };
  }
}
