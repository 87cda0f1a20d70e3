// Chat view state. Messages are append-only; the stage trail records the
// server's event sequence in arrival order; panels hold the map SVG and
// protocol text exactly as served.

import type { ChatMessage, Stage, StepEvent } from "./types.js";
import { TERMINAL_STAGES } from "./types.js";

export type Phase = "idle" | "submitting" | "running" | "terminal" | "error";

export interface ChatState {
  phase: Phase;
  sessionId: string | null;
  messages: ChatMessage[];
  stageTrail: Stage[];
  liveStage: Stage | null;
  mapSvg: string | null;
  protocolText: string | null;
  errorText: string | null;
  busy: boolean; // a follow-up request is in flight
}

type Listener = (state: ChatState) => void;

export class ChatStore {
  private state: ChatState = initialState();
  private listeners: Listener[] = [];

  get current(): ChatState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.state);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private patch(patch: Partial<ChatState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  reset(): void {
    this.state = initialState();
    this.patch({});
  }

  submitProblem(problem: string): void {
    this.patch({
      phase: "submitting",
      errorText: null,
      messages: [...this.state.messages, { author: "user", text: problem }],
    });
  }

  sessionCreated(sessionId: string): void {
    this.patch({ phase: "running", sessionId });
  }

  submitFailed(detail: string): void {
    this.patch({ phase: "error", errorText: detail });
  }

  applyEvent(event: StepEvent): void {
    const stageTrail = [...this.state.stageTrail, event.stage];
    const patch: Partial<ChatState> = { stageTrail, liveStage: event.stage };
    if (TERMINAL_STAGES.has(event.stage)) {
      patch.phase = "terminal";
      const answer = (event.payload as { answer?: unknown }).answer;
      if (event.stage === "Delivered" && typeof answer === "string") {
        // Byte-equal to the service's answer field.
        patch.messages = [...this.state.messages, { author: "ai", text: answer }];
      }
      if (event.stage === "Failed") {
        const cause = (event.payload as { cause?: unknown }).cause;
        patch.messages = [
          ...this.state.messages,
          {
            author: "system",
            text: `The deliberation failed: ${typeof cause === "string" ? cause : "unknown cause"}`,
          },
        ];
      }
    }
    this.patch(patch);
  }

  connectionLost(): void {
    if (this.state.phase === "running") {
      this.patch({ errorText: "connection lost, reconnecting..." });
    }
  }

  connectionRestored(): void {
    if (this.state.errorText?.startsWith("connection lost")) {
      this.patch({ errorText: null });
    }
  }

  panelsLoaded(mapSvg: string | null, protocolText: string): void {
    this.patch({ mapSvg, protocolText });
  }

  followupSent(question: string): void {
    this.patch({
      busy: true,
      messages: [...this.state.messages, { author: "user", text: question }],
    });
  }

  followupAnswered(answer: string): void {
    // Rendered verbatim: the reply is exactly the service's answer field.
    this.patch({
      busy: false,
      messages: [...this.state.messages, { author: "ai", text: answer }],
    });
  }

  followupFailed(detail: string): void {
    this.patch({
      busy: false,
      messages: [...this.state.messages, { author: "system", text: detail }],
    });
  }

  get inputEnabled(): boolean {
    // Input stays disabled between submission and the terminal event, and
    // while a follow-up is pending.
    if (this.state.busy) return false;
    return (
      this.state.phase === "idle" ||
      this.state.phase === "terminal" ||
      this.state.phase === "error"
    );
  }
}

function initialState(): ChatState {
  return {
    phase: "idle",
    sessionId: null,
    messages: [],
    stageTrail: [],
    liveStage: null,
    mapSvg: null,
    protocolText: null,
    errorText: null,
    busy: false,
  };
}
