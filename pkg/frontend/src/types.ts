// Wire types mirroring the session API. The UI performs no reasoning:
// every AI-authored string shown is copied verbatim from these fields.

export type Stage =
  | "Brainstorm"
  | "Issue"
  | "ProsCons"
  | "Relevance"
  | "Mapping"
  | "Evaluation"
  | "Draft"
  | "Delivered"
  | "Failed";

export interface StepEvent {
  session_id: string;
  seq: number;
  stage: Stage;
  payload: Record<string, unknown>;
}

export interface SessionInfo {
  state: string;
  answer: string | null;
}

export interface ChatMessage {
  author: "user" | "ai" | "system";
  text: string;
}

export const TERMINAL_STAGES: ReadonlySet<string> = new Set(["Delivered", "Failed"]);
