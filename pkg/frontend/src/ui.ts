// View rendering. Render helpers are pure (state in, HTML out) so they can
// be tested without a browser; bindApp wires them to the document.

import { ApiClient, ApiError } from "./api.js";
import { claimIndex, splitProtocol } from "./protocol.js";
import { subscribeToEvents } from "./sse.js";
import type { ChatState } from "./store.js";
import { ChatStore } from "./store.js";
import type { Stage } from "./types.js";
import { format, initialViewBox, pan, zoom } from "./viewbox.js";

const STAGES: Stage[] = [
  "Brainstorm",
  "Issue",
  "ProsCons",
  "Relevance",
  "Mapping",
  "Evaluation",
  "Draft",
  "Delivered",
];

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderMessages(state: ChatState): string {
  return state.messages
    .map((m) => `<div class="bubble ${m.author}">${escapeHtml(m.text)}</div>`)
    .join("");
}

export function renderStageIndicator(state: ChatState): string {
  if (state.phase === "idle") return "";
  const reached = new Set(state.stageTrail);
  const failed = state.liveStage === "Failed";
  const items = STAGES.map((stage) => {
    const cls =
      stage === state.liveStage ? "stage live" : reached.has(stage) ? "stage done" : "stage";
    return `<li class="${cls}">${stage}</li>`;
  }).join("");
  const failure = failed ? '<li class="stage failed">Failed</li>' : "";
  return `<ol class="stages">${items}${failure}</ol>`;
}

export function renderProtocolPanel(protocolText: string): string {
  const blocks = splitProtocol(protocolText);
  const nav = claimIndex(blocks)
    .map((c) => `<a href="#${c.anchor}">${escapeHtml(c.label)}</a>`)
    .join(" ");
  const body = blocks
    .map((b) => {
      const id = b.anchor ? ` id="${b.anchor}"` : "";
      return `<p${id}>${escapeHtml(b.text).replace(/\n/g, "<br>")}</p>`;
    })
    .join("");
  return `<nav class="claim-index">${nav}</nav><div class="protocol-body">${body}</div>`;
}

export function renderError(state: ChatState): string {
  if (!state.errorText) return "";
  const retry = state.phase === "error" ? '<button id="retry">Retry</button>' : "";
  return `<div class="error">${escapeHtml(state.errorText)} ${retry}</div>`;
}

export interface AppElements {
  messages: HTMLElement;
  stages: HTMLElement;
  error: HTMLElement;
  input: HTMLTextAreaElement;
  send: HTMLButtonElement;
  panels: HTMLElement;
  mapPanel: HTMLElement;
  protocolPanel: HTMLElement;
}

export class App {
  private lastProblem = "";

  constructor(
    private els: AppElements,
    private api: ApiClient = new ApiClient(),
    private store: ChatStore = new ChatStore(),
  ) {
    store.subscribe((state) => this.render(state));
    els.send.addEventListener("click", () => this.onSend());
    els.input.addEventListener("keydown", (e) => {
      if (e.key === "Enter" && !e.shiftKey) {
        e.preventDefault();
        this.onSend();
      }
    });
    els.error.addEventListener("click", (e) => {
      if ((e.target as HTMLElement).id === "retry") this.retry();
    });
  }

  private render(state: ChatState): void {
    this.els.messages.innerHTML = renderMessages(state);
    this.els.stages.innerHTML = renderStageIndicator(state);
    this.els.error.innerHTML = renderError(state);
    const enabled = this.store.inputEnabled;
    this.els.input.disabled = !enabled;
    this.els.send.disabled = !enabled;
    this.els.panels.hidden = state.mapSvg === null && state.protocolText === null;
    this.els.messages.scrollTop = this.els.messages.scrollHeight;
  }

  private onSend(): void {
    const text = this.els.input.value.trim();
    if (!text || !this.store.inputEnabled) return;
    this.els.input.value = "";
    if (this.store.current.phase === "terminal") {
      void this.sendFollowup(text);
    } else {
      void this.submit(text);
    }
  }

  private retry(): void {
    if (this.lastProblem) {
      this.store.reset();
      void this.submit(this.lastProblem);
    }
  }

  private async submit(problem: string): Promise<void> {
    this.lastProblem = problem;
    this.store.submitProblem(problem);
    let sessionId: string;
    try {
      sessionId = await this.api.createSession(problem);
    } catch (err) {
      this.store.submitFailed(
        err instanceof ApiError ? err.detail : "service unreachable",
      );
      return;
    }
    this.store.sessionCreated(sessionId);
    subscribeToEvents(this.api.eventsUrl(sessionId), {
      onEvent: (event) => {
        this.store.connectionRestored();
        this.store.applyEvent(event);
        if (event.stage === "Delivered" || event.stage === "Failed") {
          void this.loadPanels(sessionId);
        }
      },
      onConnectionLoss: () => this.store.connectionLost(),
    });
  }

  private async loadPanels(sessionId: string): Promise<void> {
    let mapSvg: string | null = null;
    try {
      mapSvg = await this.api.getMapSvg(sessionId);
    } catch {
      mapSvg = null; // suspension sessions have no map
    }
    let protocolText = "";
    try {
      protocolText = await this.api.getProtocol(sessionId);
    } catch (err) {
      protocolText = err instanceof ApiError ? `(protocol unavailable: ${err.detail})` : "";
    }
    this.store.panelsLoaded(mapSvg, protocolText);
    this.renderPanels(mapSvg, protocolText);
  }

  private renderPanels(mapSvg: string | null, protocolText: string): void {
    if (mapSvg) {
      this.els.mapPanel.innerHTML =
        `<details open><summary>Argument map</summary><div class="map-holder">${mapSvg}</div></details>`;
      const svg = this.els.mapPanel.querySelector("svg");
      if (svg) bindPanZoom(svg as SVGSVGElement, mapSvg);
    } else {
      this.els.mapPanel.innerHTML = "";
    }
    this.els.protocolPanel.innerHTML =
      `<details><summary>Reasoning protocol</summary>${renderProtocolPanel(protocolText)}</details>`;
  }

  private async sendFollowup(question: string): Promise<void> {
    const sessionId = this.store.current.sessionId;
    if (!sessionId) return;
    this.store.followupSent(question);
    try {
      const answer = await this.api.followup(sessionId, question);
      this.store.followupAnswered(answer);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.store.followupFailed("The deliberation is still running; try again shortly.");
      } else {
        this.store.followupFailed(
          err instanceof ApiError ? err.detail : "follow-up failed",
        );
      }
    }
  }
}

export function bindPanZoom(svg: SVGSVGElement, svgText: string): void {
  let vb = initialViewBox(svgText);
  svg.setAttribute("viewBox", format(vb));
  svg.style.cursor = "grab";
  let dragging = false;
  let lastX = 0;
  let lastY = 0;

  svg.addEventListener("mousedown", (e) => {
    dragging = true;
    lastX = e.clientX;
    lastY = e.clientY;
    svg.style.cursor = "grabbing";
  });
  svg.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    vb = pan(vb, e.clientX - lastX, e.clientY - lastY, svg.clientWidth, svg.clientHeight);
    lastX = e.clientX;
    lastY = e.clientY;
    svg.setAttribute("viewBox", format(vb));
  });
  const stop = () => {
    dragging = false;
    svg.style.cursor = "grab";
  };
  svg.addEventListener("mouseup", stop);
  svg.addEventListener("mouseleave", stop);
  svg.addEventListener("wheel", (e) => {
    e.preventDefault();
    const factor = e.deltaY < 0 ? 1 / 1.15 : 1.15;
    vb = zoom(vb, factor, e.offsetX / svg.clientWidth, e.offsetY / svg.clientHeight);
    svg.setAttribute("viewBox", format(vb));
  });
}
