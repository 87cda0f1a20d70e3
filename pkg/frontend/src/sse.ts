// Step-event subscription over SSE with reconnect bookkeeping.
//
// The browser's EventSource already reconnects and replays the `id:` field
// as Last-Event-ID; this wrapper adds the two behaviors the UI needs on
// top: duplicate suppression by sequence number (a resumed stream must not
// re-render stages) and closing the source once the terminal event arrives
// (the server ends the stream there, which EventSource would otherwise
// treat as a dropped connection and retry forever).

import type { StepEvent } from "./types.js";
import { TERMINAL_STAGES } from "./types.js";

export interface EventSourceLike {
  addEventListener(type: string, listener: (event: MessageEvent) => void): void;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface Subscription {
  close(): void;
}

export interface SubscribeOptions {
  onEvent: (event: StepEvent) => void;
  onConnectionLoss?: () => void;
  factory?: EventSourceFactory;
}

export function subscribeToEvents(url: string, options: SubscribeOptions): Subscription {
  const factory: EventSourceFactory =
    options.factory ?? ((u) => new EventSource(u) as unknown as EventSourceLike);
  const source = factory(url);
  let lastSeq = -1;
  let closed = false;

  const close = () => {
    if (!closed) {
      closed = true;
      source.close();
    }
  };

  source.addEventListener("step", (message) => {
    let event: StepEvent;
    try {
      event = JSON.parse(message.data as string) as StepEvent;
    } catch {
      return;
    }
    if (event.seq <= lastSeq) {
      return; // replayed after reconnect
    }
    lastSeq = event.seq;
    options.onEvent(event);
    if (TERMINAL_STAGES.has(event.stage)) {
      close();
    }
  });

  source.addEventListener("error", () => {
    if (!closed && options.onConnectionLoss) {
      options.onConnectionLoss();
    }
  });

  return { close };
}
