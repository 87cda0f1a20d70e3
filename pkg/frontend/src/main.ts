import { ApiClient } from "./api.js";
import { App } from "./ui.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

// Same-origin by default; override with ?api=http://host:port for dev.
const apiBase = new URLSearchParams(location.search).get("api") ?? "";

new App(
  {
    messages: el("messages"),
    stages: el("stages"),
    error: el("error"),
    input: el<HTMLTextAreaElement>("input"),
    send: el<HTMLButtonElement>("send"),
    panels: el("panels"),
    mapPanel: el("map-panel"),
    protocolPanel: el("protocol-panel"),
  },
  new ApiClient(apiBase),
);
