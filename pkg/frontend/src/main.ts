import { ApiClient, ServiceError } from "./api";
import { renderGrid, renderMeasures } from "./grid";
import {
  canZoom,
  initialState,
  selectionCells,
  selectRect,
  withError,
  withSnapshot,
  type ViewState,
} from "./state";
import type { ConfigPayload } from "./types";

const api = new ApiClient("");
let state: ViewState = initialState();
let config: ConfigPayload | null = null;

const gridEl = document.getElementById("grid") as HTMLElement;
const crumbsEl = document.getElementById("breadcrumb") as HTMLElement;
const measuresEl = document.getElementById("measures") as HTMLElement;
const zoomButton = document.getElementById("zoom") as HTMLButtonElement;
const bannerEl = document.getElementById("banner") as HTMLElement;
const titleEl = document.getElementById("title") as HTMLElement;

function redraw(): void {
  if (config && state.snapshot) {
    renderGrid(gridEl, state, config, {
      onDragSelect(c0, r0, c1, r1) {
        state = selectRect(state, { c0, r0, c1, r1 });
        redraw();
      },
    });
  }
  renderMeasures(measuresEl, state.snapshot);
  renderBreadcrumb();
  zoomButton.disabled = !canZoom(state);
  bannerEl.textContent = state.error ?? "";
  bannerEl.style.display = state.error ? "block" : "none";
}

function renderBreadcrumb(): void {
  crumbsEl.textContent = "";
  state.breadcrumb.forEach((node, index) => {
    const button = document.createElement("button");
    button.textContent = index === 0 ? "root" : `level ${index}`;
    button.disabled = state.busy || index === state.breadcrumb.length - 1;
    button.addEventListener("click", () => {
      void goTo(node);
    });
    crumbsEl.appendChild(button);
    if (index < state.breadcrumb.length - 1) {
      crumbsEl.appendChild(document.createTextNode(" › "));
    }
  });
}

async function goTo(node: string): Promise<void> {
  if (state.busy) return;
  state = { ...state, busy: true };
  redraw();
  try {
    state = withSnapshot(state, await api.layout(node));
  } catch (err) {
    state = withError(state, describe(err));
  }
  redraw();
}

async function zoomIn(): Promise<void> {
  if (!canZoom(state) || !state.snapshot) return;
  const cells = selectionCells(state);
  const node = state.snapshot.node;
  state = { ...state, busy: true };
  redraw();
  try {
    state = withSnapshot(state, await api.zoom(node, cells));
  } catch (err) {
    state = withError(state, describe(err));
  }
  redraw();
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) {
    return `${err.code}: ${err.message}`;
  }
  return String(err);
}

zoomButton.addEventListener("click", () => {
  void zoomIn();
});

async function start(): Promise<void> {
  try {
    config = await api.config();
    titleEl.textContent = `gridweave explorer — ${config.pipeline} on ${config.grid.w}x${config.grid.h}`;
    state = withSnapshot(state, await api.layout("root"));
  } catch (err) {
    state = withError(state, describe(err));
  }
  redraw();
}

void start();
