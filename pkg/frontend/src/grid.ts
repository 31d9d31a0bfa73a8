import { boundaryKeys, cellKey, type ViewState } from "./state";
import type { ConfigPayload, LayoutPayload } from "./types";

const CELL_PX = 22;

export interface GridCallbacks {
  onDragSelect(c0: number, r0: number, c1: number, r1: number): void;
}

/** Render the snapshot as a colored grid with hover tooltips and a drag box. */
export function renderGrid(
  container: HTMLElement,
  state: ViewState,
  config: ConfigPayload,
  callbacks: GridCallbacks,
): void {
  container.textContent = "";
  const payload = state.snapshot;
  if (!payload) {
    return;
  }
  const { w, h } = payload.grid;
  container.style.position = "relative";
  container.style.width = `${w * CELL_PX}px`;
  container.style.height = `${h * CELL_PX}px`;
  container.style.background = "#ffffff";
  container.style.border = "1px solid #999";

  const outlined = boundaryKeys(payload);
  for (const cell of payload.cells) {
    const div = document.createElement("div");
    const key = cellKey(cell.col, cell.row);
    div.className = "cell";
    div.style.position = "absolute";
    div.style.left = `${cell.col * CELL_PX}px`;
    div.style.top = `${cell.row * CELL_PX}px`;
    div.style.width = `${CELL_PX - 1}px`;
    div.style.height = `${CELL_PX - 1}px`;
    div.style.background = config.palette[cell.cluster] ?? "#444";
    if (outlined.has(key)) {
      div.style.outline = "1.5px solid #222";
      div.style.outlineOffset = "-1.5px";
    }
    if (state.selection.has(key)) {
      div.style.boxShadow = "inset 0 0 0 3px #000";
    }
    const meta = cell.meta
      ? Object.entries(cell.meta)
          .map(([k, v]) => `${k}=${v}`)
          .join(", ")
      : "";
    div.title = `${cell.sample} (${cell.cluster})${
      cell.assigned.length ? ` +${cell.assigned.length} hidden` : ""
    }${meta ? `\n${meta}` : ""}`;
    container.appendChild(div);
  }

  attachDragSelection(container, callbacks);
}

function attachDragSelection(container: HTMLElement, callbacks: GridCallbacks): void {
  let start: [number, number] | null = null;
  let box: HTMLDivElement | null = null;

  const toCell = (event: MouseEvent): [number, number] => {
    const rect = container.getBoundingClientRect();
    const col = Math.floor((event.clientX - rect.left) / CELL_PX);
    const row = Math.floor((event.clientY - rect.top) / CELL_PX);
    return [col, row];
  };

  container.addEventListener("mousedown", (event) => {
    start = toCell(event);
    box = document.createElement("div");
    box.style.position = "absolute";
    box.style.border = "2px dashed #000";
    box.style.pointerEvents = "none";
    container.appendChild(box);
    event.preventDefault();
  });
  container.addEventListener("mousemove", (event) => {
    if (!start || !box) return;
    const [c1, r1] = toCell(event);
    const cmin = Math.min(start[0], c1);
    const rmin = Math.min(start[1], r1);
    box.style.left = `${cmin * CELL_PX}px`;
    box.style.top = `${rmin * CELL_PX}px`;
    box.style.width = `${(Math.abs(c1 - start[0]) + 1) * CELL_PX}px`;
    box.style.height = `${(Math.abs(r1 - start[1]) + 1) * CELL_PX}px`;
  });
  const finish = (event: MouseEvent) => {
    if (!start) return;
    const [c1, r1] = toCell(event);
    callbacks.onDragSelect(start[0], start[1], c1, r1);
    start = null;
    box?.remove();
    box = null;
  };
  container.addEventListener("mouseup", finish);
  container.addEventListener("mouseleave", (event) => {
    if (start) finish(event);
  });
}

export function renderMeasures(panel: HTMLElement, payload: LayoutPayload | null): void {
  panel.textContent = "";
  if (!payload) return;
  const rows: Array<[string, number]> = [
    ["proximity", payload.report.proximity],
    ["compactness", payload.report.compactness],
    ["area ratio", payload.report.area_ratio],
    ["triple ratio", payload.report.triple_ratio],
    ["perimeter ratio", payload.report.perimeter_ratio],
    ["cut ratio", payload.report.cut_ratio],
  ];
  const list = document.createElement("dl");
  for (const [name, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = name;
    const dd = document.createElement("dd");
    dd.textContent = value.toFixed(3);
    list.append(dt, dd);
  }
  panel.appendChild(list);
}
