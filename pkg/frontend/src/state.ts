import type { CellRecord, LayoutPayload } from "./types";

export interface ViewState {
  snapshot: LayoutPayload | null;
  breadcrumb: string[];
  selection: Set<string>;
  busy: boolean;
  error: string | null;
}

export function initialState(): ViewState {
  return { snapshot: null, breadcrumb: [], selection: new Set(), busy: false, error: null };
}

export function cellKey(col: number, row: number): string {
  return `${col},${row}`;
}

/** Replace the snapshot after a load/zoom/navigation; selection resets. */
export function withSnapshot(state: ViewState, payload: LayoutPayload): ViewState {
  return {
    ...state,
    snapshot: payload,
    breadcrumb: payload.breadcrumb,
    selection: new Set(),
    busy: false,
    error: null,
  };
}

export function withError(state: ViewState, message: string): ViewState {
  // Errors surface inline; the current snapshot stays on screen.
  return { ...state, busy: false, error: message };
}

export interface DragRect {
  c0: number;
  r0: number;
  c1: number;
  r1: number;
}

/** Selection = assigned cells intersecting the dragged rectangle. */
export function selectRect(state: ViewState, rect: DragRect): ViewState {
  if (!state.snapshot) {
    return state;
  }
  const cmin = Math.min(rect.c0, rect.c1);
  const cmax = Math.max(rect.c0, rect.c1);
  const rmin = Math.min(rect.r0, rect.r1);
  const rmax = Math.max(rect.r0, rect.r1);
  const selection = new Set<string>();
  for (const cell of state.snapshot.cells) {
    if (cell.col >= cmin && cell.col <= cmax && cell.row >= rmin && cell.row <= rmax) {
      selection.add(cellKey(cell.col, cell.row));
    }
  }
  return { ...state, selection };
}

export function canZoom(state: ViewState): boolean {
  return !state.busy && state.selection.size > 0;
}

export function selectionCells(state: ViewState): Array<[number, number]> {
  return [...state.selection]
    .map((key) => key.split(",").map(Number) as [number, number])
    .sort((a, b) => a[0] - b[0] || a[1] - b[1]);
}

/** Breadcrumb target for go_to(index); the crumb list truncates on load. */
export function breadcrumbTarget(state: ViewState, index: number): string | null {
  if (index < 0 || index >= state.breadcrumb.length) {
    return null;
  }
  return state.breadcrumb[index];
}

/** Cells with a differently-clustered neighbor in their 3x3 region (visual
 * outline only; the service owns all layout math). */
export function boundaryKeys(payload: LayoutPayload): Set<string> {
  const byKey = new Map<string, CellRecord>();
  for (const cell of payload.cells) {
    byKey.set(cellKey(cell.col, cell.row), cell);
  }
  const out = new Set<string>();
  for (const cell of payload.cells) {
    outer: for (let dc = -1; dc <= 1; dc++) {
      for (let dr = -1; dr <= 1; dr++) {
        if (dc === 0 && dr === 0) continue;
        const nb = byKey.get(cellKey(cell.col + dc, cell.row + dr));
        if (nb && nb.cluster !== cell.cluster) {
          out.add(cellKey(cell.col, cell.row));
          break outer;
        }
      }
    }
  }
  return out;
}
