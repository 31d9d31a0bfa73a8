import { describe, expect, it } from "vitest";

import {
  boundaryKeys,
  breadcrumbTarget,
  canZoom,
  cellKey,
  initialState,
  selectionCells,
  selectRect,
  withError,
  withSnapshot,
} from "./state";
import type { LayoutPayload } from "./types";

function payload(cells: Array<[number, number, string]>, node = "root"): LayoutPayload {
  return {
    node,
    parent: null,
    grid: { w: 4, h: 4 },
    cells: cells.map(([col, row, cluster]) => ({
      col,
      row,
      sample: `s${col}_${row}`,
      cluster,
      meta: null,
      assigned: [],
    })),
    breadcrumb: [node],
    report: {
      proximity: 1,
      compactness: 1,
      area_ratio: 1,
      triple_ratio: 1,
      perimeter_ratio: 1,
      cut_ratio: 1,
      raw: { prox2: 0, comp: 0 },
    },
  };
}

describe("selection", () => {
  it("selects the single cell under a point rectangle", () => {
    const state = withSnapshot(initialState(), payload([[1, 1, "a"], [2, 2, "b"]]));
    const next = selectRect(state, { c0: 1, r0: 1, c1: 1, r1: 1 });
    expect([...next.selection]).toEqual([cellKey(1, 1)]);
    expect(canZoom(next)).toBe(true);
  });

  it("excludes empty cells: selection only covers assigned cells", () => {
    const state = withSnapshot(initialState(), payload([[0, 0, "a"]]));
    const next = selectRect(state, { c0: 1, r0: 1, c1: 3, r1: 3 });
    expect(next.selection.size).toBe(0);
    expect(canZoom(next)).toBe(false);
  });

  it("normalizes inverted drag rectangles and covers the full grid", () => {
    const cells: Array<[number, number, string]> = [];
    for (let c = 0; c < 4; c++) for (let r = 0; r < 4; r++) cells.push([c, r, "a"]);
    const state = withSnapshot(initialState(), payload(cells));
    const next = selectRect(state, { c0: 3, r0: 3, c1: 0, r1: 0 });
    expect(next.selection.size).toBe(16);
    expect(selectionCells(next)).toHaveLength(16);
    expect(selectionCells(next)[0]).toEqual([0, 0]);
  });
});

describe("snapshot and errors", () => {
  it("withSnapshot resets selection and adopts the payload breadcrumb", () => {
    let state = withSnapshot(initialState(), payload([[0, 0, "a"]]));
    state = selectRect(state, { c0: 0, r0: 0, c1: 0, r1: 0 });
    const child = payload([[1, 1, "a"]], "root/1");
    child.breadcrumb = ["root", "root/1"];
    state = withSnapshot(state, child);
    expect(state.selection.size).toBe(0);
    expect(state.breadcrumb).toEqual(["root", "root/1"]);
  });

  it("withError keeps the snapshot on screen", () => {
    const loaded = withSnapshot(initialState(), payload([[0, 0, "a"]]));
    const errored = withError({ ...loaded, busy: true }, "invalid_selection: empty");
    expect(errored.snapshot).not.toBeNull();
    expect(errored.busy).toBe(false);
    expect(errored.error).toContain("invalid_selection");
  });

  it("busy state disables zoom regardless of selection", () => {
    let state = withSnapshot(initialState(), payload([[0, 0, "a"]]));
    state = selectRect(state, { c0: 0, r0: 0, c1: 0, r1: 0 });
    expect(canZoom({ ...state, busy: true })).toBe(false);
  });
});

describe("breadcrumb", () => {
  it("targets ancestors by index", () => {
    const state = { ...initialState(), breadcrumb: ["root", "root/1", "root/1/2"] };
    expect(breadcrumbTarget(state, 0)).toBe("root");
    expect(breadcrumbTarget(state, 2)).toBe("root/1/2");
    expect(breadcrumbTarget(state, 3)).toBeNull();
  });
});

describe("boundary outline", () => {
  it("marks cells with differently-clustered neighbors only", () => {
    const snap = payload([
      [0, 0, "a"],
      [1, 0, "a"],
      [2, 0, "b"],
      [3, 0, "b"],
    ]);
    const keys = boundaryKeys(snap);
    expect(keys.has(cellKey(1, 0))).toBe(true);
    expect(keys.has(cellKey(2, 0))).toBe(true);
    expect(keys.has(cellKey(0, 0))).toBe(false);
    expect(keys.has(cellKey(3, 0))).toBe(false);
  });

  it("treats empty neighbors as no boundary", () => {
    const snap = payload([
      [0, 0, "a"],
      [2, 0, "b"],
    ]);
    expect(boundaryKeys(snap).size).toBe(0);
  });
});
