import { describe, expect, it } from "vitest";
import { boardModel } from "../src/board";
import createPrec from "./fixtures/create_prec.json";
import createKq1 from "./fixtures/create_kq1.json";
import type { PlanState } from "../src/types";

const grid = createPrec.grid;
const start = createPrec.plan_states[0] as PlanState;

describe("board paint model", () => {
  it("covers every grid cell exactly once", () => {
    const m = boardModel(grid, { state: start });
    expect(m.rows).toBe(6);
    expect(m.cols).toBe(9);
    expect(m.cells).toHaveLength(54);
    const seen = new Set(m.cells.map((c) => `${c.row},${c.col}`));
    expect(seen.size).toBe(54);
  });

  it("distinguishes walls from floor", () => {
    const m = boardModel(grid, { state: start });
    const at = (r: number, c: number) => m.cells.find((x) => x.row === r && x.col === c)!;
    expect(at(0, 0).fill).not.toBe(at(3, 1).fill);
  });

  it("renders the switch tile from state, not from the grid", () => {
    const off = boardModel(grid, { state: { ...start, switch_on: false } });
    const on = boardModel(grid, { state: { ...start, switch_on: true } });
    const tile = (m: typeof off) => m.cells.find((c) => c.row === 1 && c.col === 7)!;
    expect(tile(off).glyph).not.toBe(tile(on).glyph);
    expect(tile(on).glyphColor).not.toBe(tile(off).glyphColor);
  });

  it("overlays agent and box sprites at their state positions", () => {
    const m = boardModel(grid, { state: start });
    const kinds = m.sprites.map((s) => s.kind);
    expect(kinds).toContain("agent");
    expect(kinds).toContain("box");
    expect(m.sprites.find((s) => s.kind === "agent")!.cell).toEqual([3, 1]);
    expect(m.sprites.find((s) => s.kind === "box")!.cell).toEqual([3, 2]);
    // agent paints last so it is never hidden under furniture
    expect(kinds[kinds.length - 1]).toBe("agent");
  });

  it("shows a living hazard and drops a dead one", () => {
    const kqStart = createKq1.plan_states[0] as PlanState;
    const alive = boardModel(createKq1.grid, { state: kqStart });
    const hazard = alive.sprites.find((s) => s.kind === "hazard");
    expect(hazard).toBeDefined();
    expect(hazard!.cell).toEqual([8, 5]);
    expect(hazard!.label).toBe("skull");

    const dead = boardModel(createKq1.grid, {
      state: { ...kqStart, hazard: { ...kqStart.hazard!, alive: false } },
    });
    expect(dead.sprites.find((s) => s.kind === "hazard")).toBeUndefined();
  });

  it("carries highlight and badges through untouched", () => {
    const m = boardModel(grid, {
      state: start,
      highlight: [3, 2],
      badges: [{ cell: [3, 3], text: "≥10" }],
    });
    expect(m.highlight).toEqual([3, 2]);
    expect(m.badges).toEqual([{ cell: [3, 3], text: "≥10" }]);
  });

  it("is a pure view: identical inputs give identical models", () => {
    const a = boardModel(grid, { state: start, highlight: [1, 1] });
    const b = boardModel(grid, { state: start, highlight: [1, 1] });
    expect(a).toEqual(b);
  });
});
