import type { Cell, PlanState } from "./types";

// Cosmetic replay of a composed foil, so the user sees roughly where their
// alternative leads while they type it. This is optimistic rendering only:
// it knows walls and box pushing, nothing else. Validity, costs and the real
// trajectory come exclusively from the engine, and the board is re-rendered
// from the server's answer the moment one arrives.

const DELTAS: Record<string, Cell> = {
  up: [-1, 0],
  down: [1, 0],
  left: [0, -1],
  right: [0, 1],
};

function wallAt(grid: string[], [r, c]: Cell): boolean {
  const row = grid[r];
  if (row === undefined) return true;
  const ch = row[c];
  return ch === undefined || ch === "#";
}

function sameCell(a: Cell | undefined, b: Cell): boolean {
  return a !== undefined && a[0] === b[0] && a[1] === b[1];
}

function cloneState(state: PlanState): PlanState {
  return {
    agent: [...state.agent] as Cell,
    ...(state.box ? { box: [...state.box] as Cell } : {}),
    ...(state.switch_on !== undefined ? { switch_on: state.switch_on } : {}),
    ...(state.hazard ? { hazard: { ...state.hazard, pos: [...state.hazard.pos] as Cell } } : {}),
  };
}

/** One cosmetic step. Unknown action mnemonics leave the state unchanged. */
export function applyAction(grid: string[], state: PlanState, label: string): PlanState {
  const next = cloneState(state);
  const m = /^(move|push)-(up|down|left|right)$/.exec(label);
  if (!m) return next;

  const [dr, dc] = DELTAS[m[2]];
  const target: Cell = [state.agent[0] + dr, state.agent[1] + dc];
  if (wallAt(grid, target)) return next;

  if (sameCell(state.box, target)) {
    if (m[1] !== "push") return next; // walking into the box goes nowhere
    const beyond: Cell = [target[0] + dr, target[1] + dc];
    if (wallAt(grid, beyond)) return next;
    next.box = beyond;
    next.agent = target;
  } else {
    next.agent = target;
  }

  if (next.switch_on !== undefined && grid[next.agent[0]]?.[next.agent[1]] === "G") {
    // stepping on the switch tile flips it; close enough for a preview
    if (!sameCell(state.agent, next.agent)) next.switch_on = !next.switch_on;
  }
  return next;
}

/** States after each prefix of `actions`: index 0 is the start state. */
export function replay(grid: string[], start: PlanState, actions: string[]): PlanState[] {
  const states: PlanState[] = [cloneState(start)];
  for (const label of actions) {
    states.push(applyAction(grid, states[states.length - 1], label));
  }
  return states;
}
