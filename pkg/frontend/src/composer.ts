// Foil builder. Keyboard contract:
//   arrow keys          append move-up / move-down / move-left / move-right
//   shift + arrow keys  append push-* in the same direction
//   Backspace / Delete  remove the last action
//   Enter               submit
// Anything not coverable by arrows (climb, attack, ...) comes in through the
// action palette buttons or the free-text entry. The builder locks while a
// submission is in flight — one foil at a time per session.

const ARROW_DIRS: Record<string, string> = {
  ArrowUp: "up",
  ArrowDown: "down",
  ArrowLeft: "left",
  ArrowRight: "right",
};

export type ComposerEvent = "change" | "submit";

export class Composer {
  actions: string[] = [];
  locked = false;
  private listeners: Record<ComposerEvent, Array<() => void>> = { change: [], submit: [] };

  on(event: ComposerEvent, fn: () => void): void {
    this.listeners[event].push(fn);
  }

  private emit(event: ComposerEvent): void {
    for (const fn of this.listeners[event]) fn();
  }

  append(label: string): void {
    if (this.locked) return;
    this.actions.push(label);
    this.emit("change");
  }

  removeLast(): void {
    if (this.locked || this.actions.length === 0) return;
    this.actions.pop();
    this.emit("change");
  }

  clear(): void {
    if (this.locked) return;
    this.actions = [];
    this.emit("change");
  }

  /** Lock for the duration of a submission; unlock when the answer lands. */
  lock(): void {
    this.locked = true;
    this.emit("change");
  }

  unlock(): void {
    this.locked = false;
    this.emit("change");
  }

  /**
   * Translate a keydown into a builder edit. Returns true when the key was
   * consumed (callers should preventDefault then).
   */
  handleKey(e: Pick<KeyboardEvent, "key" | "shiftKey">): boolean {
    const dir = ARROW_DIRS[e.key];
    if (dir !== undefined) {
      this.append(e.shiftKey ? `push-${dir}` : `move-${dir}`);
      return true;
    }
    if (e.key === "Backspace" || e.key === "Delete") {
      this.removeLast();
      return true;
    }
    if (e.key === "Enter") {
      if (!this.locked && this.actions.length > 0) this.emit("submit");
      return true;
    }
    return false;
  }
}

/**
 * Action labels worth offering as palette buttons: every distinct label the
 * plan uses beyond the arrow-reachable move/push family.
 */
export function paletteLabels(plan: string[]): string[] {
  const arrows = new Set(
    ["up", "down", "left", "right"].flatMap((d) => [`move-${d}`, `push-${d}`]),
  );
  const seen = new Set<string>();
  const out: string[] = [];
  for (const label of plan) {
    if (!arrows.has(label) && !seen.has(label)) {
      seen.add(label);
      out.push(label);
    }
  }
  return out;
}
