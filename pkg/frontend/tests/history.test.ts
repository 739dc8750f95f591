import { beforeEach, describe, expect, it } from "vitest";
import { renderHistory } from "../src/explanation";
import sessionAfter3 from "./fixtures/session_after_3.json";
import type { HistoryEntry } from "../src/types";

const history = sessionAfter3.history as HistoryEntry[];

let panel: HTMLElement;

beforeEach(() => {
  panel = document.createElement("div");
});

describe("history panel", () => {
  it("shows an empty hint before any foil", () => {
    renderHistory(panel, []);
    expect(panel.querySelector(".history-empty")).not.toBeNull();
    expect(panel.querySelectorAll(".history-item")).toHaveLength(0);
  });

  it("renders one item per server history entry, in server order", () => {
    renderHistory(panel, history);
    const items = [...panel.querySelectorAll(".history-item")];
    expect(items).toHaveLength(history.length);
    items.forEach((item, i) => {
      expect(item.querySelector(".history-foil")!.textContent).toBe(history[i].foil.join(" "));
      expect(item.querySelector(".history-text")!.textContent).toBe(history[i].rendered_text);
      expect(item.querySelector(".kind-tag")!.textContent).toBe(history[i].explanation.kind);
    });
  });

  it("carries each stored sentence byte-equal", () => {
    renderHistory(panel, history);
    const texts = [...panel.querySelectorAll(".history-text")].map((n) => n.textContent);
    expect(texts).toEqual(history.map((h) => h.rendered_text));
  });

  it("re-renders from scratch on every update", () => {
    renderHistory(panel, history.slice(0, 1));
    renderHistory(panel, history);
    expect(panel.querySelectorAll(".history-item")).toHaveLength(history.length);
  });
});
