import { beforeEach, describe, expect, it } from "vitest";
import { conceptChips, renderExplanation } from "../src/explanation";
import type { FoilResponse } from "../src/types";
import foilPrec from "./fixtures/foil_prec.json";
import foilCost from "./fixtures/foil_cost.json";
import foilCell from "./fixtures/foil_cell.json";
import foilKqA from "./fixtures/foil_kq_a.json";
import foilKqB from "./fixtures/foil_kq_b.json";
import foilKqC from "./fixtures/foil_kq_c.json";
import foilKqD from "./fixtures/foil_kq_d.json";
import foilKqAttack from "./fixtures/foil_kq_attack.json";
import foilPreferred from "./fixtures/foil_preferred.json";
import foilInsufficient from "./fixtures/foil_insufficient.json";

// One response per bundled foil asset (the switch foil on both of its map
// variants), plus the preferred and insufficiency outcomes.
const BUNDLED: Array<[string, FoilResponse]> = [
  ["switch foil on the precondition variant", foilPrec as FoilResponse],
  ["switch foil on the cost variant", foilCost as FoilResponse],
  ["pink-cell foil", foilCell as FoilResponse],
  ["key-quest foil a", foilKqA as FoilResponse],
  ["key-quest foil b", foilKqB as FoilResponse],
  ["key-quest foil c", foilKqC as FoilResponse],
  ["key-quest foil d", foilKqD as FoilResponse],
  ["key-quest attack foil", foilKqAttack as FoilResponse],
  ["plan-as-foil (preferred)", foilPreferred as FoilResponse],
  ["stripped-vocabulary foil", foilInsufficient as FoilResponse],
];

let panel: HTMLElement;

beforeEach(() => {
  panel = document.createElement("div");
  document.body.appendChild(panel);
});

describe("verdict sentence fidelity", () => {
  for (const [label, response] of BUNDLED) {
    it(`displays the engine's sentence byte-equal: ${label}`, () => {
      renderExplanation(panel, response);
      const sentence = panel.querySelector("p.sentence");
      expect(sentence).not.toBeNull();
      expect(sentence!.textContent).toBe(response.rendered_text);
    });
  }

  it("never rebuilds the sentence from payload fields", () => {
    // a response whose sentence deliberately disagrees with its payload must
    // be shown verbatim — the engine's words are the contract
    const tampered = {
      ...(foilPrec as FoilResponse),
      rendered_text: "An utterly custom sentence from the engine.",
    };
    renderExplanation(panel, tampered);
    expect(panel.querySelector("p.sentence")!.textContent).toBe(
      "An utterly custom sentence from the engine.",
    );
  });
});

describe("explanation panel structure", () => {
  it("shows the failing concept as a chip with a confidence badge", () => {
    renderExplanation(panel, foilPrec as FoilResponse);
    const chips = [...panel.querySelectorAll(".concept-chip")].map((c) => c.textContent);
    expect(chips).toEqual(["switch_on"]);
    const badge = panel.querySelector(".confidence-badge");
    expect(badge).not.toBeNull();
    expect(badge!.textContent).toContain("1.000");
    expect(badge!.className).toContain("confidence-high");
  });

  it("charts the posterior trace with one vertex per sample", () => {
    renderExplanation(panel, foilPrec as FoilResponse);
    const poly = panel.querySelector(".chart-box polyline");
    expect(poly).not.toBeNull();
    const n = poly!.getAttribute("points")!.trim().split(/\s+/).length;
    expect(n).toBe((foilPrec.trace as number[]).length);
  });

  it("lists rival hypotheses with their elimination ordinals", () => {
    renderExplanation(panel, foilPrec as FoilResponse);
    const rows = panel.querySelectorAll(".rival-table tr");
    expect(rows.length).toBe((foilPrec.explanation.rivals?.length ?? 0) + 1);
  });

  it("tables the cost entries and totals for a costlier foil", () => {
    renderExplanation(panel, foilCost as FoilResponse);
    const rows = [...panel.querySelectorAll(".cost-table tr")].slice(1);
    expect(rows).toHaveLength(foilCost.explanation.entries.length);
    const bounds = rows.map((rw) => rw.querySelector(".cost-bound")!.textContent);
    expect(bounds).toEqual(foilCost.explanation.entries.map((e) => e.min_cost.toString()));
    expect(panel.querySelector(".cost-verdict")!.textContent).toContain("20 vs plan cost 18");
    expect(panel.querySelector(".chart-box")).toBeNull(); // no trace on cost answers
  });

  it("deduplicates concept chips across cost entries", () => {
    // both push entries carry not_switch_on; it must appear as one chip,
    // followed by the goal entry's own concept
    expect(conceptChips(foilCost as FoilResponse)).toEqual(["not_switch_on", "box_on_right"]);
    expect(conceptChips(foilKqAttack as FoilResponse)).toContain("skull_on_left");
  });

  it("shows the insufficiency banner with a vocabulary link", () => {
    renderExplanation(panel, foilInsufficient as FoilResponse);
    const banner = panel.querySelector(".insufficiency-banner");
    expect(banner).not.toBeNull();
    const link = banner!.querySelector("a");
    expect(link!.getAttribute("href")).toBe("#vocabulary");
    expect(panel.querySelector(".concept-chip")).toBeNull();
    expect(panel.querySelector(".confidence-badge")).toBeNull();
  });

  it("renders a preferred foil without chips, badge or chart", () => {
    renderExplanation(panel, foilPreferred as FoilResponse);
    expect(panel.querySelector(".concept-chip")).toBeNull();
    expect(panel.querySelector(".confidence-badge")).toBeNull();
    expect(panel.querySelector(".chart-box")).toBeNull();
    expect(panel.querySelector(".kind-tag")!.className).toContain("foil-preferred");
  });

  it("re-rendering replaces the previous answer completely", () => {
    renderExplanation(panel, foilPrec as FoilResponse);
    renderExplanation(panel, foilPreferred as FoilResponse);
    expect(panel.querySelectorAll("p.sentence")).toHaveLength(1);
    expect(panel.querySelector("p.sentence")!.textContent).toBe(foilPreferred.rendered_text);
  });
});
