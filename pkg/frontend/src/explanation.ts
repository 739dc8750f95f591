import { traceChart } from "./chart";
import type { FoilResponse, HistoryEntry } from "./types";

// Explanation panel. The verdict sentence is the engine's rendered_text,
// inserted as a text node — never rebuilt, reworded or truncated here.

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function conceptChips(response: FoilResponse): string[] {
  const exp = response.explanation;
  if (exp.kind === "missing-precondition") return [exp.concept];
  if (exp.kind === "cost-abstraction") {
    const seen = new Set<string>();
    const out: string[] = [];
    for (const entry of exp.entries) {
      for (const c of entry.concepts) {
        if (!seen.has(c)) {
          seen.add(c);
          out.push(c);
        }
      }
    }
    return out;
  }
  return [];
}

function confidenceBadge(confidence: number): HTMLElement {
  const band = confidence >= 0.9 ? "high" : confidence >= 0.7 ? "mid" : "low";
  return el("span", `confidence-badge confidence-${band}`, `confidence ${confidence.toFixed(3)}`);
}

const KIND_TITLE: Record<string, string> = {
  "missing-precondition": "why the foil fails",
  "cost-abstraction": "why the foil costs more",
  "foil-preferred": "the foil wins",
  "vocabulary-insufficient": "no answer in this vocabulary",
};

export function renderExplanation(container: HTMLElement, response: FoilResponse): void {
  container.textContent = "";
  const exp = response.explanation;

  const head = el("div", "explanation-head");
  head.appendChild(el("span", `kind-tag kind-${exp.kind}`, KIND_TITLE[exp.kind] ?? exp.kind));
  if (response.confidence !== null) head.appendChild(confidenceBadge(response.confidence));
  container.appendChild(head);

  const sentence = el("p", "sentence");
  sentence.textContent = response.rendered_text;
  container.appendChild(sentence);

  const chips = conceptChips(response);
  if (chips.length > 0) {
    const row = el("div", "chip-row");
    for (const name of chips) row.appendChild(el("span", "concept-chip", name));
    container.appendChild(row);
  }

  if (exp.kind === "vocabulary-insufficient") {
    const banner = el("div", "insufficiency-banner");
    banner.appendChild(el("span", undefined, "The vocabulary cannot express an answer. "));
    const link = el("a", undefined, "Review the concept vocabulary");
    link.setAttribute("href", "#vocabulary");
    banner.appendChild(link);
    container.appendChild(banner);
  }

  if (exp.kind === "cost-abstraction") {
    const table = el("table", "cost-table");
    const headRow = el("tr");
    for (const h of ["step", "action", "concepts", "at least", "conf"]) {
      headRow.appendChild(el("th", undefined, h));
    }
    table.appendChild(headRow);
    for (const entry of exp.entries) {
      const tr = el("tr");
      tr.appendChild(el("td", undefined, String(entry.step)));
      tr.appendChild(el("td", undefined, entry.action));
      tr.appendChild(el("td", undefined, entry.concepts.join(", ") || "—"));
      tr.appendChild(el("td", "cost-bound", entry.min_cost.toString()));
      tr.appendChild(el("td", undefined, entry.confidence.toFixed(2)));
      table.appendChild(tr);
    }
    container.appendChild(table);
    container.appendChild(
      el(
        "p",
        "cost-verdict",
        `abstract total ${exp.total_abstract_cost} vs plan cost ${exp.plan_cost}`,
      ),
    );
  }

  if (response.trace !== null && response.trace.length > 0) {
    const chartBox = el("div", "chart-box");
    chartBox.appendChild(traceChart(response.trace));
    container.appendChild(chartBox);
  }

  if (exp.kind === "missing-precondition" && exp.rivals) {
    const table = el("table", "rival-table");
    const headRow = el("tr");
    for (const h of ["hypothesis", "posterior", "eliminated at"]) {
      headRow.appendChild(el("th", undefined, h));
    }
    table.appendChild(headRow);
    for (const rival of exp.rivals) {
      const tr = el("tr", rival.eliminated_at === null ? "rival-alive" : "rival-dead");
      tr.appendChild(el("td", undefined, rival.concept));
      tr.appendChild(el("td", undefined, rival.posterior.toExponential(2)));
      tr.appendChild(
        el("td", undefined, rival.eliminated_at === null ? "survived" : `#${rival.eliminated_at}`),
      );
      table.appendChild(tr);
    }
    container.appendChild(table);
  }
}

export function renderHistory(container: HTMLElement, history: HistoryEntry[]): void {
  container.textContent = "";
  if (history.length === 0) {
    container.appendChild(el("p", "history-empty", "No foils asked yet."));
    return;
  }
  const list = el("ol", "history-list");
  for (const entry of history) {
    const item = el("li", "history-item");
    item.appendChild(el("code", "history-foil", entry.foil.join(" ")));
    item.appendChild(el("span", `kind-tag kind-${entry.explanation.kind}`, entry.explanation.kind));
    const text = el("p", "history-text");
    text.textContent = entry.rendered_text;
    item.appendChild(text);
    list.appendChild(item);
  }
  container.appendChild(list);
}
