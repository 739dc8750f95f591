import { ApiClient, ApiError } from "./api";
import { boardModel, drawBoard, type Badge } from "./board";
import { Composer, paletteLabels } from "./composer";
import { renderExplanation, renderHistory } from "./explanation";
import { replay } from "./preview";
import type { Cell, FoilResponse, MapCatalog, SessionPayload } from "./types";

const TILE = 42;

type BoardMode = "plan" | "foil";

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

interface Refs {
  mapSelect: HTMLSelectElement;
  variantSelect: HTMLSelectElement;
  seedInput: HTMLInputElement;
  openButton: HTMLButtonElement;
  sessionLabel: HTMLElement;
  board: HTMLCanvasElement;
  modePlan: HTMLInputElement;
  modeFoil: HTMLInputElement;
  scrub: HTMLInputElement;
  scrubLabel: HTMLElement;
  foilList: HTMLElement;
  palette: HTMLElement;
  freeEntry: HTMLInputElement;
  addButton: HTMLButtonElement;
  undoButton: HTMLButtonElement;
  clearButton: HTMLButtonElement;
  submitButton: HTMLButtonElement;
  status: HTMLElement;
  explanation: HTMLElement;
  history: HTMLElement;
  vocabulary: HTMLElement;
}

export class App {
  api: ApiClient;
  session: SessionPayload | null = null;
  catalog: MapCatalog | null = null;
  composer = new Composer();
  lastResponse: FoilResponse | null = null;
  scrubStep = 0;
  mode: BoardMode = "plan";
  refs: Refs;

  constructor(root: HTMLElement, api: ApiClient) {
    this.api = api;
    this.refs = buildSkeleton(root);
    this.wire();
  }

  private wire(): void {
    const r = this.refs;
    r.mapSelect.addEventListener("change", () => this.fillVariants());
    r.openButton.addEventListener("click", () => {
      void this.openSession();
    });
    r.scrub.addEventListener("input", () => {
      this.scrubStep = Number(r.scrub.value);
      this.mode = "plan";
      r.modePlan.checked = true;
      this.renderBoard();
    });
    for (const radio of [r.modePlan, r.modeFoil]) {
      radio.addEventListener("change", () => {
        this.mode = r.modeFoil.checked ? "foil" : "plan";
        this.renderBoard();
      });
    }
    r.addButton.addEventListener("click", () => {
      const label = r.freeEntry.value.trim();
      if (label) {
        this.composer.append(label);
        r.freeEntry.value = "";
      }
    });
    r.undoButton.addEventListener("click", () => this.composer.removeLast());
    r.clearButton.addEventListener("click", () => this.composer.clear());
    r.submitButton.addEventListener("click", () => {
      void this.submit();
    });
    this.composer.on("change", () => {
      this.mode = "foil";
      r.modeFoil.checked = true;
      this.renderComposer();
      this.renderBoard();
    });
    this.composer.on("submit", () => {
      void this.submit();
    });
    document.addEventListener("keydown", (e) => {
      if (!this.session) return;
      const target = e.target as HTMLElement | null;
      if (target && (target.tagName === "INPUT" || target.tagName === "SELECT")) return;
      if (this.composer.handleKey(e)) e.preventDefault();
    });
  }

  async boot(): Promise<void> {
    this.catalog = await this.api.maps();
    const r = this.refs;
    r.mapSelect.textContent = "";
    for (const entry of this.catalog.maps) {
      const opt = el("option", undefined, `${entry.map_id} — ${entry.title}`);
      opt.value = entry.map_id;
      r.mapSelect.appendChild(opt);
    }
    this.fillVariants();
  }

  private fillVariants(): void {
    const r = this.refs;
    const entry = this.catalog?.maps.find((m) => m.map_id === r.mapSelect.value);
    r.variantSelect.textContent = "";
    for (const v of entry?.variants ?? []) {
      const opt = el("option", undefined, v);
      opt.value = v;
      r.variantSelect.appendChild(opt);
    }
    if (entry) r.variantSelect.value = entry.default_variant;
  }

  async openSession(mapId?: string, variant?: string, seed?: number): Promise<void> {
    const r = this.refs;
    const chosenMap = mapId ?? r.mapSelect.value;
    const chosenVariant = variant ?? (r.variantSelect.value || undefined);
    const chosenSeed = seed ?? (r.seedInput.value === "" ? undefined : Number(r.seedInput.value));
    this.setStatus("opening session…");
    try {
      this.session = await this.api.createSession(chosenMap, {
        variant: chosenVariant,
        seed: chosenSeed,
      });
    } catch (err) {
      this.setStatus(errorText(err), true);
      return;
    }
    this.lastResponse = null;
    this.composer.unlock();
    this.composer.clear();
    this.scrubStep = 0;
    this.mode = "plan";
    r.modePlan.checked = true;
    this.setStatus("");
    this.renderSession();
  }

  /** Submit the composed foil; the builder stays locked until the answer lands. */
  async submit(): Promise<void> {
    if (!this.session || this.composer.locked || this.composer.actions.length === 0) return;
    const actions = [...this.composer.actions];
    this.composer.lock();
    this.setStatus("asking the engine…");
    try {
      this.lastResponse = await this.api.submitFoil(this.session.session_id, actions);
      // the history panel mirrors the server, never a local append
      this.session = await this.api.getSession(this.session.session_id);
      this.setStatus("");
    } catch (err) {
      this.lastResponse = null;
      this.setStatus(errorText(err), true);
    }
    this.composer.unlock();
    this.mode = "foil";
    this.refs.modeFoil.checked = true;
    this.renderSession();
  }

  setStatus(text: string, isError = false): void {
    this.refs.status.textContent = text;
    this.refs.status.className = isError ? "status status-error" : "status";
  }

  renderSession(): void {
    const r = this.refs;
    if (!this.session) return;
    const s = this.session;
    r.sessionLabel.textContent =
      `${s.map_id} / ${s.variant} · seed ${s.seed} · plan cost ${s.plan_cost} · #${s.session_id}`;
    r.scrub.max = String(s.plan_states.length - 1);
    r.scrub.value = String(Math.min(this.scrubStep, s.plan_states.length - 1));
    this.renderPalette();
    this.renderComposer();
    this.renderBoard();
    if (this.lastResponse) {
      renderExplanation(r.explanation, this.lastResponse);
    } else {
      r.explanation.textContent = "";
      r.explanation.appendChild(
        el("p", "explanation-empty", "Compose a foil and submit it to get an explanation."),
      );
    }
    renderHistory(r.history, s.history);
    this.renderVocabulary();
  }

  private renderPalette(): void {
    const r = this.refs;
    r.palette.textContent = "";
    for (const label of paletteLabels(this.session?.plan ?? [])) {
      const btn = el("button", "palette-btn", label);
      btn.type = "button";
      btn.addEventListener("click", () => this.composer.append(label));
      r.palette.appendChild(btn);
    }
  }

  renderComposer(): void {
    const r = this.refs;
    r.foilList.textContent = "";
    const exp = this.lastResponse?.explanation;
    const costBySteps = new Map<number, number>();
    if (exp?.kind === "cost-abstraction") {
      for (const entry of exp.entries) costBySteps.set(entry.step, entry.min_cost);
    }
    const failIndex = exp?.kind === "missing-precondition" ? exp.fail_index : null;
    this.composer.actions.forEach((label, i) => {
      const chip = el("span", "foil-step", label);
      if (failIndex !== null && i === failIndex) chip.classList.add("foil-step-fail");
      if (failIndex !== null && i > failIndex) chip.classList.add("foil-step-after-fail");
      const bound = costBySteps.get(i);
      if (bound !== undefined) chip.appendChild(el("sup", "foil-step-cost", `≥${bound}`));
      r.foilList.appendChild(chip);
    });
    if (this.composer.actions.length === 0) {
      r.foilList.appendChild(el("span", "foil-empty", "arrows to move, shift+arrows to push"));
    }
    r.submitButton.disabled = this.composer.locked || this.composer.actions.length === 0;
    r.undoButton.disabled = this.composer.locked;
    r.clearButton.disabled = this.composer.locked;
    r.addButton.disabled = this.composer.locked;
  }

  renderBoard(): void {
    const r = this.refs;
    if (!this.session) return;
    const s = this.session;
    const step = Math.min(this.scrubStep, s.plan_states.length - 1);
    let state = s.plan_states[step];
    let highlight: Cell | null = null;
    const badges: Badge[] = [];

    if (this.mode === "foil") {
      const states = replay(s.grid, s.plan_states[0], this.composer.actions);
      const exp = this.lastResponse?.explanation;
      if (exp?.kind === "missing-precondition" && exp.fail_index < states.length) {
        // freeze the preview where the engine says the foil breaks
        state = states[exp.fail_index];
        highlight = state.agent;
      } else {
        state = states[states.length - 1];
      }
      if (exp?.kind === "cost-abstraction") {
        for (const entry of exp.entries) {
          if (entry.step < states.length) {
            badges.push({ cell: states[entry.step].agent, text: `≥${entry.min_cost}` });
          }
        }
      }
      r.scrubLabel.textContent = `foil preview · ${this.composer.actions.length} action(s)`;
    } else {
      const action = step === 0 ? "start" : s.plan[step - 1];
      r.scrubLabel.textContent = `plan step ${step}/${s.plan_states.length - 1} · ${action}`;
    }

    const ctx = r.board.getContext("2d");
    if (ctx) drawBoard(ctx, boardModel(s.grid, { state, highlight, badges }), TILE);
  }

  private renderVocabulary(): void {
    const r = this.refs;
    r.vocabulary.textContent = "";
    for (const info of this.session?.vocabulary_info ?? []) {
      const chip = el("span", "concept-chip vocab-chip", info.name);
      chip.title = info.description;
      r.vocabulary.appendChild(chip);
    }
  }
}

function errorText(err: unknown): string {
  if (err instanceof ApiError) {
    return `request failed (${err.status}): ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

function buildSkeleton(root: HTMLElement): Refs {
  root.textContent = "";
  root.className = "app";

  const header = el("header", "topbar");
  header.appendChild(el("h1", undefined, "foilscope"));
  const picker = el("div", "picker");
  const mapSelect = el("select", "map-select");
  const variantSelect = el("select", "variant-select");
  const seedInput = el("input", "seed-input");
  seedInput.type = "number";
  seedInput.value = "0";
  seedInput.title = "seed";
  const openButton = el("button", "open-btn", "open session");
  openButton.type = "button";
  picker.append(mapSelect, variantSelect, seedInput, openButton);
  header.appendChild(picker);
  const sessionLabel = el("div", "session-label");
  header.appendChild(sessionLabel);
  root.appendChild(header);

  const main = el("main", "columns");

  const left = el("section", "board-panel");
  const board = el("canvas", "board");
  left.appendChild(board);
  const modeRow = el("div", "mode-row");
  const modePlan = el("input");
  modePlan.type = "radio";
  modePlan.name = "board-mode";
  modePlan.checked = true;
  const planLabel = el("label", undefined, " plan");
  planLabel.prepend(modePlan);
  const modeFoil = el("input");
  modeFoil.type = "radio";
  modeFoil.name = "board-mode";
  const foilLabel = el("label", undefined, " foil preview");
  foilLabel.prepend(modeFoil);
  modeRow.append(planLabel, foilLabel);
  left.appendChild(modeRow);
  const scrub = el("input", "scrub");
  scrub.type = "range";
  scrub.min = "0";
  scrub.value = "0";
  left.appendChild(scrub);
  const scrubLabel = el("div", "scrub-label");
  left.appendChild(scrubLabel);
  const vocabTitle = el("h2", undefined, "vocabulary");
  vocabTitle.id = "vocabulary";
  left.appendChild(vocabTitle);
  const vocabulary = el("div", "vocabulary");
  left.appendChild(vocabulary);
  main.appendChild(left);

  const right = el("section", "dialogue-panel");
  right.appendChild(el("h2", undefined, "foil"));
  const foilList = el("div", "foil-list");
  right.appendChild(foilList);
  const palette = el("div", "palette");
  right.appendChild(palette);
  const entryRow = el("div", "entry-row");
  const freeEntry = el("input", "free-entry");
  freeEntry.type = "text";
  freeEntry.placeholder = "action mnemonic…";
  const addButton = el("button", undefined, "add");
  addButton.type = "button";
  const undoButton = el("button", undefined, "undo");
  undoButton.type = "button";
  const clearButton = el("button", undefined, "clear");
  clearButton.type = "button";
  const submitButton = el("button", "submit-btn", "submit foil");
  submitButton.type = "button";
  entryRow.append(freeEntry, addButton, undoButton, clearButton, submitButton);
  right.appendChild(entryRow);
  const status = el("div", "status");
  right.appendChild(status);
  right.appendChild(el("h2", undefined, "explanation"));
  const explanation = el("div", "explanation");
  right.appendChild(explanation);
  right.appendChild(el("h2", undefined, "history"));
  const history = el("div", "history");
  right.appendChild(history);
  main.appendChild(right);

  root.appendChild(main);

  return {
    mapSelect,
    variantSelect,
    seedInput,
    openButton,
    sessionLabel,
    board,
    modePlan,
    modeFoil,
    scrub,
    scrubLabel,
    foilList,
    palette,
    freeEntry,
    addButton,
    undoButton,
    clearButton,
    submitButton,
    status,
    explanation,
    history,
    vocabulary,
  };
}
