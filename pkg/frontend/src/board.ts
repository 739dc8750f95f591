import type { Cell, PlanState } from "./types";

// The grid strings the service sends are the static layout: walls and fixed
// furniture only. Everything that moves (agent, box, hazards) arrives as
// state and is painted as an overlay.

export interface Badge {
  cell: Cell;
  text: string;
}

export interface CellPaint {
  row: number;
  col: number;
  fill: string;
  glyph?: string;
  glyphColor?: string;
}

export interface SpritePaint {
  cell: Cell;
  kind: "agent" | "box" | "hazard";
  label?: string;
}

export interface BoardModel {
  rows: number;
  cols: number;
  cells: CellPaint[];
  sprites: SpritePaint[];
  highlight: Cell | null;
  badges: Badge[];
}

const TILE_FILL: Record<string, string> = {
  "#": "#3a3f4b",
  ".": "#14171c",
  T: "#14171c",
  G: "#14171c",
  P: "#3d2233",
  K: "#14171c",
  L: "#14171c",
  R: "#14171c",
  E: "#1c2026",
};

const TILE_GLYPH: Record<string, [string, string]> = {
  T: ["◎", "#e8c256"],
  K: ["⚷", "#e8c256"],
  L: ["≣", "#8a93a6"],
  R: ["|", "#b08a5a"],
  E: ["▀", "#6a7386"],
};

export interface Overlay {
  state?: PlanState;
  highlight?: Cell | null;
  badges?: Badge[];
}

export function boardModel(grid: string[], overlay: Overlay = {}): BoardModel {
  const rows = grid.length;
  const cols = rows > 0 ? grid[0].length : 0;
  const state = overlay.state;
  const cells: CellPaint[] = [];

  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const ch = grid[r][c] ?? ".";
      const paint: CellPaint = { row: r, col: c, fill: TILE_FILL[ch] ?? "#14171c" };
      if (ch === "G") {
        // the switch tile is the one piece of furniture whose look is state
        const on = state?.switch_on === true;
        paint.glyph = on ? "●" : "○";
        paint.glyphColor = on ? "#5fd068" : "#3c5a40";
      } else if (TILE_GLYPH[ch]) {
        [paint.glyph, paint.glyphColor] = TILE_GLYPH[ch];
      }
      cells.push(paint);
    }
  }

  const sprites: SpritePaint[] = [];
  if (state?.box) sprites.push({ cell: state.box, kind: "box" });
  if (state?.hazard && state.hazard.alive) {
    sprites.push({ cell: state.hazard.pos, kind: "hazard", label: state.hazard.name });
  }
  if (state?.agent) sprites.push({ cell: state.agent, kind: "agent" });

  return {
    rows,
    cols,
    cells,
    sprites,
    highlight: overlay.highlight ?? null,
    badges: overlay.badges ?? [],
  };
}

const SPRITE_FILL: Record<SpritePaint["kind"], string> = {
  agent: "#4fc3f7",
  box: "#a9743c",
  hazard: "#e05555",
};

export function drawBoard(ctx: CanvasRenderingContext2D, model: BoardModel, tile: number): void {
  ctx.canvas.width = model.cols * tile;
  ctx.canvas.height = model.rows * tile;
  ctx.font = `${Math.floor(tile * 0.6)}px monospace`;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";

  for (const cell of model.cells) {
    const x = cell.col * tile;
    const y = cell.row * tile;
    ctx.fillStyle = cell.fill;
    ctx.fillRect(x, y, tile, tile);
    ctx.strokeStyle = "#0b0d10";
    ctx.strokeRect(x + 0.5, y + 0.5, tile - 1, tile - 1);
    if (cell.glyph) {
      ctx.fillStyle = cell.glyphColor ?? "#888";
      ctx.fillText(cell.glyph, x + tile / 2, y + tile / 2);
    }
  }

  for (const sprite of model.sprites) {
    const [r, c] = sprite.cell;
    const cx = c * tile + tile / 2;
    const cy = r * tile + tile / 2;
    ctx.fillStyle = SPRITE_FILL[sprite.kind];
    if (sprite.kind === "box") {
      ctx.fillRect(c * tile + tile * 0.15, r * tile + tile * 0.15, tile * 0.7, tile * 0.7);
    } else {
      ctx.beginPath();
      ctx.arc(cx, cy, tile * 0.35, 0, Math.PI * 2);
      ctx.fill();
    }
    if (sprite.label) {
      ctx.fillStyle = "#fff";
      ctx.fillText(sprite.label[0].toUpperCase(), cx, cy);
    }
  }

  if (model.highlight) {
    const [r, c] = model.highlight;
    ctx.strokeStyle = "#ff5252";
    ctx.lineWidth = 3;
    ctx.strokeRect(c * tile + 1.5, r * tile + 1.5, tile - 3, tile - 3);
    ctx.lineWidth = 1;
  }

  for (const badge of model.badges) {
    const [r, c] = badge.cell;
    const x = c * tile + tile / 2;
    const y = r * tile + tile * 0.2;
    ctx.fillStyle = "rgba(232, 194, 86, 0.92)";
    const w = ctx.measureText(badge.text).width + 8;
    ctx.fillRect(x - w / 2, y - tile * 0.17, w, tile * 0.34);
    ctx.fillStyle = "#1a1208";
    ctx.font = `${Math.floor(tile * 0.32)}px monospace`;
    ctx.fillText(badge.text, x, y);
    ctx.font = `${Math.floor(tile * 0.6)}px monospace`;
  }
}
