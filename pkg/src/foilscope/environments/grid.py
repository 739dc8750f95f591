"""Grid map parsing shared by every bundled environment family.

Map files are a header line naming the variant followed by the glyph grid:

    variant: sokoban-switch-cost
    #########
    #.......#
    ...

Glyphs: ``#`` wall, ``.`` floor, ``@`` agent, ``$`` box, ``T`` target,
``G`` switch cell, ``P`` pink cell, ``K`` key, ``S`` skull, ``L`` ladder,
``R`` rope, ``E`` ledge-edge.
"""
from __future__ import annotations

from dataclasses import dataclass

WALL = "#"
FLOOR = "."
AGENT = "@"
BOX = "$"
TARGET = "T"
SWITCH = "G"
PINK = "P"
KEY = "K"
SKULL = "S"
LADDER = "L"
ROPE = "R"
LEDGE = "E"

ALL_GLYPHS = {WALL, FLOOR, AGENT, BOX, TARGET, SWITCH, PINK, KEY, SKULL, LADDER, ROPE, LEDGE}

SOKOBAN_VARIANTS = ("sokoban-switch-prec", "sokoban-switch-cost", "sokoban-cell")
KEYQUEST_VARIANT = "key-quest"
VARIANTS = SOKOBAN_VARIANTS + (KEYQUEST_VARIANT,)


class MapError(Exception):
    """Malformed map text; carries the offending row/column when known."""

    def __init__(self, message: str, row: int = None, col: int = None):
        place = ""
        if row is not None:
            place = f" (row {row}" + (f", col {col})" if col is not None else ")")
        super().__init__(message + place)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class GridSpec:
    """Validated variant tag plus rectangular glyph rows (border walls intact)."""

    variant: str
    rows: tuple

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    def glyph(self, r: int, c: int) -> str:
        return self.rows[r][c]

    def find_all(self, glyph: str) -> tuple:
        return tuple(
            (r, c)
            for r in range(self.height)
            for c in range(self.width)
            if self.rows[r][c] == glyph
        )

    def find_one(self, glyph: str) -> tuple:
        hits = self.find_all(glyph)
        if len(hits) != 1:
            raise MapError(f"expected exactly one {glyph!r}, found {len(hits)}")
        return hits[0]


def parse_grid_text(text: str, variant: str = None) -> GridSpec:
    """Parse header + grid into a GridSpec; ``variant`` overrides the header.

    The header is the first non-blank, non-comment line, either the bare
    variant tag or ``variant: <tag>``.
    """
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    header = None
    grid_rows = []
    for idx, raw in enumerate(lines):
        stripped = raw.strip()
        if not stripped or stripped.startswith("//") or stripped.startswith(";"):
            continue
        if header is None:
            header = stripped
            continue
        grid_rows.append(raw.strip())
    if header is None:
        raise MapError("empty map text")
    tag = header.split(":", 1)[1].strip() if header.startswith("variant:") else header
    if variant is not None:
        tag = variant
    if tag not in VARIANTS:
        raise MapError(f"unknown variant tag {tag!r}")
    if not grid_rows:
        raise MapError("map has no grid rows")
    width = len(grid_rows[0])
    for r, row in enumerate(grid_rows):
        if len(row) != width:
            raise MapError("grid is not rectangular", row=r, col=len(row))
        for c, ch in enumerate(row):
            if ch not in ALL_GLYPHS:
                raise MapError(f"unknown glyph {ch!r}", row=r, col=c)
    for c in range(width):
        if grid_rows[0][c] != WALL or grid_rows[-1][c] != WALL:
            raise MapError("outer boundary must be wall", row=0 if grid_rows[0][c] != WALL else len(grid_rows) - 1, col=c)
    for r in range(len(grid_rows)):
        if grid_rows[r][0] != WALL or grid_rows[r][-1] != WALL:
            raise MapError("outer boundary must be wall", row=r, col=0 if grid_rows[r][0] != WALL else width - 1)
    agents = [
        (r, c)
        for r, row in enumerate(grid_rows)
        for c, ch in enumerate(row)
        if ch == AGENT
    ]
    if len(agents) != 1:
        raise MapError(f"expected exactly one agent, found {len(agents)}")
    return GridSpec(variant=tag, rows=tuple(grid_rows))


DIRECTIONS = {
    "up": (-1, 0),
    "down": (1, 0),
    "left": (0, -1),
    "right": (0, 1),
}


def add(pos: tuple, delta: tuple) -> tuple:
    return (pos[0] + delta[0], pos[1] + delta[1])
