"""Gadget templates: stone patterns with named ports, stored as data files.

A template is authored in a local axial frame with the forcing side's
stones in `white` (instantiating with color "B" swaps roles).  Ports mark
the cells that stay empty and carry the protocol: `start` ports receive
the activating stone, `end` ports are where the compelled side is driven,
`open` ports are exchange cells that may be traded along the way.

Instantiation applies one of the 12 hex isometries plus a translation.
Within one template a stone may serve several almost-rings at once; the
behavior contracts are enforced by the verification harness, not by the
data layer.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .havannah import BLACK, WHITE
from .hexgrid import transform

TEMPLATE_DIR_ENV = "GADGETFORGE_TEMPLATE_DIR"
PORT_KINDS = ("start", "end", "open")


@dataclass(frozen=True)
class Port:
    name: str
    kind: str
    cell: tuple

    def __post_init__(self):
        if self.kind not in PORT_KINDS:
            raise ValueError(f"unknown port kind {self.kind!r}")


@dataclass(frozen=True)
class GadgetTemplate:
    name: str
    white: frozenset
    black: frozenset
    ports: tuple  # of Port, in file order

    def __post_init__(self):
        if self.white & self.black:
            raise ValueError(f"{self.name}: stone sets overlap")
        occupied = self.white | self.black
        seen = set()
        for p in self.ports:
            if p.cell in occupied:
                raise ValueError(f"{self.name}: port {p.name} sits on a stone")
            if p.name in seen:
                raise ValueError(f"{self.name}: duplicate port {p.name}")
            seen.add(p.name)

    @staticmethod
    def of(name, white=(), black=(), ports=()):
        return GadgetTemplate(name, frozenset(white), frozenset(black),
                              tuple(Port(n, k, c) for n, k, c in ports))

    def port(self, name):
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(f"{self.name} has no port {name!r}")

    def cells(self):
        out = set(self.white) | set(self.black)
        out.update(p.cell for p in self.ports)
        return out

    def color_swapped(self):
        return GadgetTemplate(self.name, self.black, self.white, self.ports)


@dataclass(frozen=True)
class PlacedGadget:
    """A template pinned to the board: owner color, isometry, offset."""

    template: GadgetTemplate
    color: str = WHITE
    translation: tuple = (0, 0)
    rotation: int = 0
    mirrored: bool = False

    def __post_init__(self):
        if self.color not in (WHITE, BLACK):
            raise ValueError(f"bad owner color {self.color!r}")
        if not 0 <= self.rotation < 6:
            raise ValueError("rotation must be in 0..5")

    def map_cell(self, cell):
        q, r = transform(cell[0], cell[1], self.rotation, self.mirrored)
        return (q + self.translation[0], r + self.translation[1])

    def stones(self):
        """Board cells to colors, with the color swap applied."""
        w, b = (self.template.white, self.template.black)
        if self.color == BLACK:
            w, b = b, w
        out = {}
        for c in w:
            out[self.map_cell(c)] = WHITE
        for c in b:
            out[self.map_cell(c)] = BLACK
        return out

    def port_cells(self):
        return {p.name: self.map_cell(p.cell) for p in self.template.ports}

    def footprint(self):
        return frozenset(self.map_cell(c) for c in self.template.cells())


def instantiate(template, color=WHITE, translation=(0, 0), rotation=0,
                mirrored=False):
    """Convenience wrapper returning (stones, ports) for one placement."""
    g = PlacedGadget(template, color, tuple(translation), rotation, mirrored)
    return g.stones(), g.port_cells()


def format_template(t):
    lines = [f"gadget {t.name}"]
    for q, r in sorted(t.white, key=lambda c: (c[1], c[0])):
        lines.append(f"W {q} {r}")
    for q, r in sorted(t.black, key=lambda c: (c[1], c[0])):
        lines.append(f"B {q} {r}")
    for p in t.ports:
        lines.append(f"port {p.name} {p.kind} {p.cell[0]} {p.cell[1]}")
    return "\n".join(lines) + "\n"


def parse_template(text):
    name = None
    white, black, ports = [], [], []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "gadget" and len(parts) == 2:
                if name is not None:
                    raise ValueError("second gadget header")
                name = parts[1]
            elif parts[0] in (WHITE, BLACK) and len(parts) == 3:
                cell = (int(parts[1]), int(parts[2]))
                (white if parts[0] == WHITE else black).append(cell)
            elif parts[0] == "port" and len(parts) == 5:
                ports.append((parts[1], parts[2], (int(parts[3]), int(parts[4]))))
            else:
                raise ValueError(f"unrecognized line {line!r}")
        except ValueError as exc:
            raise ValueError(f"line {ln}: {exc}") from None
    if name is None:
        raise ValueError("missing gadget header")
    return GadgetTemplate.of(name, white, black, ports)


def wire_template(length=4):
    """Straight wire of the given port separation (at least 3).

    Two almost-rings share the entry u and the exit v; their private gaps
    a, b sit just past the neck stone by the entry.  Activating u
    threatens to seal v, which would leave completions at both a and b,
    so the opponent must take v (or trade through a/b first, which only
    delays the same compulsion by one exchange).

    Both end cells keep a narrow profile: each touches only three wire
    stones, arranged so the two fence neighbours the rings actually use
    are non-adjacent.  That leaves three consecutive free directions at
    either end for the neighbouring element, and it denies any six-cell
    ring a shortcut around the end cells.  The two opposite-colour
    stones sit inside the corridor; each poisons the fence of a pocket
    that would otherwise fall to two same-colour moves once the ports
    fill up during normal play.
    """
    if length < 3:
        raise ValueError("wire length must be at least 3")
    L = length
    white = [(1, -1)]                                # neck by the entry
    white += [(k, -3) for k in range(2, L + 2)]      # outer wall
    white += [(L + 1, -2), (L, -1)]                  # descent to the exit
    white += [(k, 1) for k in range(1, L)]           # return row
    white.append((0, 1))                             # entry-side tail
    black = sorted({(2, -1), (L - 1, -1)})           # corridor plugs
    ports = [("u", "start", (0, 0)), ("a", "open", (1, -2)),
             ("b", "open", (2, -2)), ("v", "end", (L, 0))]
    return GadgetTemplate.of("wire", white, black, ports)


def template_dir():
    override = os.environ.get(TEMPLATE_DIR_ENV)
    if override:
        return override
    return os.path.join(os.path.dirname(__file__), "templates")


def load_templates(directory=None):
    """Name-to-template registry from *.gdt files, sorted by filename."""
    directory = directory if directory is not None else template_dir()
    registry = {}
    for fname in sorted(os.listdir(directory)):
        if not fname.endswith(".gdt"):
            continue
        with open(os.path.join(directory, fname), encoding="utf-8") as fh:
            t = parse_template(fh.read())
        if t.name in registry:
            raise ValueError(f"duplicate template name {t.name}")
        registry[t.name] = t
    return registry
