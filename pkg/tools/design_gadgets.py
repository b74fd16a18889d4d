#!/usr/bin/env python3
"""Construct, audit, and freeze the Havannah gadget templates.

Every template is authored here as explicit ring cycles plus a set of
quiet states (rest, armed, consumed, traded).  The audit holds each
declaration against the rule engine:

* every cycle must close, enclose at least one cell when filled, and
  stop enclosing when any single gap is withheld;
* filling any subset of a ring's gaps must produce exactly the
  completion threats predicted by the declared rings, nothing more;
* every declared state must be completion-free for both colors, and
  every placement in the neighborhood must be threat-free except for
  the moves the protocol sanctions in that state;
* per-template probes replay the forcing skeleton (seals, trades,
  punishments, bank detonation) move by move.

Neighbor wires are modeled as stub stones so rings that lean on an
adjacent wire's fence are audited against the exact stones the
compiler will later provide.  Stubs are audit-only; the .gdt files
carry the template proper.

On a green audit the templates are written to the package template
directory, unless --no-write is given.
"""

import argparse
import os
import sys
from dataclasses import dataclass, field
from itertools import combinations

from gadgetforge import hexgrid
from gadgetforge.gadgets import GadgetTemplate, format_template, wire_template
from gadgetforge.havannah import (
    BLACK,
    WHITE,
    Board,
    Double,
    Simple,
    classify_threat,
    detect_ring,
    groups,
    threat_completions,
)
from gadgetforge.threats import winning_threat_sequence


def rot1(q, r):
    return -r, q + r


def rot(cell, k):
    q, r = cell
    for _ in range(k % 6):
        q, r = rot1(q, r)
    return q, r


def loop6(center):
    return hexgrid.neighbors(*center)


def other(color):
    return BLACK if color == WHITE else WHITE


# ---------------------------------------------------------------------------
# Stub machinery.  A stub is a stock wire, rotated and translated so one of
# its ports lands on a template port.  Its stones join the audit board; its
# rings join the declared inventory; its far ports must stay empty.


def wire_cells(length):
    """Stones, ports, and ring cycles of the stock wire, untransformed."""
    t = wire_template(length)
    white = list(t.white)
    black = list(t.black)
    ports = {p.name: p.cell for p in t.ports}
    wall = [(k, -3) for k in range(2, length + 2)]
    spine = [(length + 1, -2), (length, -1), (length, 0)]
    back = [(k, 1) for k in range(length - 1, 0, -1)] + [(0, 1)]
    r1 = [(0, 0), (1, -1), (1, -2)] + wall + spine + back
    r2 = [(0, 0), (1, -1), (2, -2)] + wall[1:] + spine + back
    rings = {
        "r1": (r1, {(0, 0), (1, -2), (length, 0)}),
        "r2": (r2, {(0, 0), (2, -2), (length, 0)}),
    }
    return white, black, ports, rings


@dataclass
class Stub:
    label: str
    color: str              # color of the wire's owner stones
    anchor: str             # which stub port sits on the template port
    at: tuple               # template cell the anchor lands on
    rotation: int = 0
    length: int = 3

    def realize(self):
        white, black, ports, rings = wire_cells(self.length)
        shift = None

        def place(cell):
            return rot(cell, self.rotation)

        base = place(ports[self.anchor])
        dq, dr = self.at[0] - base[0], self.at[1] - base[1]

        def mv(cell):
            q, r = place(cell)
            return q + dq, r + dr

        own = sorted(mv(c) for c in white)   # wire body, owner's color
        foe = sorted(mv(c) for c in black)   # interior plugs, opponent's
        w, b = (own, foe) if self.color == WHITE else (foe, own)
        out_ports = {f"{self.label}_{n}": mv(c) for n, c in ports.items()
                     if n != self.anchor}
        out_rings = []
        for rname, (cycle, gaps) in rings.items():
            out_rings.append((f"{self.label}_{rname}",
                              [mv(c) for c in cycle],
                              {mv(c) for c in gaps},
                              self.color))
        return w, b, out_ports, out_rings


# ---------------------------------------------------------------------------
# Design container and audits


@dataclass
class State:
    label: str
    stones: dict = field(default_factory=dict)
    sanctioned: set = field(default_factory=set)   # rings allowed <3 open gaps
    exempt: dict = field(default_factory=dict)     # (cell, color) -> spec


@dataclass
class Design:
    template: GadgetTemplate
    rings: list                       # (label, cycle, gaps, color)
    stubs: list = field(default_factory=list)
    states: list = field(default_factory=list)
    probes: list = field(default_factory=list)     # (label, fn(ctx))

    def realize(self):
        aux_w, aux_b, aux_ports, aux_rings = [], [], {}, []
        for stub in self.stubs:
            w, b, ports, rings = stub.realize()
            aux_w += w
            aux_b += b
            aux_ports.update(ports)
            aux_rings += rings
        return aux_w, aux_b, aux_ports, aux_rings


class Ctx:
    """One realized design on a concrete board, with audit helpers."""

    def __init__(self, design, margin=3):
        self.design = design
        t = design.template
        self.name = t.name
        aux_w, aux_b, aux_ports, aux_rings = design.realize()
        self.base = {c: WHITE for c in t.white}
        self.base.update({c: BLACK for c in t.black})
        for c in aux_w:
            if self.base.get(c, WHITE) != WHITE:
                raise ValueError(f"{t.name}: stub white collides at {c}")
            self.base[c] = WHITE
        for c in aux_b:
            if self.base.get(c, BLACK) != BLACK:
                raise ValueError(f"{t.name}: stub black collides at {c}")
            self.base[c] = BLACK
        self.ports = {p.name: p.cell for p in t.ports}
        self.ports.update(aux_ports)
        self.rings = list(design.rings) + aux_rings
        cells = set(self.base) | set(self.ports.values())
        for _, cycle, _, _ in self.rings:
            cells |= set(cycle)
        self.side = max(4, 1 + margin + max(
            max(abs(q), abs(r), abs(q + r)) for q, r in cells))
        region = set(self.base)
        for _ in range(2):
            region |= {n for c in region for n in hexgrid.neighbors(*c)}
        self.region = {c for c in region
                       if hexgrid.in_board(c[0], c[1], self.side)}

    def board(self, extra=(), to_move=WHITE):
        stones = dict(self.base)
        for cell, color in dict(extra).items():
            if cell in stones:
                raise ValueError(f"{self.name}: state stone on {cell}")
            stones[cell] = color
        return Board(self.side, stones, to_move)

    def empties(self, board):
        return [c for c in self.region if c not in board.stones]

    def completions(self, board, color):
        return set(threat_completions(board, color,
                                      region=self.region).completions)

    def expected(self, board, color):
        out = set()
        for _, cycle, gaps, rcolor in self.rings:
            if rcolor != color:
                continue
            fence_ok = all(board.stones.get(c) == rcolor
                           for c in cycle if c not in gaps)
            if not fence_ok:
                continue
            open_gaps = [g for g in gaps if g not in board.stones]
            poisoned = any(board.stones.get(g) not in (None, rcolor)
                           for g in gaps)
            if poisoned:
                continue
            if len(open_gaps) == 1:
                out.add(open_gaps[0])
        return out


def audit_static(ctx):
    problems = []
    t = ctx.design.template
    seen = {}
    for name, cell in ctx.ports.items():
        if cell in ctx.base:
            problems.append(f"{ctx.name}: port {name} sits on a stone")
        if cell in seen and seen[cell] != name:
            problems.append(
                f"{ctx.name}: ports {seen[cell]} and {name} share {cell}")
        seen[cell] = name
    port_cells = set(ctx.ports.values())
    for label, cycle, gaps, color in ctx.rings:
        tag = f"{ctx.name}/{label}"
        if len(set(cycle)) != len(cycle):
            problems.append(f"{tag}: repeated cell in cycle")
            continue
        for i, c in enumerate(cycle):
            if cycle[(i + 1) % len(cycle)] not in hexgrid.neighbors(*c):
                problems.append(f"{tag}: break after {c}")
        for g in gaps:
            if g not in cycle:
                problems.append(f"{tag}: gap {g} not on the cycle")
            if g in ctx.base:
                problems.append(f"{tag}: gap {g} holds a stone")
            if g not in port_cells:
                problems.append(f"{tag}: gap {g} is not a named port")
            i = cycle.index(g) if g in cycle else None
            if i is not None:
                before = cycle[i - 1]
                after = cycle[(i + 1) % len(cycle)]
                if after in hexgrid.neighbors(*before):
                    problems.append(f"{tag}: gap {g} is not load-bearing")
        for c in cycle:
            if c in gaps:
                continue
            have = ctx.base.get(c)
            if have != color:
                problems.append(f"{tag}: fence {c} holds {have}, "
                                f"wants {color}")
        if problems and problems[-1].startswith(tag):
            continue
        filled = dict(ctx.base)
        for g in gaps:
            filled[g] = color
        board = Board(ctx.side, filled, WHITE)
        ring_groups = [g for g in groups(board) if g.color == color
                       and cycle[0] in g.members]
        if not ring_groups or not detect_ring(board, ring_groups[0]):
            problems.append(f"{tag}: filled cycle does not ring")
    return problems


def audit_subsets(ctx):
    """Fill every proper subset of each ring's gaps; the board's threats
    must match the declared inventory exactly."""
    problems = []
    done = set()
    for label, _, gaps, color in ctx.rings:
        for mask in range(len(gaps) + 1):
            for combo in combinations(sorted(gaps), mask):
                key = (color, combo)
                if key in done or len(combo) == len(gaps):
                    continue
                done.add(key)
                extra = {c: color for c in combo}
                board = ctx.board(extra)
                for probe_color in (WHITE, BLACK):
                    have = ctx.completions(board, probe_color)
                    want = ctx.expected(board, probe_color)
                    if have != want:
                        problems.append(
                            f"{ctx.name}/{label}: gaps {combo} as {color}: "
                            f"{probe_color} completions {sorted(have)} != "
                            f"declared {sorted(want)}")
    return problems


def audit_state(ctx, state):
    problems = []
    tag = f"{ctx.name}@{state.label}"
    board = ctx.board(state.stones)
    for color in (WHITE, BLACK):
        comp = ctx.completions(board, color)
        if comp:
            problems.append(f"{tag}: {color} completes at {sorted(comp)}")
    for label, cycle, gaps, color in ctx.rings:
        fence_ok = all(board.stones.get(c) == color
                       for c in cycle if c not in gaps)
        poisoned = any(board.stones.get(g) not in (None, color)
                       for g in gaps)
        if not fence_ok or poisoned:
            continue
        open_gaps = [g for g in gaps if g not in board.stones]
        if len(open_gaps) < 3 and label not in state.sanctioned:
            problems.append(
                f"{tag}: ring {label} stands at {len(open_gaps)} open "
                f"gap(s) without sanction")
    for cell in sorted(ctx.empties(board)):
        for color in (WHITE, BLACK):
            got = classify_threat(board, color, cell, region=ctx.region)
            spec = state.exempt.get((cell, color))
            if spec is None:
                if got is not None:
                    problems.append(
                        f"{tag}: {color} at {cell} is a threat: {got}")
            elif spec == "any":
                continue
            elif spec[0] == "simple":
                if not isinstance(got, Simple) or got.answer != spec[1]:
                    problems.append(
                        f"{tag}: {color} at {cell}: wanted simple "
                        f"{spec[1]}, got {got}")
            elif spec[0] == "double":
                if not isinstance(got, Double) or \
                        set(got.cells) != set(spec[1]):
                    problems.append(
                        f"{tag}: {color} at {cell}: wanted double "
                        f"{sorted(spec[1])}, got {got}")
    return problems


def audit(design, deep=True):
    try:
        ctx = Ctx(design)
    except ValueError as e:
        return [str(e)]
    problems = audit_static(ctx)
    if problems:
        return problems
    if deep:
        problems += audit_subsets(ctx)
    for state in design.states:
        problems += audit_state(ctx, state)
    for label, fn in design.probes:
        try:
            problems += [f"{ctx.name}/{label}: {p}" for p in fn(ctx)]
        except Exception as e:  # a probe crash is a finding, not an abort
            problems.append(f"{ctx.name}/{label}: probe crashed: {e!r}")
    return problems


# ---------------------------------------------------------------------------
# Probe vocabulary


def expect(cond, msg):
    return [] if cond else [msg]


def expect_classify(ctx, extra, color, cell, want):
    board = ctx.board(extra)
    got = classify_threat(board, color, cell, region=ctx.region)
    if want is None:
        return expect(got is None, f"{color}@{cell}: wanted quiet, {got}")
    kind, payload = want
    if kind == "simple":
        return expect(isinstance(got, Simple) and got.answer == payload,
                      f"{color}@{cell}: wanted simple {payload}, got {got}")
    return expect(isinstance(got, Double) and set(got.cells) == set(payload),
                  f"{color}@{cell}: wanted double {sorted(payload)}, "
                  f"got {got}")


def expect_standing(ctx, extra, color, cells):
    board = ctx.board(extra)
    have = ctx.completions(board, color)
    return expect(have == set(cells),
                  f"standing {color} completions {sorted(have)} != "
                  f"{sorted(cells)}")


# ---------------------------------------------------------------------------
# Wire and curve


def wire_design(length=4):
    t = wire_template(length)
    white, black, ports, rings = wire_cells(length)
    u, a, b, v = ports["u"], ports["a"], ports["b"], ports["v"]
    ring_list = [(n, cyc, gaps, WHITE)
                 for n, (cyc, gaps) in rings.items()]
    armed_ex = {
        (v, WHITE): ("double", {a, b}),
        (a, WHITE): ("simple", v),
        (b, WHITE): ("simple", v),
    }
    states = [
        State("fresh"),
        State("armed", {u: WHITE}, {"r1", "r2"}, armed_ex),
        State("consumed", {u: WHITE, v: BLACK}),
        State("traded-ab", {u: WHITE, v: BLACK, a: BLACK, b: WHITE}),
        State("traded-ba", {u: WHITE, v: BLACK, a: WHITE, b: BLACK}),
    ]

    def probe_flow(ctx):
        out = []
        out += expect_classify(ctx, {}, WHITE, u, None)
        out += expect_classify(ctx, {u: WHITE}, WHITE, v,
                               ("double", {a, b}))
        out += expect_standing(ctx, {u: WHITE, a: BLACK, b: WHITE},
                               WHITE, {v})
        out += expect_classify(ctx, {u: WHITE, a: BLACK}, WHITE, b,
                               ("simple", v))
        return out

    return Design(t, ring_list, states=states,
                  probes=[("flow", probe_flow)])


def curve_template():
    """60 degree bend; enters along +q, leaves along +r."""
    white = [(1, -1), (2, -3), (3, -3), (4, -3), (5, -3), (5, -2),
             (5, -1), (5, 0), (3, 1), (2, 1), (1, 1), (0, 1)]
    black = [(2, -1)]
    ports = [("u", "start", (0, 0)), ("a", "open", (1, -2)),
             ("b", "open", (2, -2)), ("v", "end", (4, 1))]
    return GadgetTemplate.of("curve", white, black, ports)


def curve_design():
    t = curve_template()
    u, a, b, v = (0, 0), (1, -2), (2, -2), (4, 1)
    tailback = [(5, 0), v, (3, 1), (2, 1), (1, 1), (0, 1)]
    r1 = [u, (1, -1), a, (2, -3), (3, -3), (4, -3), (5, -3), (5, -2),
          (5, -1)] + tailback
    r2 = [u, (1, -1), b, (3, -3), (4, -3), (5, -3), (5, -2),
          (5, -1)] + tailback
    rings = [("r1", r1, {u, a, v}, WHITE), ("r2", r2, {u, b, v}, WHITE)]
    armed_ex = {
        (v, WHITE): ("double", {a, b}),
        (a, WHITE): ("simple", v),
        (b, WHITE): ("simple", v),
    }
    states = [
        State("fresh"),
        State("armed", {u: WHITE}, {"r1", "r2"}, armed_ex),
        State("consumed", {u: WHITE, v: BLACK}),
        State("traded-ab", {u: WHITE, v: BLACK, a: BLACK, b: WHITE}),
        State("traded-ba", {u: WHITE, v: BLACK, a: WHITE, b: BLACK}),
    ]

    def probe_flow(ctx):
        out = []
        out += expect_classify(ctx, {}, WHITE, u, None)
        out += expect_classify(ctx, {u: WHITE}, WHITE, v,
                               ("double", {a, b}))
        out += expect_standing(ctx, {u: WHITE, b: BLACK, a: WHITE},
                               WHITE, {v})
        return out

    return Design(t, rings, states=states, probes=[("flow", probe_flow)])


# ---------------------------------------------------------------------------
# Crossover


def crossover_design():
    r_st = [(0, -2), (1, -2), (2, -2), (2, -1), (2, 0), (1, 1),
            (0, 2), (-1, 2), (-2, 2), (-2, 1), (-2, 0), (-1, -1)]
    west = loop6((-2, 0))
    east = loop6((2, 0))
    core = loop6((0, 0))
    u, x, y, v = (-3, 0), (-1, 0), (1, 0), (3, 0)
    s, t = (0, -2), (0, 2)
    white = sorted((set(r_st) - {s, t}) | (set(west) - {u, x})
                   | (set(east) - {y, v}))
    black = sorted(set(core) - {x, y})
    ports = [("u", "start", u), ("s", "start", s),
             ("x", "open", x), ("y", "open", y),
             ("v", "end", v), ("t", "end", t)]
    tmpl = GadgetTemplate.of("crossover", white, black, ports)
    rings = [("cross", r_st, {s, t}, WHITE),
             ("west", list(west), {u, x}, WHITE),
             ("east", list(east), {y, v}, WHITE),
             ("guard", list(core), {x, y}, BLACK)]

    def ex_through():
        return {
            (u, WHITE): ("simple", x), (x, WHITE): ("simple", u),
            (y, WHITE): ("simple", v), (v, WHITE): ("simple", y),
            (x, BLACK): ("simple", y), (y, BLACK): ("simple", x),
        }

    def ex_cross():
        return {(s, WHITE): ("simple", t), (t, WHITE): ("simple", s)}

    all_rings = {"cross", "west", "east", "guard"}
    states = [
        State("fresh", {}, all_rings, {**ex_through(), **ex_cross()}),
        State("through-done",
              {u: WHITE, x: BLACK, y: WHITE, v: BLACK},
              {"cross"}, ex_cross()),
        State("cross-done", {s: WHITE, t: BLACK},
              {"west", "east", "guard"}, ex_through()),
        State("both-done",
              {u: WHITE, x: BLACK, y: WHITE, v: BLACK,
               s: WHITE, t: BLACK}),
    ]

    def probe_chain(ctx):
        out = []
        out += expect_classify(ctx, {}, WHITE, u, ("simple", x))
        out += expect_standing(ctx, {u: WHITE, x: BLACK}, BLACK, {y})
        out += expect_classify(ctx, {u: WHITE, x: BLACK}, WHITE, y,
                               ("simple", v))
        out += expect_standing(ctx, {u: WHITE, x: BLACK, y: WHITE},
                               WHITE, {v})
        out += expect_classify(ctx, {}, WHITE, s, ("simple", t))
        out += expect_classify(ctx, {s: WHITE, t: BLACK}, WHITE, u,
                               ("simple", x))
        out += expect_classify(ctx, {u: WHITE, x: BLACK, y: WHITE,
                                     v: BLACK}, WHITE, s, ("simple", t))
        return out

    return Design(tmpl, rings, states=states,
                  probes=[("chain", probe_chain)])


# ---------------------------------------------------------------------------
# Bomb (standing insurance device, owner White as authored)


BOMB_STONES = [(1, -2), (2, -2), (1, -1), (0, -1), (0, 1), (1, 1),
               (0, 2), (-1, 2), (-1, -1), (-2, 2)]
BOMB_PORTS = {"c": (0, 0), "k": (1, 0), "l": (-1, 0), "m": (2, -1),
              "n": (-1, 1), "m2": (0, -2), "n2": (-2, 1)}


def bomb_rings(at=(0, 0), prefix=""):
    e = at

    def mv(c):
        return (c[0] + e[0], c[1] + e[1])

    p = {k: mv(v) for k, v in BOMB_PORTS.items()}
    rings = [
        (prefix + "a1", [mv(c) for c in loop6((1, -1))],
         {p["c"], p["k"], p["m"]}, WHITE),
        (prefix + "a2", [mv(c) for c in loop6((0, 1))],
         {p["c"], p["k"], p["n"]}, WHITE),
        (prefix + "b1", [mv(c) for c in loop6((0, -1))],
         {p["m2"], p["c"], p["l"]}, WHITE),
        (prefix + "b2", [mv(c) for c in loop6((-1, 1))],
         {p["l"], p["c"], p["n2"]}, WHITE),
    ]
    return [mv(c) for c in BOMB_STONES], p, rings


def bomb_armed_exempt(p):
    return {
        (p["k"], WHITE): ("double", {p["m"], p["n"]}),
        (p["l"], WHITE): ("double", {p["m2"], p["n2"]}),
        (p["m"], WHITE): ("simple", p["k"]),
        (p["n"], WHITE): ("simple", p["k"]),
        (p["m2"], WHITE): ("simple", p["l"]),
        (p["n2"], WHITE): ("simple", p["l"]),
    }


def bomb_design():
    stones, p, rings = bomb_rings()
    ports = [("c", "start", p["c"])] + \
        [(n, "open", p[n]) for n in ("k", "l", "m", "n", "m2", "n2")]
    tmpl = GadgetTemplate.of("bomb", stones, (), ports)
    armed = State("armed", {p["c"]: WHITE},
                  {"a1", "a2", "b1", "b2"}, bomb_armed_exempt(p))
    states = [State("fresh"), armed, State("dead", {p["c"]: BLACK})]

    def probe_undefusable(ctx):
        out = []
        out += expect_classify(ctx, {}, WHITE, p["c"], None)
        base = {p["c"]: WHITE}
        for cell in sorted(ctx.empties(ctx.board(base))):
            board = ctx.board({**base, cell: BLACK}, to_move=WHITE)
            seq = winning_threat_sequence(board, WHITE, max_plies=6,
                                          region=ctx.region)
            out += expect(seq is not None,
                          f"armed bomb defused by black at {cell}")
        return out

    return Design(tmpl, rings, states=states,
                  probes=[("undefusable", probe_undefusable)])


# ---------------------------------------------------------------------------
# Choice vertices.  The choice structure is a stock white wire from s to t;
# blocking one black out-wire start and arming the pair is one move.  A
# black punisher ring {u, s, t} threads the wire's own corridor row and
# loops south through the entry point u.


def choice_parts(L=5, with_u=True):
    s, t = (0, 0), (L, 0)
    a, b = (1, -2), (2, -2)
    u = (2, 3)
    white, black, _, rings = wire_cells(L)
    white = list(white) + [(3, -2)]       # kills the corridor-row pocket
    corridor = [(k, 0) for k in range(1, L)]
    dip = [(6, 0), (5, 1), (4, 2), (3, 2)]
    west = [(1, 3), (0, 3), (-1, 3)]
    close = [(-2, 0), (-1, 0)]
    black = list(black) + corridor + dip + west + close
    punisher = ([s] + corridor + [t, (6, 0), (5, 1), (4, 2), (3, 2)]
                + ([u] if with_u else []) + west
                + [(-2, 3), (-3, 3), (-4, 3), (-4, 2), (-3, 1)] + close)
    gaps = {s, t} | ({u} if with_u else set())
    if not with_u:
        black.append(u)
    r1 = [s, (1, -1), a] + [(k, -3) for k in range(2, L + 2)] + \
        [(L + 1, -2), (L, -1), t] + \
        [(k, 1) for k in range(L - 1, 0, -1)] + [(0, 1)]
    r2 = [s, (1, -1), b] + [(k, -3) for k in range(3, L + 2)] + \
        [(L + 1, -2), (L, -1), t] + \
        [(k, 1) for k in range(L - 1, 0, -1)] + [(0, 1)]
    rings_out = [("pair1", r1, {s, a, t}, WHITE),
                 ("pair2", r2, {s, b, t}, WHITE),
                 ("punisher", punisher, gaps, BLACK)]
    return s, t, a, b, u, white, black, rings_out


def choice_stubs(L, with_u):
    out = [
        Stub("sw", BLACK, "u", (0, 0), rotation=3),
        Stub("tw", BLACK, "u", (L, 0), rotation=0),
    ]
    if with_u:
        out.append(Stub("inw", WHITE, "v", (2, 3), rotation=4))
    return out


def choice_states(ctx_ports, with_u):
    s, t, a, b, u = [ctx_ports[k] for k in ("s", "t", "a", "b", "u")] \
        if with_u else \
        [ctx_ports.get(k) for k in ("s", "t", "a", "b")] + [None]
    return s, t, a, b, u


def vertex_12_design(L=5, with_u=True):
    s, t, a, b, u, white, black, rings = choice_parts(L, with_u)
    name = "vertex_12" if with_u else "vertex_02"
    ports = [("s", "end", s), ("t", "end", t),
             ("a", "open", a), ("b", "open", b)]
    if with_u:
        ports.insert(0, ("u", "start", u))
    tmpl = GadgetTemplate.of(name, white, black, ports)
    stubs = choice_stubs(L, with_u)

    sw_a, sw_b, sw_v = (-1, 2), (-2, 2), (-3, 0)
    tw_a, tw_b, tw_v = (L + 1, -2), (L + 2, -2), (L + 3, 0)
    in_start = (2, 6)

    pair_armed = {
        (t, WHITE): ("double", {a, b}),
        (a, WHITE): ("simple", t),
        (b, WHITE): ("simple", t),
    }
    pair_armed_rev = {
        (s, WHITE): ("double", {a, b}),
        (a, WHITE): ("simple", s),
        (b, WHITE): ("simple", s),
    }
    t_armed = {
        (tw_v, BLACK): ("double", {tw_a, tw_b}),
        (tw_a, BLACK): ("simple", tw_v),
        (tw_b, BLACK): ("simple", tw_v),
    }
    s_armed = {
        (sw_v, BLACK): ("double", {sw_a, sw_b}),
        (sw_a, BLACK): ("simple", sw_v),
        (sw_b, BLACK): ("simple", sw_v),
    }

    if with_u:
        entry = {u: BLACK, in_start: WHITE}
        fresh = State("fresh")
        entered = State("entered", dict(entry), {"punisher"},
                        {(s, BLACK): ("simple", t),
                         (t, BLACK): ("simple", s)})
    else:
        entry = {}
        fresh = State("fresh", {}, {"punisher"},
                      {(s, BLACK): ("simple", t),
                       (t, BLACK): ("simple", s)})
        entered = None

    blockA = State("blockA", {**entry, s: WHITE},
                   {"pair1", "pair2"}, pair_armed)
    blockB = State("blockB", {**entry, t: WHITE},
                   {"pair1", "pair2"}, pair_armed_rev)
    armA = State("armA", {**entry, s: WHITE, t: BLACK},
                 {"tw_r1", "tw_r2"}, t_armed)
    armB = State("armB", {**entry, t: WHITE, s: BLACK},
                 {"sw_r1", "sw_r2"}, s_armed)
    flowA = State("flowA", {**entry, s: WHITE, t: BLACK, tw_v: WHITE})
    flowB = State("flowB", {**entry, t: WHITE, s: BLACK, sw_v: WHITE})
    flowA_t1 = State("flowA-trade-ab",
                     {**entry, s: WHITE, t: BLACK, tw_v: WHITE,
                      a: BLACK, b: WHITE})
    flowA_t2 = State("flowA-trade-ba",
                     {**entry, s: WHITE, t: BLACK, tw_v: WHITE,
                      a: WHITE, b: BLACK})
    flowA_wt = State("flowA-wire-trade",
                     {**entry, s: WHITE, t: BLACK, tw_v: WHITE,
                      tw_a: WHITE, tw_b: BLACK})
    states = [fresh, blockA, blockB, armA, armB, flowA, flowB,
              flowA_t1, flowA_t2, flowA_wt]
    if entered:
        states.insert(1, entered)

    def probe_flow(ctx):
        out = []
        # blocking either start is quiet; the compulsion is virtual
        out += expect_classify(ctx, entry, WHITE, s, None)
        out += expect_classify(ctx, entry, WHITE, t, None)
        # virtual seal once blocked
        out += expect_classify(ctx, {**entry, s: WHITE}, WHITE, t,
                               ("double", {a, b}))
        # taking t is quiet and arms the black out wire
        out += expect_classify(ctx, {**entry, s: WHITE}, BLACK, t, None)
        out += expect_classify(ctx, {**entry, s: WHITE, t: BLACK},
                               BLACK, tw_v, ("double", {tw_a, tw_b}))
        # trade inside the pair
        out += expect_standing(ctx, {**entry, s: WHITE, a: BLACK,
                                     b: WHITE}, WHITE, {t})
        return out

    def probe_deviation(ctx):
        out = []
        # owner ignores the entry: enterer takes s with a simple threat
        # at t, which simultaneously arms the enterer's own s-wire
        out += expect_classify(ctx, entry, BLACK, s, ("simple", t))
        after = {**entry, s: BLACK, t: WHITE}
        out += expect_classify(ctx, after, BLACK, sw_v,
                               ("double", {sw_a, sw_b}))
        return out

    probes = [("flow", probe_flow), ("deviation", probe_deviation)]
    return Design(tmpl, rings, stubs=stubs, states=states, probes=probes)


def vertex_02_design(L=5):
    return vertex_12_design(L, with_u=False)


# ---------------------------------------------------------------------------
# (2,1) vertex.  Two black deterrent wire-pairs (one per entry point)
# share the spine Q-s-P; the white out wire starts at s.  Reentry is
# answered by the embedded bank; the v-gated rings supply the harmless
# a, b, c, d threats of the refutation line.


def vertex_21_design():
    s = (0, 0)
    u, v = (-4, 3), (4, 2)
    j1, j2 = (-3, 1), (-4, 1)
    k1, k2 = (3, 2), (2, 3)
    Q, P = (-1, 0), (0, 1)

    u_det = [(-4, 2), (-2, 1), (-1, 1), Q, P, (0, 2), (-1, 3),
             (-2, 3), (-3, 3), (-3, 0), (-2, 0)]
    v_det = [(3, 3), (2, 2), (1, 2), (0, 3), (-2, 2), (-2, 4),
             (-1, 4), (0, 4), (1, 4), (1, 1), (2, 1), (3, 1), (4, 1)]
    r_cd = [(5, 0), (7, -1), (6, 1), (5, 2)]
    r_ab = [(2, 4), (1, 6), (1, 3)]
    a, b = (2, 5), (1, 5)
    c, d = (6, -1), (7, 0)

    e_at = (7, -5)
    bomb_stones, bank, bombs = bomb_rings(e_at, prefix="bank_")

    black = sorted(u_det + v_det + r_cd + r_ab)
    white = sorted(bomb_stones)

    south = [P, (0, 2), (-1, 3), (-2, 3), (-3, 3)]
    det1 = [u, (-4, 2), j1, (-2, 1), (-1, 1), Q, s] + south
    det2 = [u, (-4, 2), j2, (-3, 0), (-2, 0), Q, s] + south
    east = [P, (1, 1), (2, 1), (3, 1), (4, 1), v]
    det3 = [v, (3, 3), k1, (2, 2), (1, 2), (0, 3), (-1, 3), (-2, 3),
            (-2, 2), (-1, 1), Q, s] + east[:-1]
    det4 = [v, (3, 3), k2, (1, 4), (0, 4), (-1, 4), (-2, 4), (-2, 3),
            (-2, 2), (-1, 1), Q, s] + east[:-1]
    ring_cd = [v, (4, 1), (5, 0), c, (7, -1), d, (6, 1), (5, 2)]
    ring_ab = [v, (3, 3), (2, 4), a, (1, 6), b, (1, 4), (1, 3),
               (2, 2), (2, 1), (3, 1), (4, 1)]

    rings = [
        ("det1", det1, {u, j1, s}, BLACK),
        ("det2", det2, {u, j2, s}, BLACK),
        ("det3", det3, {v, k1, s}, BLACK),
        ("det4", det4, {v, k2, s}, BLACK),
        ("prod_cd", ring_cd, {v, c, d}, BLACK),
        ("prod_ab", ring_ab, {v, a, b}, BLACK),
    ] + bombs

    ports = [("u", "start", u), ("v", "start", v), ("s", "end", s),
             ("j1", "open", j1), ("j2", "open", j2),
             ("k1", "open", k1), ("k2", "open", k2),
             ("a", "open", a), ("b", "open", b),
             ("c", "open", c), ("d", "open", d),
             ("e", "start", e_at)] + \
        [(n, "open", bank[n]) for n in ("k", "l", "m", "n", "m2", "n2")]
    tmpl = GadgetTemplate.of("vertex_21", white, black, ports)

    stubs = [
        Stub("ow", WHITE, "u", s, rotation=5),
        Stub("uin", WHITE, "v", u, rotation=5),
        Stub("vin", WHITE, "v", v, rotation=3),
    ]
    ow_a, ow_b, ow_v = (-1, -1), (0, -2), (3, -3)
    uin_start, vin_start = (-7, 6), (7, 2)

    out_armed = {
        (ow_v, WHITE): ("double", {ow_a, ow_b}),
        (ow_a, WHITE): ("simple", ow_v),
        (ow_b, WHITE): ("simple", ow_v),
    }
    prod_ex = {
        (a, BLACK): ("simple", b), (b, BLACK): ("simple", a),
        (c, BLACK): ("simple", d), (d, BLACK): ("simple", c),
    }
    u_entry_ex = {
        (s, BLACK): ("double", {j1, j2}),
        (j1, BLACK): ("simple", s),
        (j2, BLACK): ("simple", s),
    }
    v_entry_ex = {
        (s, BLACK): ("double", {k1, k2}),
        (k1, BLACK): ("simple", s),
        (k2, BLACK): ("simple", s),
        **prod_ex,
    }

    states = [
        State("fresh"),
        State("entered-u", {u: BLACK, uin_start: WHITE},
              {"det1", "det2"}, u_entry_ex),
        State("entered-v", {v: BLACK, vin_start: WHITE},
              {"det3", "det4", "prod_cd", "prod_ab"}, v_entry_ex),
        State("consumed-u",
              {u: BLACK, uin_start: WHITE, s: WHITE},
              {"ow_r1", "ow_r2"}, out_armed),
        State("consumed-v",
              {v: BLACK, vin_start: WHITE, s: WHITE},
              {"ow_r1", "ow_r2", "prod_cd", "prod_ab"},
              {**out_armed, **prod_ex}),
        State("done-u",
              {u: BLACK, uin_start: WHITE, s: WHITE, ow_v: BLACK}),
        State("done-v",
              {v: BLACK, vin_start: WHITE, s: WHITE, ow_v: BLACK},
              {"prod_cd", "prod_ab"}, prod_ex),
        State("reentered",
              {u: BLACK, uin_start: WHITE, s: WHITE, ow_v: BLACK,
               v: BLACK},
              {"prod_cd", "prod_ab"}, prod_ex),
    ]

    def probe_entry(ctx):
        out = []
        entry = {u: BLACK, uin_start: WHITE}
        out += expect_classify(ctx, entry, BLACK, s, ("double", {j1, j2}))
        out += expect_classify(ctx, entry, WHITE, s, None)
        done = {**entry, s: WHITE}
        out += expect_classify(ctx, done, WHITE, ow_v,
                               ("double", {ow_a, ow_b}))
        entry_v = {v: BLACK, vin_start: WHITE}
        out += expect_classify(ctx, entry_v, BLACK, s,
                               ("double", {k1, k2}))
        return out

    def probe_reentry(ctx):
        out = []
        base = {u: BLACK, uin_start: WHITE, s: WHITE, ow_v: BLACK,
                v: BLACK}
        out += expect_classify(ctx, base, WHITE, bank["c"], None)
        armed = {**base, bank["c"]: WHITE}
        out += expect_classify(ctx, armed, BLACK, a, ("simple", b))
        after_ab = {**armed, a: BLACK, b: WHITE}
        out += expect_classify(ctx, after_ab, BLACK, c, ("simple", d))
        after_cd = {**after_ab, c: BLACK, d: WHITE}
        out += expect_classify(ctx, after_cd, WHITE, bank["k"],
                               ("double", {bank["m"], bank["n"]}))
        board = ctx.board({**after_cd}, to_move=WHITE)
        seq = winning_threat_sequence(board, WHITE, max_plies=6,
                                      region=ctx.region)
        out += expect(seq is not None, "bank cannot finish after prods")
        return out

    probes = [("entry", probe_entry), ("reentry", probe_reentry)]
    return Design(tmpl, rings, stubs=stubs, states=states, probes=probes)


# ---------------------------------------------------------------------------
# Driver


def builders():
    return {
        "wire": lambda: wire_design(4),
        "curve": curve_design,
        "crossover": crossover_design,
        "bomb": bomb_design,
        "vertex_12": lambda: vertex_12_design(5),
        "vertex_02": vertex_02_design,
        "vertex_21": vertex_21_design,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", action="append", default=None,
                    help="audit just the named template(s)")
    ap.add_argument("--shallow", action="store_true",
                    help="skip the gap-subset sweep")
    ap.add_argument("--no-write", action="store_true")
    ap.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), os.pardir,
        "src", "gadgetforge", "templates"))
    args = ap.parse_args(argv)

    chosen = builders()
    if args.only:
        chosen = {k: v for k, v in chosen.items() if k in args.only}

    total = 0
    greens = []
    for name, build in chosen.items():
        try:
            design = build()
        except Exception as e:
            print(f"audit {name}: build failed: {e!r}")
            total += 1
            continue
        problems = audit(design, deep=not args.shallow)
        t = design.template
        print(f"audit {t.name}: {len(t.white)}W {len(t.black)}B "
              f"{len(t.ports)} ports, {len(design.rings)} rings, "
              f"{len(design.states)} states: "
              f"{'ok' if not problems else f'{len(problems)} problem(s)'}")
        for p in problems[:40]:
            print(f"  {p}")
        if len(problems) > 40:
            print(f"  ... and {len(problems) - 40} more")
        total += len(problems)
        if not problems:
            greens.append(design.template)

    if total:
        print(f"audit total: {total} problem(s)")
    if not args.no_write and greens and not total:
        os.makedirs(args.out, exist_ok=True)
        for tmpl in greens:
            path = os.path.join(args.out, f"{tmpl.name}.gdt")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(format_template(tmpl))
            print(f"wrote {os.path.relpath(path)}")
    return 1 if total else 0


if __name__ == "__main__":
    sys.exit(main())
