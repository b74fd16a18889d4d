"""Compiling rooted digraph move games into Havannah positions.

The compiler pre-places almost-ring material so that legal play is a
forced cascade: each stone either answers a live ring threat or is the
mover's one sanctioned branching point.  Templates (see `gadgets`) are
authored in a fixed color frame: the authored-white side is the side
whose almost-rings drive the forcing in that gadget, and instantiating
with color "B" hands that role to Black.

Forcing vocabulary, all verified mechanically by `verify_gadget`:

* wire: entry stone u threatens to seal the far port v for a double at
  the private gaps a, b; the opponent must take v, possibly trading a
  and b on the way.
* curve: a sealed ring short of two cells; the entry completes all but
  the exit, so the opponent must block there.  Bends a chain by 120
  degrees.
* crossover: two such relay paths crossing; the through path hands the
  signal across the other path's ring interior without touching its
  fence, so either path can fire first and the other still works.
* vertex gadgets: a ring short of u, s, t (choice), short of s, t
  (start), or two rings sharing the exit gap s and the stones beside it
  (merge).  The shared corner keeps three consecutive directions at s
  free for the opposite-color out wire, and two opposite-color plug
  stones inside the merge kill the pocket rings the packed fences would
  otherwise stand ready to close.  A stone on the dead merge entry
  threatens nothing, so reentering there just loses the tempo race.
* bomb: two wire-shaped lobes sharing their entry.  Firing needs two
  free tempi and cannot be parried once the entry stone stands, which is
  what punishes the side that runs out of duties first; the loser of the
  reentry race can kill one shared entry, so each color banks two.

verify_gadget builds a quiet window around one placed template plus the
stub wires its contract needs, then replays the protocol phase by phase.
At every compelled ply it tries every other empty window cell for the
compelled side and requires a refutation; at choice plies it verifies
the surrender line (the forcing side seals one option and drives the
chooser to the other) instead, since dodging a choice merely donates it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import hexgrid, threats
from .gadgets import GadgetTemplate, PlacedGadget, load_templates, wire_template
from .havannah import (
    BLACK,
    WHITE,
    Board,
    Double,
    Simple,
    classify_threat,
    opponent,
    threat_completions,
    winner,
)


class LayoutError(ValueError):
    """A placement or route does not fit on the board."""


class RoutingError(ValueError):
    """No legal wire route between the requested ports."""


class SetupError(ValueError):
    """A verification window cannot hold the required material."""


@dataclass(frozen=True)
class ContractFailure:
    template: str
    phase: str
    ply: int
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    template: str
    color: str
    rotation: int
    mirrored: bool
    plies: int
    deviations_refuted: int
    surrenders_checked: int
    failures: tuple

    @property
    def ok(self):
        return not self.failures


def merge_placements(placements, side=None):
    """Stone map of several placements; footprints may only share ports.

    Same-color stone overlaps are allowed (a stone may serve two rings);
    a cell claimed by both colors, or a stone on another gadget's port,
    is a layout error.
    """
    stones = {}
    ports = set()
    for g in placements:
        ports.update(g.port_cells().values())
    for g in placements:
        for cell, color in g.stones().items():
            if side is not None and not hexgrid.in_board(cell[0], cell[1], side):
                raise LayoutError(f"stone {cell} falls off the side-{side} board")
            if cell in ports:
                raise LayoutError(f"stone at {cell} covers a port")
            if stones.get(cell, color) != color:
                raise LayoutError(f"conflicting colors at {cell}")
            stones[cell] = color
    return stones


def _radius(cells):
    return max(max(abs(q), abs(r), abs(q + r)) for q, r in cells) if cells else 0


def fit_stub(template, color, anchor_port, target, occupied, ports_to_keep,
             taken_ports=()):
    """First isometry that pins `anchor_port` on `target` without conflicts.

    Orientations are scored by how many existing stones the stub would
    touch, so the fitter prefers placements that do not weld groups
    together.  Returns a PlacedGadget or None.
    """
    best = None
    anchor = template.port(anchor_port).cell
    for mirrored, rotation in itertools.product((False, True), range(6)):
        aq, ar = hexgrid.transform(anchor[0], anchor[1], rotation, mirrored)
        translation = (target[0] - aq, target[1] - ar)
        g = PlacedGadget(template, color, translation, rotation, mirrored)
        stones = g.stones()
        cells = set(stones)
        port_cells = set(g.port_cells().values())
        bad = False
        for cell, col in stones.items():
            if cell in ports_to_keep or occupied.get(cell, col) != col:
                bad = True
                break
        if bad:
            continue
        if (port_cells - {target}) & (set(occupied) | set(taken_ports)):
            continue
        merged = dict(occupied)
        merged.update(stones)
        if _quiet_everywhere(merged) is not None:
            continue
        contact = sum(1 for c in cells
                      for n in hexgrid.neighbors(c[0], c[1])
                      if n in occupied)
        key = (contact, mirrored, rotation)
        if best is None or key < best[0]:
            best = (key, g)
    return None if best is None else best[1]


def _quiet_everywhere(stones, margin=3):
    side = _radius(stones) + margin + 1
    board = Board(side, dict(stones), WHITE)
    for color in (WHITE, BLACK):
        report = threat_completions(board, color)
        if report.completions:
            return sorted(report.completions), color
    return None


def race_win(board, racer, builds, region=None, max_plies=14,
             racer_first=True):
    """Forced ring win for `racer` allowed quiet moves at `builds`, or None.

    Threat walks refuse quiet moves by contract, but the endgame race
    turns on them: arming a bomb threatens nothing on the spot.  Racer
    candidates are ring completions, threat moves, and the remaining
    build cells.  The opponent may block a pending completion, preempt
    any build cell, make threats of his own (which the racer must then
    answer), or sit still; sitting still stands in for far moves with no
    effect inside the window.  Exact and memoized over that move model.
    Returns the principal line against the sit-still defense.
    """
    walk = threats._Walk(board, region)
    defender = opponent(racer)
    builds = tuple(b for b in builds if b not in walk.stones)
    memo = {}

    def open_builds():
        return [b for b in builds if b not in walk.stones]

    def racer_turn(plies):
        comps = walk.completions(racer)
        if comps:
            return (min(comps),)
        if plies < 2:
            return None
        danger = walk.completions(defender)
        if len(danger) >= 2:
            return None
        key = (frozenset(walk.overlay.items()), plies)
        if key in memo:
            return memo[key]
        if danger:
            cands = [min(danger)]
        else:
            cands = open_builds()
            for c in walk.candidates(racer):
                if c not in cands and walk.classify(racer, c) is not None:
                    cands.append(c)
        best = None
        for m in cands:
            if walk.reply_completes_ring(m, racer):
                best = (m,)
                break
            walk.put(m, racer)
            try:
                rest = defender_turn(plies - 1)
            finally:
                walk.take(m)
            if rest is not None:
                best = (m,) + rest
                break
        memo[key] = best
        return best

    def defender_turn(plies):
        if walk.completions(defender):
            return None
        if plies < 1:
            return None
        principal = racer_turn(plies - 1)
        if principal is None:
            return None
        replies = list(walk.completions(racer))
        for c in open_builds():
            if c not in replies:
                replies.append(c)
        for c in walk.candidates(defender):
            if c not in replies and walk.classify(defender, c) is not None:
                replies.append(c)
        for c in replies:
            if walk.reply_completes_ring(c, defender):
                return None
            walk.put(c, defender)
            try:
                if racer_turn(plies - 1) is None:
                    return None
            finally:
                walk.take(c)
        return principal

    if racer_first:
        return racer_turn(max_plies)
    return defender_turn(max_plies)


class _Runner:
    """Replays a contract, checking threats and refuting deviations."""

    def __init__(self, board, port_map, region, far_cell, template_name,
                 forcing, refute_plies, exhaustive=True):
        self.side = board.side
        self.stones = dict(board.stones)
        self.ports = port_map
        self.region = tuple(region)
        self.far_cell = far_cell
        self.template = template_name
        self.forcing = forcing
        self.refute_plies = refute_plies
        self.exhaustive = exhaustive
        self.to_move = None
        self.plies = 0
        self.marked = 0
        self.phase = "setup"
        self.failures = []
        self.deviations = 0
        self.surrenders = 0
        self._stack = []

    # -- bookkeeping -------------------------------------------------

    def color(self, side):
        return self.forcing if side == "F" else opponent(self.forcing)

    def cell(self, ref):
        return self.ports[ref] if isinstance(ref, str) else ref

    def board(self, to_move):
        return Board(self.side, self.stones, to_move)

    def fail(self, detail):
        self.failures.append(ContractFailure(self.template, self.phase,
                                             self.plies, detail))

    def push(self):
        self._stack.append((dict(self.stones), self.to_move, self.plies))

    def pop(self):
        self.stones, self.to_move, self.plies = self._stack.pop()

    def begin(self, phase, first_mover):
        self.phase = phase
        self.to_move = self.color(first_mover)

    def mark(self):
        self.marked = self.plies

    def expect_plies_within(self, bound):
        used = self.plies - self.marked
        if used > bound:
            self.fail(f"protocol used {used} plies, bound {bound}")

    # -- moves -------------------------------------------------------

    def play(self, side, ref):
        color = self.color(side)
        cell = self.cell(ref)
        if color != self.to_move:
            self.fail(f"contract plays {color} out of turn at {cell}")
        if self.stones.get(cell) is not None:
            self.fail(f"cell {cell} already occupied")
            return
        self.stones[cell] = color
        self.to_move = opponent(color)
        self.plies += 1

    def compelled(self, side, ref, alts=()):
        """Protocol move where every alternative must lose outright."""
        color = self.color(side)
        cell = self.cell(ref)
        skip = {cell} | {self.cell(a) for a in alts}
        if self.exhaustive:
            empties = [c for c in self.region
                       if c not in self.stones and c not in skip]
            empties.append(self.far_cell)
            for dev in empties:
                if dev in self.stones:
                    continue
                res = threats.refute(self.board(color), color, dev,
                                     region=self.region,
                                     max_plies=self.refute_plies)
                if res is None:
                    self.fail(f"{color} deviation {dev} instead of {cell} "
                              "not refuted")
                else:
                    self.deviations += 1
        self.play(side, ref)

    def choice(self, side, refs, surrender):
        """Branch ply: dodging must hand the choice over, not the game.

        `surrender` is a callback run after each deviation; it asserts
        the forcing side's prod line from that position.
        """
        color = self.color(side)
        allowed = {self.cell(r) for r in refs}
        if self.exhaustive:
            empties = [c for c in self.region
                       if c not in self.stones and c not in allowed]
            empties.append(self.far_cell)
            for dev in empties:
                if dev in self.stones:
                    continue
                self.push()
                self.play(side, dev)
                surrender(self)
                self.pop()
                self.surrenders += 1

    # -- assertions --------------------------------------------------

    def expect_completions(self, side, *refs):
        color = self.color(side)
        want = {self.cell(r) for r in refs}
        got = set(threat_completions(self.board(self.to_move), color).completions)
        if got != want:
            self.fail(f"{color} completions {sorted(got)}, expected "
                      f"{sorted(want)}")

    def expect_quiet(self):
        self.expect_completions("F")
        self.expect_completions("D")

    def expect_threat(self, side, ref, answer=None, double=None):
        color = self.color(side)
        cell = self.cell(ref)
        got = classify_threat(self.board(self.to_move), color, cell)
        if double is not None:
            want = frozenset(self.cell(r) for r in double)
            if not isinstance(got, Double) or got.cells != want:
                self.fail(f"{color} at {cell}: expected double {sorted(want)}, "
                          f"got {got}")
        elif answer is not None:
            if not isinstance(got, Simple) or got.answer != self.cell(answer):
                self.fail(f"{color} at {cell}: expected simple threat answered "
                          f"at {self.cell(answer)}, got {got}")
        elif got is not None:
            self.fail(f"{color} at {cell}: expected no threat, got {got}")

    def expect_no_threat_moves(self, side):
        color = self.color(side)
        board = self.board(self.to_move)
        noisy = [c for c in self.region if c not in self.stones
                 and classify_threat(board, color, c) is not None]
        if noisy:
            self.fail(f"{color} still has threat moves at {noisy}")

    def expect_winner(self, side):
        color = self.color(side)
        got = winner(self.board(self.to_move))
        if got != color:
            self.fail(f"expected {color} ring win, winner() says {got!r}")

    def race(self, side, build_refs, max_plies=14):
        # Quiet-move race: `side` must force a ring using only the listed
        # build cells plus threat moves, whoever is on the move now.
        color = self.color(side)
        builds = tuple(self.cell(ref) for ref in build_refs)
        line = race_win(self.board(self.to_move), color, builds,
                        region=self.region, max_plies=max_plies,
                        racer_first=(self.to_move == color))
        if line is None:
            self.fail(f"{side} has no ring race within {max_plies} plies")
        return line


# ---------------------------------------------------------------------------
# Per-template contracts, written in the authored color frame.
# F = authored-white (the forcing side), D = the compelled side.


def _contract_wire(r):
    r.begin("activation", "F")
    r.expect_quiet()
    r.play("F", "u")
    r.expect_completions("F")
    r.expect_threat("F", "v", double=("a", "b"))
    r.push()
    r.compelled("D", "v", alts=("a", "b"))
    r.expect_quiet()
    r.pop()
    for first, second in (("a", "b"), ("b", "a")):
        r.push()
        r.phase = f"interleave-{first}"
        r.play("D", first)
        r.expect_threat("F", second, answer="v")
        r.play("F", second)
        r.expect_completions("F", "v")
        r.compelled("D", "v")
        r.expect_quiet()
        r.pop()


def _contract_curve(r):
    r.begin("activation", "F")
    r.expect_quiet()
    r.play("F", "u")
    r.expect_completions("F", "v")
    r.compelled("D", "v")
    r.expect_quiet()


def _run_crossover_path(r, entry, inner_in, inner_out, exit_):
    r.play("F", entry)
    r.expect_completions("F", inner_in)
    r.compelled("D", inner_in)
    r.expect_completions("D", inner_out)
    r.compelled("F", inner_out)
    r.expect_completions("F", exit_)
    r.compelled("D", exit_)
    r.expect_quiet()


def _run_crossover_short(r):
    r.play("F", "s")
    r.expect_completions("F", "t")
    r.compelled("D", "t")
    r.expect_quiet()


def _contract_crossover(r):
    r.begin("through-then-cross", "F")
    r.expect_quiet()
    r.push()
    _run_crossover_path(r, "u", "x", "y", "v")
    r.begin("cross-after-through", "F")
    _run_crossover_short(r)
    r.pop()
    r.begin("cross-then-through", "F")
    r.push()
    _run_crossover_short(r)
    r.begin("through-after-cross", "F")
    _run_crossover_path(r, "u", "x", "y", "v")
    r.pop()


def _choice_surrender(seal, driven):
    """After a dodge, F seals `seal` and drives D into `driven`.

    Whether D's position at `driven` still profits him (his own out wire
    may have been spoiled by the dodge itself) is his problem; the local
    obligation is only that the choice gets made.
    """

    def check(r):
        r.phase += "/surrender"
        r.expect_threat("F", seal, answer=driven)
        r.play("F", seal)
        r.expect_completions("F", driven)
        r.compelled("D", driven)

    return check


def _contract_vertex_12(r):
    r.begin("arrival", "F")
    r.expect_quiet()
    r.play("F", "u")
    r.expect_completions("F")
    r.expect_threat("F", "s", answer="t")
    r.expect_threat("F", "t", answer="s")
    for pick, other, stub, stub_other in (("s", "t", "out_s", "out_t"),
                                          ("t", "s", "out_t", "out_s")):
        r.push()
        r.phase = f"choose-{pick}"
        r.play("D", pick)
        r.expect_completions("F")
        r.expect_threat("D", f"{stub}.v", double=(f"{stub}.a", f"{stub}.b"))
        r.compelled("F", f"{stub}.v", alts=(f"{stub}.a", f"{stub}.b"))
        r.expect_quiet()
        r.pop()
    r.phase = "dodge"
    r.choice("D", ("s", "t"), _choice_surrender("s", "t"))


def _contract_vertex_02(r):
    r.begin("opening", "D")
    r.expect_quiet()
    r.expect_threat("F", "s", answer="t")
    r.expect_threat("F", "t", answer="s")
    for pick, stub in (("s", "out_s"), ("t", "out_t")):
        r.push()
        r.phase = f"choose-{pick}"
        r.play("D", pick)
        r.expect_completions("F")
        r.expect_threat("D", f"{stub}.v", double=(f"{stub}.a", f"{stub}.b"))
        r.compelled("F", f"{stub}.v", alts=(f"{stub}.a", f"{stub}.b"))
        r.expect_quiet()
        r.pop()
    r.phase = "dodge"
    r.choice("D", ("s", "t"), _choice_surrender("s", "t"))


def _vertex_21_exit(r):
    """D at s arms his out wire; F is dragged to its far port."""
    r.expect_threat("D", "out.v", double=("out.a", "out.b"))
    r.compelled("F", "out.v", alts=("out.a", "out.b"))


def _contract_vertex_21(r):
    for entry in ("u1", "u2"):
        r.begin(f"entry-{entry}", "F")
        r.expect_quiet()
        r.push()
        r.play("F", entry)
        r.expect_completions("F", "s")
        r.compelled("D", "s")
        _vertex_21_exit(r)
        r.expect_quiet()
        r.pop()

    # Consume the gadget through one entry, then let the loser arrive at
    # the other.  The dead stone threatens nothing, so the defender gets
    # the next free ply and cashes it on the banked bombs; the reenterer
    # can kill one shared trigger and one lobe, never both bombs.
    bombs = ("bomb1.c", "bomb1.k", "bomb1.l",
             "bomb2.c", "bomb2.k", "bomb2.l")
    for used, dead in (("u1", "u2"), ("u2", "u1")):
        r.begin(f"reentry-{dead}", "F")
        r.push()
        r.play("F", used)
        r.play("D", "s")
        r.play("F", "out.v")
        r.expect_quiet()
        r.begin(f"reentry-{dead}", "F")     # off-window play returns F
        r.mark()
        r.play("F", dead)
        r.expect_completions("F")
        r.expect_no_threat_moves("F")
        r.push()
        r.phase = f"reentry-{dead}/canonical"
        r.play("D", "bomb1.c")
        r.play("F", "bomb2.c")              # steal the other trigger
        r.play("D", "bomb1.k")
        r.expect_completions("D", "bomb1.m", "bomb1.n")
        r.play("F", "bomb1.m")
        r.play("D", "bomb1.n")
        r.expect_winner("D")
        r.expect_plies_within(16)
        r.pop()
        r.race("D", bombs, max_plies=15)
        r.pop()


def _contract_bomb(r):
    r.begin("arming", "F")
    r.expect_quiet()
    r.play("F", "c")
    r.expect_completions("F")
    r.expect_completions("D")
    for defense, fire, dbl in (("k", "l", ("m2", "n2")),
                               ("l", "k", ("m", "n")),
                               (None, "k", ("m", "n"))):
        r.push()
        r.phase = f"fire-after-{defense}"
        r.play("D", defense if defense else r.far_cell)
        r.play("F", fire)
        r.expect_completions("F", *dbl)
        r.play("D", dbl[0])
        r.play("F", dbl[1])
        r.expect_winner("F")
        r.pop()


CONTRACTS = {
    "wire": _contract_wire,
    "curve": _contract_curve,
    "crossover": _contract_crossover,
    "vertex_12": _contract_vertex_12,
    "vertex_02": _contract_vertex_02,
    "vertex_21": _contract_vertex_21,
    "bomb": _contract_bomb,
}

# Stub gadgets each contract needs: (name, stub color side, anchor port on
# the stub, port of the main template it must land on; None means free-
# floating, with the template looked up by the name less any digit suffix).
STUB_SPECS = {
    "wire": (),
    "curve": (),
    "crossover": (),
    "vertex_12": (("out_s", "D", "u", "s"), ("out_t", "D", "u", "t")),
    "vertex_02": (("out_s", "D", "u", "s"), ("out_t", "D", "u", "t")),
    "vertex_21": (("out", "D", "u", "s"),
                  ("bomb1", "D", None, None), ("bomb2", "D", None, None)),
    "bomb": (),
}


def _place_free_stub(template, color, occupied, keep_ports, buffer=2):
    """Spiral over translations until the stub drops in quietly.

    A `buffer` of empty cells is kept between the stub and everything
    already placed; rest quietness alone would allow contact positions
    whose rings entangle once the protocols start filling gaps.
    """
    taken = set(occupied) | keep_ports
    radius = _radius(taken) + 2
    for dist in range(2, radius + 10):
        ring = [c for c in hexgrid.board_cells(dist + 1)
                if hexgrid.distance((0, 0), c) == dist]
        for t in sorted(ring, key=lambda c: (c[1], c[0])):
            g = PlacedGadget(template, color, t, 0, False)
            cells = set(g.stones()) | set(g.port_cells().values())
            if any(hexgrid.distance(c, o) <= buffer
                   for c in cells for o in taken):
                continue
            merged = dict(occupied)
            merged.update(g.stones())
            if _quiet_everywhere(merged) is None:
                return g
    return None


def build_window(template, color=WHITE, rotation=0, mirrored=False,
                 registry=None, margin=6):
    """Place the template plus its contract stubs; returns the pieces.

    The window board is sized to hold everything with `margin` empty
    rings around it; a margin under 3 cannot keep stub searches honest
    and raises SetupError.
    """
    if margin < 3:
        raise SetupError("window margin must be at least 3")
    stub_wire = wire_template(2)
    if registry and "wire" in registry:
        stub_wire = registry["wire"]
    main = PlacedGadget(template, color, (0, 0), rotation, mirrored)
    placements = {"": main}
    occupied = dict(main.stones())
    ports = {name: cell for name, cell in main.port_cells().items()}
    keep = set(ports.values())
    forcing = color
    for spec in STUB_SPECS.get(template.name, ()):
        name, side, anchor, target = spec
        stub_color = forcing if side == "F" else opponent(forcing)
        stub_template = stub_wire
        if target is None:
            base = name.rstrip("0123456789")
            stub_template = (registry or {}).get(base)
            if stub_template is None:
                raise SetupError(f"window needs a {base} template")
            g = _place_free_stub(stub_template, stub_color, occupied, keep)
            if g is None:
                raise SetupError(f"no quiet placement for stub {name}")
        else:
            g = fit_stub(stub_template, stub_color, anchor, ports[target],
                         occupied, keep - {ports[target]},
                         taken_ports=set(ports.values()))
            if g is None:
                raise SetupError(f"stub {name} does not fit at {target}")
        placements[name] = g
        for cell, col in g.stones().items():
            occupied[cell] = col
        for pname, cell in g.port_cells().items():
            ports[f"{name}.{pname}"] = cell
            keep.add(cell)
    noisy = _quiet_everywhere(occupied)
    if noisy is not None:
        raise SetupError(f"window not quiet at rest: {noisy}")
    radius = _radius(set(occupied) | keep)
    side = radius + margin + 1
    board = Board(side, occupied, WHITE)
    region = sorted({c for base in (set(occupied) | keep)
                     for c in _disk(base, 2)
                     if hexgrid.in_board(c[0], c[1], side)},
                    key=lambda c: (c[1], c[0]))
    return board, placements, ports, region


def _disk(center, radius):
    q0, r0 = center
    out = []
    for dq in range(-radius, radius + 1):
        for dr in range(max(-radius, -dq - radius), min(radius, -dq + radius) + 1):
            out.append((q0 + dq, r0 + dr))
    return out


def verify_gadget(template, color=WHITE, rotation=0, mirrored=False,
                  registry=None, margin=6, refute_plies=8, exhaustive=True):
    """Run the template's forcing contract in one oriented window."""
    if template.name not in CONTRACTS:
        raise SetupError(f"no contract for template {template.name!r}")
    board, placements, ports, region = build_window(
        template, color, rotation, mirrored, registry, margin)
    far = (0, -(board.side - 1))
    runner = _Runner(board, ports, region, far, template.name, color,
                     refute_plies, exhaustive)
    CONTRACTS[template.name](runner)
    return VerifyReport(template.name, color, rotation, mirrored,
                        runner.plies, runner.deviations, runner.surrenders,
                        tuple(runner.failures))


def verify_template_everywhere(template, registry=None, margin=6,
                               refute_plies=8, exhaustive=True):
    """Contract sweep over both colors and all 12 isometries."""
    reports = []
    for color in (WHITE, BLACK):
        for mirrored in (False, True):
            for rotation in range(6):
                reports.append(verify_gadget(
                    template, color, rotation, mirrored,
                    registry=registry, margin=margin,
                    refute_plies=refute_plies, exhaustive=exhaustive))
    return reports
