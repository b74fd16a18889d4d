"""Generalized Geography: rules, exact solver, instance simplification.

A token starts on the initial vertex, players alternate moving it along
out-edges to unvisited vertices, and whoever leaves the opponent without a
move wins.  `simplify` rewrites a bipartite degree-<=3 instance into a
certificate tree whose leaves are simplified instances: a (0,2) initial
vertex and otherwise only (1,1)-, (1,2)-, (2,1)-vertices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .solver import LOSS, WIN, BudgetExceededError, SolveResult

MAX_VERTICES = 64  # visited sets are fixed-width bitsets keyed by vertex id


class PreconditionError(ValueError):
    """Input outside the contract (degree, bipartiteness, width)."""


@dataclass(frozen=True)
class GGInstance:
    vertex_count: int
    edges: frozenset
    initial: int

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("vertex_count must be positive")
        if not 0 <= self.initial < self.vertex_count:
            raise ValueError("initial vertex out of range")
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop at {a}")
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise ValueError(f"edge ({a},{b}) out of range")

    @staticmethod
    def of(vertex_count, initial, edges):
        return GGInstance(vertex_count, frozenset(tuple(e) for e in edges), initial)

    def successors(self):
        out = {v: set() for v in range(self.vertex_count)}
        for a, b in self.edges:
            out[a].add(b)
        return out

    def predecessors(self):
        out = {v: set() for v in range(self.vertex_count)}
        for a, b in self.edges:
            out[b].add(a)
        return out


@dataclass(frozen=True)
class GGState:
    visited: frozenset
    token: int
    to_move: int

    def __post_init__(self):
        if self.token not in self.visited:
            raise ValueError("token must be visited")


def initial_state(instance):
    return GGState(frozenset([instance.initial]), instance.initial, 1)


def legal_moves(state, instance):
    if not 0 <= state.token < instance.vertex_count:
        raise ValueError(f"token {state.token} out of range")
    return instance.successors()[state.token] - state.visited


def winner_if_terminal(state, instance):
    if legal_moves(state, instance):
        return None
    return 2 if state.to_move == 1 else 1


def apply_move(state, instance, vertex):
    if vertex not in legal_moves(state, instance):
        raise ValueError(f"illegal move to {vertex}")
    return GGState(state.visited | {vertex}, vertex,
                   2 if state.to_move == 1 else 1)


def solve(instance, budget=5_000_000):
    """Exact value for the player to move, memoized on (token, visited).

    The visited set is a bitset; instances wider than MAX_VERTICES are
    rejected up front rather than risking key collisions.
    """
    if instance.vertex_count > MAX_VERTICES:
        raise PreconditionError(
            f"instance has {instance.vertex_count} vertices; bitset width is {MAX_VERTICES}")
    succ = {v: sorted(s) for v, s in instance.successors().items()}
    memo = {}
    stats = {"nodes": 0, "hits": 0}

    def rec(token, visited):
        key = (token, visited)
        hit = memo.get(key)
        if hit is not None:
            stats["hits"] += 1
            return hit
        stats["nodes"] += 1
        if stats["nodes"] > budget:
            raise BudgetExceededError(f"gg solve exceeded {budget} nodes")
        moves = [s for s in succ[token] if not visited >> s & 1]
        if not moves:
            out = (LOSS, ())
        else:
            out = None
            for m in moves:
                value, pv = rec(m, visited | 1 << m)
                if value == LOSS:
                    out = (WIN, (m,) + pv)
                    break
            if out is None:
                value, pv = rec(moves[0], visited | 1 << moves[0])
                out = (LOSS, (moves[0],) + pv)
        memo[key] = out
        return out

    value, pv = rec(instance.initial, 1 << instance.initial)
    return SolveResult(value, pv, stats["nodes"], stats["hits"], len(memo))


def check_preconditions(instance):
    """Degree <= 3 everywhere and underlying graph bipartite, else error."""
    if instance.vertex_count > MAX_VERTICES:
        raise PreconditionError("instance too wide for the bitset")
    degree = {v: 0 for v in range(instance.vertex_count)}
    und = {v: set() for v in range(instance.vertex_count)}
    for a, b in instance.edges:
        degree[a] += 1
        degree[b] += 1
        und[a].add(b)
        und[b].add(a)
    for v, d in degree.items():
        if d > 3:
            raise PreconditionError(f"vertex {v} has degree {d} > 3")
    color = {}
    for start in range(instance.vertex_count):
        if start in color:
            continue
        color[start] = 0
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for u in und[v]:
                if u not in color:
                    color[u] = 1 - color[v]
                    frontier.append(u)
                elif color[u] == color[v]:
                    raise PreconditionError("graph is not bipartite")
    return color


def bipartition(instance):
    """0/1 class per vertex from a deterministic 2-coloring scan."""
    return check_preconditions(instance)


class GGGame:
    """GameInterface adapter so the generic solver can run GG."""

    def __init__(self, instance):
        self.instance = instance
        self._succ = {v: sorted(s) for v, s in instance.successors().items()}

    def initial_state(self):
        return initial_state(self.instance)

    def legal_moves(self, state):
        return [s for s in self._succ[state.token] if s not in state.visited]

    def apply(self, state, move):
        return apply_move(state, self.instance, move)

    def is_terminal(self, state):
        return not self.legal_moves(state)

    def terminal_winner(self, state):
        return winner_if_terminal(state, self.instance)

    def player_to_move(self, state):
        return state.to_move

    def key(self, state):
        bits = 0
        for v in state.visited:
            bits |= 1 << v
        return (state.token, bits, state.to_move)


# --- simplification -------------------------------------------------------

@dataclass(frozen=True)
class Step:
    rule: str
    vertices: tuple


@dataclass(frozen=True)
class Leaf:
    steps: tuple
    instance: GGInstance


@dataclass(frozen=True)
class Const:
    steps: tuple
    value: str


@dataclass(frozen=True)
class Not:
    steps: tuple
    child: object


@dataclass(frozen=True)
class Or:
    steps: tuple
    children: tuple


def is_simplified(instance):
    """(0,2) initial vertex; every other vertex (1,1), (1,2), or (2,1)."""
    succ = instance.successors()
    pred = instance.predecessors()
    v0 = instance.initial
    if len(pred[v0]) != 0 or len(succ[v0]) != 2:
        return False
    for v in range(instance.vertex_count):
        if v == v0:
            continue
        io = (len(pred[v]), len(succ[v]))
        if io not in ((1, 1), (1, 2), (2, 1)):
            return False
    return True


def _remove_vertices(instance, doomed, new_initial=None):
    """Induced subgraph with `doomed` gone, ids compacted in order."""
    keep = [v for v in range(instance.vertex_count) if v not in doomed]
    if not keep:
        raise ValueError("removal would empty the instance")
    remap = {v: i for i, v in enumerate(keep)}
    edges = frozenset((remap[a], remap[b]) for a, b in instance.edges
                      if a not in doomed and b not in doomed)
    initial = instance.initial if new_initial is None else new_initial
    return GGInstance(len(keep), edges, remap[initial]), remap


def _reachable(instance):
    succ = instance.successors()
    seen = {instance.initial}
    frontier = [instance.initial]
    while frontier:
        v = frontier.pop()
        for u in succ[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return seen


def _simplify(instance):
    steps = []
    inst = instance
    while True:
        succ = inst.successors()
        pred = inst.predecessors()
        v0 = inst.initial

        if not succ[v0]:
            # The first player is stuck before moving.
            return Const(tuple(steps), LOSS)

        sinks = sorted(v for v in range(inst.vertex_count)
                       if v != v0 and not succ[v])
        for v in sinks:
            if v0 in pred[v]:
                # Moving into a sink strands the opponent immediately.
                steps.append(Step("trivial-win", (v,)))
                return Const(tuple(steps), WIN)
        if sinks:
            v = sinks[0]
            doomed = {v} | pred[v]
            steps.append(Step("drop-sink", (v, *sorted(pred[v]))))
            inst, _ = _remove_vertices(inst, doomed)
            continue

        unreachable = sorted(set(range(inst.vertex_count)) - _reachable(inst))
        if unreachable:
            # The token can never arrive there; the subgraph is inert.
            steps.append(Step("prune-unreachable", tuple(unreachable)))
            inst, _ = _remove_vertices(inst, set(unreachable))
            continue

        if pred[v0]:
            steps.append(Step("strip-initial-in-edges", tuple(sorted(pred[v0]))))
            edges = frozenset(e for e in inst.edges if e[1] != v0)
            inst = GGInstance(inst.vertex_count, edges, v0)
            continue

        outs = sorted(succ[v0])
        if len(outs) == 1:
            sub, remap = _remove_vertices(inst, {v0}, new_initial=outs[0])
            return Not(tuple(steps), _simplify(sub))
        if len(outs) == 2:
            leaf = Leaf(tuple(steps), inst)
            assert is_simplified(inst), "fixed point must be simplified"
            return leaf
        branches = []
        for v in outs:
            sub, _ = _remove_vertices(inst, {v0}, new_initial=v)
            branches.append(Not((), _simplify(sub)))
        return Or(tuple(steps), tuple(branches))


def simplify(instance):
    """Certificate tree reducing the instance to simplified leaves.

    Rewrites to a fixed point, in deterministic order: constant detection,
    sink-and-predecessor removal, unreachable pruning, initial in-edge
    stripping; then branches on the initial vertex's out-degree (1 flips,
    2 is a leaf, 3 splits into an OR of three flips).
    """
    check_preconditions(instance)
    return _simplify(instance)


def evaluate_certificate(cert, budget=5_000_000):
    """OR/NOT evaluation with exact solves at the leaves."""
    if isinstance(cert, Const):
        return cert.value
    if isinstance(cert, Leaf):
        return solve(cert.instance, budget=budget).value
    if isinstance(cert, Not):
        return WIN if evaluate_certificate(cert.child, budget) == LOSS else LOSS
    if isinstance(cert, Or):
        vals = [evaluate_certificate(c, budget) for c in cert.children]
        return WIN if WIN in vals else LOSS
    raise TypeError(f"not a certificate node: {cert!r}")


def certificate_leaves(cert):
    if isinstance(cert, (Const,)):
        return []
    if isinstance(cert, Leaf):
        return [cert.instance]
    if isinstance(cert, Not):
        return certificate_leaves(cert.child)
    if isinstance(cert, Or):
        out = []
        for c in cert.children:
            out.extend(certificate_leaves(c))
        return out
    raise TypeError(f"not a certificate node: {cert!r}")


# --- text formats ---------------------------------------------------------

def format_instance(instance):
    lines = [f"v {instance.vertex_count}", f"i {instance.initial}"]
    for a, b in sorted(instance.edges):
        lines.append(f"e {a} {b}")
    return "\n".join(lines) + "\n"


def parse_instance(text):
    n = None
    initial = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "v" and len(parts) == 2:
                n = int(parts[1])
            elif parts[0] == "i" and len(parts) == 2:
                initial = int(parts[1])
            elif parts[0] == "e" and len(parts) == 3:
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"line {lineno}: bad gg line {raw!r}") from None
    if n is None or initial is None:
        raise ValueError("missing v or i line")
    if len(edges) != len(set(edges)):
        raise ValueError("duplicate edges")
    try:
        return GGInstance.of(n, initial, edges)
    except ValueError as e:
        raise ValueError(str(e)) from None


def format_certificate(cert):
    """S-expression form, one node kind per head symbol."""
    def steps(ss):
        inner = " ".join(
            "(" + s.rule + ("" if not s.vertices else " " + " ".join(map(str, s.vertices))) + ")"
            for s in ss)
        return f"(steps{' ' + inner if inner else ''})"

    def inst(i):
        es = " ".join(f"({a} {b})" for a, b in sorted(i.edges))
        return f"(instance {i.vertex_count} {i.initial}{' ' + es if es else ''})"

    def walk(node):
        if isinstance(node, Const):
            return f"(const {steps(node.steps)} {node.value})"
        if isinstance(node, Leaf):
            return f"(leaf {steps(node.steps)} {inst(node.instance)})"
        if isinstance(node, Not):
            return f"(not {steps(node.steps)} {walk(node.child)})"
        if isinstance(node, Or):
            kids = " ".join(walk(c) for c in node.children)
            return f"(or {steps(node.steps)} {kids})"
        raise TypeError(f"not a certificate node: {node!r}")

    return walk(cert) + "\n"


def parse_certificate(text):
    tokens = re.findall(r"[()]|[^()\s]+", text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take():
        if pos[0] >= len(tokens):
            raise ValueError("unexpected end of certificate")
        t = tokens[pos[0]]
        pos[0] += 1
        return t

    def expect(t):
        got = take()
        if got != t:
            raise ValueError(f"expected {t!r}, got {got!r}")

    def parse_steps():
        expect("(")
        expect("steps")
        out = []
        while peek() == "(":
            take()
            rule = take()
            verts = []
            while peek() not in (")", None):
                verts.append(int(take()))
            take()
            out.append(Step(rule, tuple(verts)))
        expect(")")
        return tuple(out)

    def parse_inst():
        expect("(")
        expect("instance")
        n = int(take())
        initial = int(take())
        edges = []
        while peek() == "(":
            take()
            a = int(take())
            b = int(take())
            expect(")")
            edges.append((a, b))
        expect(")")
        return GGInstance.of(n, initial, edges)

    def parse_node():
        expect("(")
        head = take()
        if head == "const":
            ss = parse_steps()
            value = take()
            if value not in (WIN, LOSS):
                raise ValueError(f"bad const value {value!r}")
            expect(")")
            return Const(ss, value)
        if head == "leaf":
            ss = parse_steps()
            i = parse_inst()
            expect(")")
            return Leaf(ss, i)
        if head == "not":
            ss = parse_steps()
            child = parse_node()
            expect(")")
            return Not(ss, child)
        if head == "or":
            ss = parse_steps()
            kids = []
            while peek() == "(":
                kids.append(parse_node())
            expect(")")
            return Or(ss, tuple(kids))
        raise ValueError(f"unknown certificate head {head!r}")

    node = parse_node()
    if pos[0] != len(tokens):
        raise ValueError("trailing tokens after certificate")
    return node


# --- random instances for harnesses ---------------------------------------

def random_bipartite_instance(rng, max_vertices=10):
    """Random bipartite degree-<=3 instance, for simplification harnesses."""
    n = rng.randint(2, max_vertices)
    side = [rng.randint(0, 1) for _ in range(n)]
    if side.count(0) == 0 or side.count(1) == 0:
        side[rng.randrange(n)] = 1 - max(side)
    degree = [0] * n
    edges = set()
    attempts = n * 6
    for _ in range(attempts):
        a = rng.randrange(n)
        b = rng.randrange(n)
        if side[a] == side[b] or a == b:
            continue
        if degree[a] >= 3 or degree[b] >= 3:
            continue
        if (a, b) in edges:
            continue
        edges.add((a, b))
        degree[a] += 1
        degree[b] += 1
    return GGInstance.of(n, rng.randrange(n), edges)


def random_simplified_instance(rng, max_vertices=6, max_tries=4000):
    """Random simplified instance, harvested from simplification leaves.

    Leaves of simplify() on random bipartite inputs are genuine simplified
    instances; rejection keeps drawing until one fits the size bound.
    """
    for _ in range(max_tries):
        inst = random_bipartite_instance(rng, max_vertices=max_vertices + 4)
        cert = simplify(inst)
        leaves = [l for l in certificate_leaves(cert)
                  if l.vertex_count <= max_vertices]
        if leaves:
            return leaves[rng.randrange(len(leaves))]
    raise RuntimeError("no simplified instance found; widen the bounds")
