"""Axial-coordinate math for hexhex boards.

Cells are axial pairs (q, r) with implied cube coordinates x = q, y = r,
z = -q - r.  A board of side s contains every cell whose cube coordinates
all have absolute value at most s - 1, which gives 3*s*s - 3*s + 1 cells.
"""

from __future__ import annotations

# Neighbour offsets in fixed clockwise order: N, NE, SE, S, SW, NW.
DIRECTIONS = ((0, -1), (1, -1), (1, 0), (0, 1), (-1, 1), (-1, 0))

DIRECTION_NAMES = ("N", "NE", "SE", "S", "SW", "NW")


def cube(q: int, r: int) -> tuple[int, int, int]:
    return (q, r, -q - r)


def in_board(q: int, r: int, side: int) -> bool:
    """True iff (q, r) lies on the hexhex board of the given side."""
    m = side - 1
    return abs(q) <= m and abs(r) <= m and abs(q + r) <= m


def board_cells(side: int) -> list[tuple[int, int]]:
    """All cells of the board, sorted by (r, q) for reproducible orderings."""
    m = side - 1
    out = []
    for r in range(-m, m + 1):
        for q in range(-m, m + 1):
            if abs(q + r) <= m:
                out.append((q, r))
    return out


def neighbors(q: int, r: int) -> list[tuple[int, int]]:
    return [(q + dq, r + dr) for dq, dr in DIRECTIONS]


def distance(a: tuple[int, int], b: tuple[int, int]) -> int:
    dq = a[0] - b[0]
    dr = a[1] - b[1]
    return max(abs(dq), abs(dr), abs(dq + dr))


def is_corner(q: int, r: int, side: int) -> bool:
    """Corners are the six cells where two cube coordinates hit side - 1."""
    m = side - 1
    x, y, z = q, r, -q - r
    return sum(1 for c in (x, y, z) if abs(c) == m) == 2


def is_edge(q: int, r: int, side: int) -> bool:
    """Edge cells touch the border but are not corners."""
    m = side - 1
    x, y, z = q, r, -q - r
    return max(abs(x), abs(y), abs(z)) == m and not is_corner(q, r, side)


def edge_index(q: int, r: int, side: int) -> int | None:
    """Which of the six board edges an edge cell belongs to (None otherwise).

    Edges are numbered 0..5 by the extremal cube coordinate:
    0: y = -(s-1), 1: x = s-1, 2: z = -(s-1), 3: y = s-1, 4: x = -(s-1),
    5: z = s-1.  Corner cells belong to no edge.
    """
    if not is_edge(q, r, side):
        return None
    m = side - 1
    x, y, z = q, r, -q - r
    if y == -m:
        return 0
    if x == m:
        return 1
    if z == -m:
        return 2
    if y == m:
        return 3
    if x == -m:
        return 4
    return 5


def rotate60(q: int, r: int) -> tuple[int, int]:
    """One clockwise 60-degree rotation about the board centre."""
    return (-r, q + r)


def mirror(q: int, r: int) -> tuple[int, int]:
    """Reflection across the axis through the SE direction."""
    return (q + r, -r)


def transform(q: int, r: int, rotation: int, mirrored: bool) -> tuple[int, int]:
    """Apply mirror first (if any), then `rotation` clockwise 60-degree steps."""
    if mirrored:
        q, r = mirror(q, r)
    for _ in range(rotation % 6):
        q, r = rotate60(q, r)
    return (q, r)


def translate(cells, dq: int, dr: int):
    return [(q + dq, r + dr) for q, r in cells]
