"""Square-lattice domains, boundary data, and termination gluing.

A domain is a finite set of lattice vertices ("cells") forming an
edge-connected, simply-connected polyomino.  Every vertex carries four
slots, one per direction E, N, W, S; a slot towards another cell is an
internal edge, a slot towards the outside is a termination.  Walking
the polyomino boundary counter-clockwise visits every termination once
and turns left (+1), straight (0) or right (-1) between consecutive
ones; the turn sequence is the boundary string and always sums to 4.

Canonical edge order: internal edges row-major over vertices (sorted by
(y, x)), per vertex first the east then the north edge; terminations
appended in boundary order starting at the anchor.  Configurations are
stored as bitmasks over this order, so streams and caches are
bit-exact.

Gluing: terminations are paired consecutively, pairs (1,2),(3,4),...
for the plus parity and (2N,1),(2,3),... for the minus parity.  Each
pair forces a short boundary cycle (a digon over a convex corner, a
triangle over a straight stretch, a 4-cycle over a concave corner), and
the remaining internal edges are forced into lattice plaquettes by
propagation; the resulting cycle partition is unique or the domain is
rejected.  A pairing is valid when every cycle has length at most 4 and
every cycle through a bichromatic glued vertex has length at most 3;
when a concave corner breaks this, the two terminations over an
adjacent convex corner may be interchanged (a count-preserving swap)
and the test repeated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidTriplet, NonUniqueGamma

__all__ = [
    "EAST",
    "NORTH",
    "WEST",
    "SOUTH",
    "DIRS",
    "Domain",
    "BoundaryCondition",
    "BoundaryString",
    "GluedGraph",
    "build_square",
    "boundary_string",
    "glue_and_gamma",
]

EAST, NORTH, WEST, SOUTH = 0, 1, 2, 3
DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))

Cell = tuple[int, int]

# Internal edges are ("i", v, w) with v < w; terminations ("t", v, dir).
Edge = tuple


def _neighbour(v: Cell, d: int) -> Cell:
    dx, dy = DIRS[d]
    return (v[0] + dx, v[1] + dy)


def _trace_boundary(cells: frozenset[Cell]) -> tuple[tuple[tuple[Cell, int], ...], tuple[int, ...]]:
    """Counter-clockwise boundary walk.

    Returns the terminations in cyclic order, starting at the south leg
    of the bottom-most-then-left-most cell, and the turn taken after
    each termination.  Corners live on the shifted grid: corner (a, b)
    is the lower-left corner of cell (a, b).
    """
    start_cell = min(cells, key=lambda c: (c[1], c[0]))
    # Walking east along the south side of start_cell keeps the region
    # on the left, i.e. the walk is counter-clockwise.
    #   direction E: left cell (a, b),     right cell (a, b-1), leg ((a, b), S)
    #   direction N: left cell (a-1, b),   right cell (a, b),   leg ((a-1, b), E)
    #   direction W: left cell (a-1, b-1), right cell (a-1, b), leg ((a-1, b-1), N)
    #   direction S: left cell (a, b-1),   right cell (a-1, b-1), leg ((a, b-1), W)
    def sides(p: Cell, d: int) -> tuple[Cell, Cell, tuple[Cell, int]]:
        a, b = p
        if d == EAST:
            return (a, b), (a, b - 1), ((a, b), SOUTH)
        if d == NORTH:
            return (a - 1, b), (a, b), ((a - 1, b), EAST)
        if d == WEST:
            return (a - 1, b - 1), (a - 1, b), ((a - 1, b - 1), NORTH)
        return (a, b - 1), (a - 1, b - 1), ((a, b - 1), WEST)

    def ok(p: Cell, d: int) -> bool:
        left, right, _ = sides(p, d)
        return left in cells and right not in cells

    pos, heading = start_cell, EAST
    terms: list[tuple[Cell, int]] = []
    turns: list[int] = []
    while True:
        terms.append(sides(pos, heading)[2])
        pos = (pos[0] + DIRS[heading][0], pos[1] + DIRS[heading][1])
        choices = [
            d for d in ((heading + 1) % 4, heading, (heading + 3) % 4)
            if ok(pos, d)
        ]
        if len(choices) != 1:
            raise ValueError("boundary is pinched; domain is not simply connected")
        nxt = choices[0]
        turns.append((nxt - heading + 1) % 4 - 1)
        heading = nxt
        if pos == start_cell and heading == EAST:
            break
    return tuple(terms), tuple(turns)


@dataclass(frozen=True)
class Domain:
    """A simply-connected polyomino of lattice vertices with an anchor.

    ``anchor`` indexes into the canonical boundary order produced by
    :func:`_trace_boundary`; the public termination order starts there.
    """

    cells: frozenset[Cell]
    anchor: int = 0

    def __post_init__(self) -> None:
        cells = frozenset((int(x), int(y)) for x, y in self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ValueError("domain needs at least one cell")
        # edge-connectivity
        seen = {next(iter(cells))}
        frontier = list(seen)
        while frontier:
            v = frontier.pop()
            for d in range(4):
                w = _neighbour(v, d)
                if w in cells and w not in seen:
                    seen.add(w)
                    frontier.append(w)
        if seen != cells:
            raise ValueError("cells are not edge-connected")
        # simple connectivity: every absent cell of the padded bounding
        # box must reach the outer margin
        xs = [c[0] for c in cells]
        ys = [c[1] for c in cells]
        x0, x1 = min(xs) - 1, max(xs) + 1
        y0, y1 = min(ys) - 1, max(ys) + 1
        outside = {(x0, y0)}
        frontier = [(x0, y0)]
        while frontier:
            v = frontier.pop()
            for d in range(4):
                w = _neighbour(v, d)
                if x0 <= w[0] <= x1 and y0 <= w[1] <= y1 and w not in cells and w not in outside:
                    outside.add(w)
                    frontier.append(w)
        box_holes = (x1 - x0 + 1) * (y1 - y0 + 1) - len(cells) - len(outside)
        if box_holes:
            raise ValueError("domain has a hole; not simply connected")
        canon_terms, _ = _trace_boundary(cells)
        if not 0 <= self.anchor < len(canon_terms):
            raise ValueError("anchor out of range")

    @cached_property
    def vertices(self) -> tuple[Cell, ...]:
        return tuple(sorted(self.cells, key=lambda c: (c[1], c[0])))

    @cached_property
    def _canonical_boundary(self) -> tuple[tuple[tuple[Cell, int], ...], tuple[int, ...]]:
        return _trace_boundary(self.cells)

    @cached_property
    def terminations(self) -> tuple[tuple[Cell, int], ...]:
        terms, _ = self._canonical_boundary
        k = self.anchor
        return terms[k:] + terms[:k]

    @cached_property
    def steps(self) -> tuple[int, ...]:
        """steps[k] is the turn between terminations k and k+1 (0-based)."""
        _, turns = self._canonical_boundary
        k = self.anchor
        return turns[k:] + turns[:k]

    @property
    def perimeter(self) -> int:
        return len(self.terminations)

    @cached_property
    def internal_edges(self) -> tuple[Edge, ...]:
        out: list[Edge] = []
        for v in self.vertices:
            e = _neighbour(v, EAST)
            if e in self.cells:
                out.append(("i", v, e) if v < e else ("i", e, v))
            nb = _neighbour(v, NORTH)
            if nb in self.cells:
                out.append(("i", v, nb) if v < nb else ("i", nb, v))
        return tuple(out)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return self.internal_edges + tuple(("t", v, d) for v, d in self.terminations)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def vertex_edges(self) -> dict[Cell, tuple[int, int, int, int]]:
        """Edge ids of the four slots of each vertex, in E, N, W, S order."""
        index = self.edge_index
        table: dict[Cell, tuple[int, int, int, int]] = {}
        for v in self.cells:
            ids = []
            for d in range(4):
                w = _neighbour(v, d)
                if w in self.cells:
                    key = ("i", v, w) if v < w else ("i", w, v)
                else:
                    key = ("t", v, d)
                ids.append(index[key])
            table[v] = tuple(ids)
        return table

    @cached_property
    def edge_vertices(self) -> tuple[tuple[Cell, ...], ...]:
        """The incident domain vertices of every edge (two or one)."""
        out: list[tuple[Cell, ...]] = []
        for e in self.edges:
            if e[0] == "i":
                out.append((e[1], e[2]))
            else:
                out.append((e[1],))
        return tuple(out)

    @cached_property
    def faces(self) -> tuple[Cell, ...]:
        """Bottom-left vertices of lattice faces with all four edges internal."""
        out = []
        for v in self.vertices:
            x, y = v
            if {(x + 1, y), (x, y + 1), (x + 1, y + 1)} <= self.cells:
                out.append(v)
        return tuple(out)

    def face_edges(self, face: Cell) -> tuple[int, int, int, int]:
        """Edge ids around a face in cyclic order: bottom, right, top, left."""
        x, y = face
        idx = self.edge_index
        return (
            idx[("i", (x, y), (x + 1, y))],
            idx[("i", (x + 1, y), (x + 1, y + 1))],
            idx[("i", (x, y + 1), (x + 1, y + 1))],
            idx[("i", (x, y), (x, y + 1))],
        )

    def termination_id(self, k: int) -> int:
        """Canonical edge id of the k-th termination (0-based, anchored)."""
        return len(self.internal_edges) + k

    def to_json(self) -> dict:
        return {"cells": sorted([list(c) for c in self.cells]), "anchor": self.anchor}

    @classmethod
    def from_json(cls, data) -> "Domain":
        return cls(frozenset(tuple(c) for c in data["cells"]), int(data["anchor"]))


@dataclass(frozen=True)
class BoundaryCondition:
    """Colours of the terminations, indexed parallel to the anchored order.

    1 is black, 0 is white.  The number of black entries must be even,
    and so is the number of white ones on any closed boundary.
    """

    colours: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "colours", tuple(int(c) for c in self.colours))
        if any(c not in (0, 1) for c in self.colours):
            raise ValueError("colours must be 0 (white) or 1 (black)")
        if len(self.colours) % 2 or sum(self.colours) % 2:
            raise ValueError("termination and black counts must both be even")

    @property
    def n_black(self) -> int:
        return sum(self.colours)

    def complemented(self) -> "BoundaryCondition":
        return BoundaryCondition(tuple(1 - c for c in self.colours))

    def swapped(self, k: int) -> "BoundaryCondition":
        """Exchange the colours at positions k and k+1 (cyclic, 0-based)."""
        cols = list(self.colours)
        a, b = k % len(cols), (k + 1) % len(cols)
        cols[a], cols[b] = cols[b], cols[a]
        return BoundaryCondition(tuple(cols))

    def to_string(self) -> str:
        return "".join("b" if c else "w" for c in self.colours)

    @classmethod
    def from_string(cls, text: str) -> "BoundaryCondition":
        return cls(tuple(1 if ch == "b" else 0 for ch in text))


@dataclass(frozen=True)
class BoundaryString:
    """Turn sequence of the boundary walk; always four more +1 than -1."""

    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        if sum(self.steps) != 4:
            raise ValueError("boundary steps must sum to 4")


def boundary_string(d: Domain) -> BoundaryString:
    return BoundaryString(d.steps)


def build_square(n: int, sign: str = "+") -> tuple[Domain, BoundaryCondition]:
    """The n x n square with alternating boundary colours.

    The anchor is the vertical (south) termination of the bottom-left
    vertex; for sign "+" it is black, for sign "-" white, and colours
    alternate from there counter-clockwise.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    cells = frozenset((x, y) for x in range(1, n + 1) for y in range(1, n + 1))
    d = Domain(cells, anchor=0)
    first = 1 if sign == "+" else 0
    colours = tuple((first + k) % 2 for k in range(d.perimeter))
    return d, BoundaryCondition(colours)


@dataclass(frozen=True)
class GluedGraph:
    """A domain with terminations glued in consecutive pairs, plus the
    forced cycle partition.

    ``swapped_bc`` is the boundary condition actually glued; it differs
    from ``bc`` exactly at the recorded convex-corner swaps.  Cycles
    list canonical edge ids in cyclic order.  ``bichromatic[i]`` marks
    pairs whose two legs carry different colours (the glued vertex then
    counts as a path endpoint).
    """

    domain: Domain
    bc: BoundaryCondition
    parity: str
    pairs: tuple[tuple[int, int], ...]
    cycles: tuple[tuple[int, ...], ...]
    swaps: tuple[int, ...] = ()

    @cached_property
    def swapped_bc(self) -> BoundaryCondition:
        bc = self.bc
        for k in self.swaps:
            bc = bc.swapped(k)
        return bc

    @cached_property
    def bichromatic(self) -> tuple[bool, ...]:
        cols = self.swapped_bc.colours
        return tuple(cols[a] != cols[b] for a, b in self.pairs)

    @cached_property
    def edge_cycle(self) -> tuple[int, ...]:
        """Cycle index covering each edge (the cycles partition all edges)."""
        owner = [-1] * len(self.domain.edges)
        for ci, cyc in enumerate(self.cycles):
            for e in cyc:
                owner[e] = ci
        return tuple(owner)


def _pairing(n_terms: int, parity: str) -> tuple[tuple[int, int], ...]:
    if parity == "plus":
        return tuple((2 * i, 2 * i + 1) for i in range(n_terms // 2))
    if parity == "minus":
        return ((n_terms - 1, 0),) + tuple(
            (2 * i + 1, 2 * i + 2) for i in range(n_terms // 2 - 1)
        )
    raise ValueError("parity must be 'plus' or 'minus'")


def _boundary_cycles(d: Domain, pairs) -> tuple[tuple[tuple[int, ...], ...], set[int]]:
    """The forced cycle through each glued vertex.

    Consecutive terminations attach at the same vertex (digon), at
    adjacent vertices (triangle) or at diagonal vertices with a unique
    common neighbour inside the domain (concave 4-cycle).
    """
    cycles: list[tuple[int, ...]] = []
    used: set[int] = set()
    idx = d.edge_index
    for a, b in pairs:
        (va, _), (vb, _) = d.terminations[a], d.terminations[b]
        ta, tb = d.termination_id(a), d.termination_id(b)
        if va == vb:
            cyc = (ta, tb)
        elif abs(va[0] - vb[0]) + abs(va[1] - vb[1]) == 1:
            lo, hi = (va, vb) if va < vb else (vb, va)
            cyc = (ta, idx[("i", lo, hi)], tb)
        else:
            common = [
                w
                for w in ((va[0], vb[1]), (vb[0], va[1]))
                if abs(va[0] - vb[0]) == 1 and abs(va[1] - vb[1]) == 1 and w in d.cells
            ]
            if len(common) > 1:
                raise NonUniqueGamma("two paths close the glued pair")
            if not common:
                raise InvalidTriplet("glued pair cannot close in length 4")
            w = common[0]
            e1 = ("i", *sorted((va, w)))
            e2 = ("i", *sorted((w, vb)))
            cyc = (ta, idx[e1], idx[e2], tb)
        for e in cyc:
            if e in used:
                raise InvalidTriplet("boundary cycles overlap")
            used.add(e)
        cycles.append(cyc)
    return tuple(cycles), used


def _plaquette_cover(d: Domain, used: set[int]) -> tuple[tuple[int, ...], ...]:
    """Partition the remaining internal edges into lattice plaquettes.

    Forced faces are selected by propagation from edges with a single
    candidate; a stall with every open edge ambiguous means the domain
    is malformed.
    """
    remaining = {e for e in range(len(d.internal_edges)) if e not in used}
    if not remaining:
        return ()
    edges_of_face = {f: d.face_edges(f) for f in d.faces}
    alive = {f for f, fe in edges_of_face.items() if not used.intersection(fe)}
    candidates: dict[int, set[Cell]] = {e: set() for e in remaining}
    for f in alive:
        for e in edges_of_face[f]:
            candidates[e].add(f)

    def discard(f: Cell) -> None:
        alive.discard(f)
        for fe in edges_of_face[f]:
            candidates[fe].discard(f)
            if fe not in covered and len(candidates[fe]) <= 1:
                queue.append(fe)

    chosen: list[Cell] = []
    covered: set[int] = set()
    queue = [e for e, fs in candidates.items() if len(fs) <= 1]
    while covered != remaining:
        if not queue:
            raise NonUniqueGamma("plaquette parity not forced by the boundary")
        e = queue.pop()
        if e in covered or len(candidates[e]) > 1:
            continue
        if not candidates[e]:
            raise InvalidTriplet("an internal edge cannot be covered by a plaquette")
        (f,) = candidates[e]
        chosen.append(f)
        alive.discard(f)
        covered.update(edges_of_face[f])
        for fe in edges_of_face[f]:
            for g in list(candidates[fe]):
                if g != f:
                    discard(g)
    return tuple(edges_of_face[f] for f in chosen)


def _validity_offence(d: Domain, pairs, cycles, bc: BoundaryCondition) -> int | None:
    """Index of the first pair breaking validity, or None if valid.

    Every cycle has length <= 4 by construction, so the only possible
    offence is a 4-cycle through a bichromatic glued vertex.
    """
    cols = bc.colours
    for i, ((a, b), cyc) in enumerate(zip(pairs, cycles)):
        if len(cyc) == 4 and cols[a] != cols[b]:
            return i
    return None


def glue_and_gamma(
    d: Domain,
    t: BoundaryCondition,
    parity: str = "plus",
    allow_swaps: bool = False,
) -> GluedGraph:
    """Glue terminations pairwise and compute the forced cycle partition.

    Raises :class:`InvalidTriplet` when no valid partition exists (even
    after permitted convex-corner swaps) and :class:`NonUniqueGamma`
    when propagation cannot decide the plaquette parity.
    """
    if len(t.colours) != d.perimeter:
        raise ValueError("boundary condition length mismatch")
    pairs = _pairing(d.perimeter, parity)
    b_cycles, used = _boundary_cycles(d, pairs)
    plaquettes = _plaquette_cover(d, used)
    cycles = b_cycles + plaquettes
    covered = sorted(e for cyc in cycles for e in cyc)
    if covered != list(range(len(d.edges))):
        raise NonUniqueGamma("cycle partition does not cover the edge set")

    bc, swaps = t, []
    steps = d.steps
    while True:
        offence = _validity_offence(d, pairs, b_cycles, bc)
        if offence is None:
            break
        if not allow_swaps:
            raise InvalidTriplet(
                f"bichromatic pair {pairs[offence]} sits over a concave corner"
            )
        a, b = pairs[offence]
        fixed = False
        for k in ((a - 1) % d.perimeter, b % d.perimeter):
            if steps[k] != 1 or k in swaps:
                continue
            candidate = bc.swapped(k)
            if candidate.colours[a] == candidate.colours[b]:
                bc, fixed = candidate, True
                swaps.append(k)
                break
        if not fixed:
            raise InvalidTriplet(
                f"no convex-corner swap fixes pair {pairs[offence]}"
            )

    graph = GluedGraph(
        domain=d,
        bc=t,
        parity=parity,
        pairs=pairs,
        cycles=cycles,
        swaps=tuple(swaps),
    )
    # 2-cycles away from the border would be ambiguous for the gyration
    # map; our construction only builds digons from glued terminations.
    n_internal = len(d.internal_edges)
    assert all(
        any(e >= n_internal for e in cyc) for cyc in cycles if len(cyc) == 2
    )
    return graph

