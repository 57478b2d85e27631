"""Link patterns and the diagram operators acting on them.

A link pattern on 2n points is a non-crossing perfect matching of 2n
points on a circle.  Internally the matching is stored 0-based, as a
tuple ``match`` with ``match[i]`` the partner of ``i``.  The canonical
text encoding is the balanced parenthesis word of length 2n carrying
'(' at the smaller endpoint of every arc; all serialized data and all
dictionary keys use this word.

Operator indices in the public API are 1-based, matching the usual
diagram conventions:

* ``rotate(p, k)`` shifts every endpoint down by k (cyclically), so one
  application moves the pattern one step counter-clockwise.
* ``tl_e(p, j)`` caps positions j, j+1 and re-joins their former
  partners; j is cyclic, so j = 2n acts between 2n and 1 (the affine
  generator).
* ``close_c(p, j)`` caps positions j, j+1 and drops them, landing in
  the space one size down; ``add_a(p, j)`` inserts a fresh adjacent arc
  at (j, j+1), one size up.  These two are deliberately not affine:
  close_c takes 1 <= j <= 2n-1 and add_a takes 1 <= j <= 2n+1.

The loop weight is fixed at 1 (the cube-root-of-unity point), so a cap
landing on an existing arc detaches a circle of weight one and the
coefficient is unchanged.

Vectors over link-pattern space (:class:`LpVector`) carry exact
``fractions.Fraction`` coefficients; no floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .errors import ArityMismatch

__all__ = [
    "LinkPattern",
    "LpVector",
    "RotationClass",
    "all_patterns",
    "catalan",
    "rotate",
    "tl_e",
    "close_c",
    "add_a",
    "rotation_classes",
    "rotation_class_of",
    "apply_rotation",
    "apply_e",
    "apply_c",
    "apply_a",
    "apply_sym",
    "apply_hamiltonian",
    "vec_apply",
    "lp_vector_to_json",
    "lp_vector_from_json",
]


@dataclass(frozen=True)
class LinkPattern:
    """A non-crossing perfect matching of 2n cyclically ordered points.

    ``match[i]`` is the 0-based partner of point i.  The empty pattern
    (n = 0) is allowed; it is the unit for ``add_a``.
    """

    match: tuple[int, ...]

    def __post_init__(self) -> None:
        m = self.match
        size = len(m)
        if size % 2:
            raise ValueError("a link pattern needs an even number of points")
        for i, j in enumerate(m):
            if not 0 <= j < size or j == i or m[j] != i:
                raise ValueError("match is not a fixed-point-free involution")
        # Non-crossing <=> the induced parenthesis word is balanced with
        # matching pairs exactly the arcs.
        stack: list[int] = []
        for i, j in enumerate(m):
            if i < j:
                stack.append(j)
            elif stack.pop() != i:
                raise ValueError("matching has crossing arcs")

    @property
    def n(self) -> int:
        return len(self.match) // 2

    @property
    def word(self) -> str:
        return "".join("(" if i < j else ")" for i, j in enumerate(self.match))

    def partner(self, i: int) -> int:
        """1-based partner of the 1-based point i (cyclic)."""
        size = len(self.match)
        return self.match[(i - 1) % size] + 1

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """The arcs as sorted 1-based pairs, ordered by smaller endpoint."""
        return tuple(
            (i + 1, j + 1) for i, j in enumerate(self.match) if i < j
        )

    @classmethod
    def from_word(cls, word: str) -> "LinkPattern":
        match = [-1] * len(word)
        stack: list[int] = []
        for i, ch in enumerate(word):
            if ch == "(":
                stack.append(i)
            elif ch == ")":
                if not stack:
                    raise ValueError(f"unbalanced word {word!r}")
                j = stack.pop()
                match[i], match[j] = j, i
            else:
                raise ValueError(f"bad character {ch!r} in word {word!r}")
        if stack:
            raise ValueError(f"unbalanced word {word!r}")
        return cls(tuple(match))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "LinkPattern":
        """Build from 1-based arc pairs."""
        match = [-1] * (2 * n)
        for i, j in pairs:
            match[i - 1], match[j - 1] = j - 1, i - 1
        return cls(tuple(match))

    @classmethod
    def serial_arcs(cls, n: int) -> "LinkPattern":
        """The pattern ((1,2),(3,4),...) of n adjacent arcs."""
        return cls.from_pairs(n, [(2 * k + 1, 2 * k + 2) for k in range(n)])

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"LinkPattern({self.word!r})"


def catalan(n: int) -> int:
    """The n-th Catalan number (1, 1, 2, 5, 14, ...)."""
    value = 1
    for k in range(n):
        value = value * 2 * (2 * k + 1) // (k + 2)
    return value


@lru_cache(maxsize=None)
def all_patterns(n: int) -> tuple[LinkPattern, ...]:
    """All of LP(n), sorted lexicographically by parenthesis word.

    '(' < ')' in ASCII, so lexicographic order on words starts at the
    fully nested pattern and ends at the serial-arcs one.
    """
    words: list[str] = []

    def grow(prefix: list[str], open_count: int, closed: int) -> None:
        if len(prefix) == 2 * n:
            words.append("".join(prefix))
            return
        if open_count < n:
            prefix.append("(")
            grow(prefix, open_count + 1, closed)
            prefix.pop()
        if open_count - closed > 0:
            prefix.append(")")
            grow(prefix, open_count, closed + 1)
            prefix.pop()

    grow([], 0, 0)
    return tuple(LinkPattern.from_word(w) for w in sorted(words))


def rotate(p: LinkPattern, k: int = 1) -> LinkPattern:
    """R^k: send every arc (i, j) to (i-k, j-k), indices mod 2n."""
    size = len(p.match)
    if size == 0:
        return p
    k %= size
    m = p.match
    return LinkPattern(tuple((m[(i + k) % size] - k) % size for i in range(size)))


def tl_e(p: LinkPattern, j: int) -> LinkPattern:
    """The Temperley-Lieb generator e_j, cyclic 1 <= j <= 2n.

    If (j, j+1) is already an arc the pattern is fixed; otherwise j is
    joined to j+1 and their former partners to each other.
    """
    size = len(p.match)
    a = (j - 1) % size
    b = j % size
    m = list(p.match)
    if m[a] == b:
        return p
    pa, pb = m[a], m[b]
    m[a], m[b] = b, a
    m[pa], m[pb] = pb, pa
    return LinkPattern(tuple(m))


def close_c(p: LinkPattern, j: int) -> LinkPattern:
    """Cap positions j, j+1 (1 <= j <= 2n-1) and relabel down to LP(n-1).

    If j and j+1 are partners the cap detaches a closed circle, which
    carries weight one here and is simply dropped.
    """
    size = len(p.match)
    if not 1 <= j <= size - 1:
        raise ArityMismatch(f"close_c index {j} out of range for 2n={size}")
    a, b = j - 1, j
    m = list(p.match)
    pa, pb = m[a], m[b]
    if pa != b:
        # join the former partners of j and j+1
        m[pa], m[pb] = pb, pa
    keep = [i for i in range(size) if i not in (a, b)]
    relabel = {old: new for new, old in enumerate(keep)}
    return LinkPattern(tuple(relabel[m[old]] for old in keep))


def add_a(p: LinkPattern, j: int) -> LinkPattern:
    """Insert a new adjacent arc at positions (j, j+1), 1 <= j <= 2n+1."""
    size = len(p.match)
    if not 1 <= j <= size + 1:
        raise ArityMismatch(f"add_a index {j} out of range for 2n={size}")
    shift = [old + 2 if old >= j - 1 else old for old in p.match]
    out: list[int] = []
    for old in range(size + 2):
        if old == j - 1:
            out.append(j)
        elif old == j:
            out.append(j - 1)
        else:
            src = old - 2 if old > j else old
            out.append(shift[src])
    return LinkPattern(tuple(out))


@dataclass(frozen=True)
class RotationClass:
    """An orbit of LP(n) under the rotation R."""

    representative: LinkPattern
    stabilizer_order: int
    members: tuple[LinkPattern, ...]

    @property
    def size(self) -> int:
        return len(self.members)


@lru_cache(maxsize=None)
def rotation_classes(n: int) -> tuple[RotationClass, ...]:
    """Orbit decomposition of LP(n) under R, representatives word-minimal."""
    seen: set[LinkPattern] = set()
    classes: list[RotationClass] = []
    for p in all_patterns(n):
        if p in seen:
            continue
        orbit: list[LinkPattern] = []
        q = p
        while q not in seen:
            seen.add(q)
            orbit.append(q)
            q = rotate(q, 1)
        rep = min(orbit, key=lambda r: r.word)
        stab = 2 * n // len(orbit)
        classes.append(RotationClass(rep, stab, tuple(orbit)))
    return tuple(sorted(classes, key=lambda c: c.representative.word))


def rotation_class_of(p: LinkPattern) -> LinkPattern:
    """Word-minimal representative of p's rotation orbit."""
    size = len(p.match)
    best = p
    q = p
    for _ in range(size - 1):
        q = rotate(q, 1)
        if q.word < best.word:
            best = q
    return best


# ---------------------------------------------------------------------------
# Exact vectors over link-pattern space


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"coefficients must be exact rationals, got {type(x)!r}")


@dataclass(frozen=True)
class LpVector:
    """A sparse exact-rational vector indexed by link patterns of one size.

    Zero coefficients are dropped at construction, so equality of
    vectors is plain dataclass equality.
    """

    n: int
    entries: Mapping[LinkPattern, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: dict[LinkPattern, Fraction] = {}
        for p, coeff in self.entries.items():
            if p.n != self.n:
                raise ArityMismatch(
                    f"pattern on 2n={2 * p.n} points in a size-{self.n} vector"
                )
            value = _as_fraction(coeff)
            if value:
                clean[p] = value
        object.__setattr__(self, "entries", clean)

    def __add__(self, other: "LpVector") -> "LpVector":
        if self.n != other.n:
            raise ArityMismatch("vector sizes differ")
        out = dict(self.entries)
        for p, coeff in other.entries.items():
            out[p] = out.get(p, Fraction(0)) + coeff
        return LpVector(self.n, out)

    def __sub__(self, other: "LpVector") -> "LpVector":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "LpVector":
        s = _as_fraction(scalar)
        return LpVector(self.n, {p: s * c for p, c in self.entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LpVector):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def is_zero(self) -> bool:
        return not self.entries

    def coeff(self, p: LinkPattern) -> Fraction:
        return self.entries.get(p, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def map_patterns(self, f: Callable[[LinkPattern], LinkPattern], n_out: int) -> "LpVector":
        out: dict[LinkPattern, Fraction] = {}
        for p, coeff in self.entries.items():
            q = f(p)
            out[q] = out.get(q, Fraction(0)) + coeff
        return LpVector(n_out, out)

    @classmethod
    def basis(cls, p: LinkPattern) -> "LpVector":
        return cls(p.n, {p: Fraction(1)})

    @classmethod
    def from_counts(cls, n: int, counts: Mapping[LinkPattern, int]) -> "LpVector":
        return cls(n, {p: Fraction(v) for p, v in counts.items()})

    @classmethod
    def zero(cls, n: int) -> "LpVector":
        return cls(n, {})


def apply_rotation(v: LpVector, k: int = 1) -> LpVector:
    return v.map_patterns(lambda p: rotate(p, k), v.n)


def apply_e(v: LpVector, j: int) -> LpVector:
    if not 1 <= j <= 2 * v.n:
        raise ArityMismatch(f"e index {j} out of range for n={v.n}")
    return v.map_patterns(lambda p: tl_e(p, j), v.n)


def apply_c(v: LpVector, j: int) -> LpVector:
    return v.map_patterns(lambda p: close_c(p, j), v.n - 1)


def apply_a(v: LpVector, j: int) -> LpVector:
    return v.map_patterns(lambda p: add_a(p, j), v.n + 1)


def apply_sym(v: LpVector) -> LpVector:
    """Sym = sum of all 2n rotation powers; absorbs R on either side."""
    out = LpVector.zero(v.n)
    for k in range(2 * v.n):
        out = out + apply_rotation(v, k)
    return out


def apply_hamiltonian(v: LpVector) -> LpVector:
    """H = e_1 + ... + e_2n acting linearly."""
    out = LpVector.zero(v.n)
    for j in range(1, 2 * v.n + 1):
        out = out + apply_e(v, j)
    return out


def vec_apply(op: str, v: LpVector, j: int | None = None) -> LpVector:
    """Dispatch an operator by name: R | e | c | a | Sym | H.

    R accepts an optional power in ``j`` (default 1); e, c and a require
    their index.
    """
    if op == "R":
        return apply_rotation(v, 1 if j is None else j)
    if op == "Sym":
        return apply_sym(v)
    if op == "H":
        return apply_hamiltonian(v)
    if j is None:
        raise ArityMismatch(f"operator {op!r} needs an index")
    if op == "e":
        return apply_e(v, j)
    if op == "c":
        return apply_c(v, j)
    if op == "a":
        return apply_a(v, j)
    raise ArityMismatch(f"unknown operator {op!r}")


def lp_vector_to_json(v: LpVector) -> dict:
    entries = {p.word: str(c) for p, c in sorted(v.entries.items(), key=lambda kv: kv[0].word)}
    return {"n": v.n, "entries": entries}


def lp_vector_from_json(data: Mapping) -> LpVector:
    n = int(data["n"])
    entries = {
        LinkPattern.from_word(word): Fraction(text)
        for word, text in data["entries"].items()
    }
    return LpVector(n, entries)
