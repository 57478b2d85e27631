"""The loop-model Hamiltonian on link-pattern space and its exact
stationary vector.

The matrix is assembled column by column from the capping generators in
the lexicographic word basis; each column sums to twice the system
size, so that value is always an eigenvalue of the transpose.  The
stationary vector is the kernel of the shifted matrix, computed by
fraction-free (Bareiss) elimination over the integers: no floating
point, no tolerance.  The kernel must be one-dimensional; the vector is
rescaled to coprime positive integers, and its entries are the refined
configuration counts by the identity this package certifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import KernelDimensionError
from .fplcore import asm_count_formula, refined_counts
from .linkpat import (
    LinkPattern,
    LpVector,
    all_patterns,
    apply_hamiltonian,
    tl_e,
)

__all__ = [
    "HamiltonianMatrix",
    "build_h_matrix",
    "stationary_vector",
    "verify_rs",
    "RsReport",
    "kernel_dimension_certificate",
]


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense integer matrix of H in the lexicographic word basis.

    rows[i][j] counts the generators sending basis[j] to basis[i].
    """

    n: int
    basis: tuple[LinkPattern, ...]
    rows: tuple[tuple[int, ...], ...]

    def column_sums(self) -> tuple[int, ...]:
        size = len(self.basis)
        return tuple(
            sum(self.rows[i][j] for i in range(size)) for j in range(size)
        )


def build_h_matrix(n: int) -> HamiltonianMatrix:
    basis = all_patterns(n)
    index = {p: i for i, p in enumerate(basis)}
    size = len(basis)
    rows = [[0] * size for _ in range(size)]
    for j, p in enumerate(basis):
        for k in range(1, 2 * n + 1):
            rows[index[tl_e(p, k)]][j] += 1
    return HamiltonianMatrix(n, basis, tuple(tuple(r) for r in rows))


def _bareiss_kernel(matrix: list[list[int]]) -> list[list[Fraction]]:
    """Kernel basis of an integer matrix via fraction-free elimination.

    Entries stay integral through the elimination (every division is a
    previous pivot and exact); back substitution runs over rationals.
    """
    a = [row[:] for row in matrix]
    m = len(a)
    ncols = len(a[0]) if m else 0
    prev = 1
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        arc = a[r][c]
        for i in range(r + 1, m):
            aic = a[i][c]
            rowi = a[i]
            rowr = a[r]
            for j in range(c + 1, ncols):
                rowi[j] = (rowi[j] * arc - aic * rowr[j]) // prev
            rowi[c] = 0
        prev = arc
        pivots.append((r, c))
        r += 1
    pivot_cols = {c for _, c in pivots}
    basis: list[list[Fraction]] = []
    for fc in (c for c in range(ncols) if c not in pivot_cols):
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for rr, cc in reversed(pivots):
            acc = Fraction(0)
            row = a[rr]
            for j in range(cc + 1, ncols):
                if x[j]:
                    acc += row[j] * x[j]
            x[cc] = -acc / row[cc]
        basis.append(x)
    return basis


def stationary_vector(n: int) -> LpVector:
    """Exact kernel vector of (H - 2n), as coprime positive integers.

    Raises :class:`KernelDimensionError` unless the kernel is exactly
    one-dimensional (it always is; a violation means a bug upstream).
    """
    h = build_h_matrix(n)
    size = len(h.basis)
    shifted = [
        [h.rows[i][j] - (2 * n if i == j else 0) for j in range(size)]
        for i in range(size)
    ]
    kernel = _bareiss_kernel(shifted)
    if len(kernel) != 1:
        raise KernelDimensionError(
            f"kernel of the shifted matrix has dimension {len(kernel)} at n={n}"
        )
    (x,) = kernel
    scale = math.lcm(*(f.denominator for f in x))
    ints = [int(f * scale) for f in x]
    g = math.gcd(*ints)
    ints = [v // g for v in ints]
    negatives = sum(1 for v in ints if v < 0)
    if negatives == len([v for v in ints if v]):
        ints = [-v for v in ints]
    if any(v <= 0 for v in ints):
        raise KernelDimensionError("stationary vector is not strictly positive")
    # guard the elimination itself: the integer vector must be killed
    # by the shifted matrix, exactly
    for row in shifted:
        if sum(a * v for a, v in zip(row, ints)):
            raise AssertionError("kernel candidate fails the residual check")
    return LpVector(n, {p: Fraction(v) for p, v in zip(h.basis, ints)})


@dataclass(frozen=True)
class RsReport:
    """Outcome of the stationary-state comparison at one size."""

    n: int
    rs_is_zero: bool
    kernel_matches_counts: bool
    total: int
    expected_total: int
    first_violation: str = ""

    @property
    def passed(self) -> bool:
        return (
            self.rs_is_zero
            and self.kernel_matches_counts
            and self.total == self.expected_total
        )


def verify_rs(n: int) -> RsReport:
    """Certify that the refined counts are stationary and match the kernel.

    Checks, all exactly: (H - 2n) applied to the count vector vanishes
    componentwise; the normalized kernel equals the count table
    entrywise; the component sum matches the product formula.
    """
    counts = refined_counts(n, "+").as_vector()
    residual = apply_hamiltonian(counts) - 2 * n * counts
    rs_zero = residual.is_zero()
    violation = ""
    if not rs_zero:
        word, coeff = sorted(
            ((p.word, c) for p, c in residual.entries.items())
        )[0]
        violation = f"residual {coeff} at {word}"
    kernel = stationary_vector(n)
    matches = kernel == counts
    if rs_zero and not matches:
        violation = "kernel differs from counts"
    return RsReport(
        n=n,
        rs_is_zero=rs_zero,
        kernel_matches_counts=matches,
        total=int(counts.total()),
        expected_total=asm_count_formula(n),
        first_violation=violation,
    )


def kernel_dimension_certificate(n: int, prime: int = 2_147_483_629) -> bool:
    """Certify kernel dimension exactly one without big-integer work.

    The column sums force singularity over the rationals, so the kernel
    has dimension at least one; a modular rank of size-1 forces the
    rational rank that high as well (a nonzero minor mod p is nonzero
    over the integers).  Together the dimension is exactly one.  Used
    for sizes where Bareiss elimination would be slow.
    """
    import numpy as np

    h = build_h_matrix(n)
    size = len(h.basis)
    a = np.array(h.rows, dtype=np.int64)
    a[np.diag_indices(size)] -= 2 * n
    a %= prime
    rank = 0
    row = 0
    for col in range(size):
        nz = np.nonzero(a[row:, col])[0]
        if nz.size == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            a[[row, p]] = a[[p, row]]
        inv = pow(int(a[row, col]), prime - 2, prime)
        a[row] = (a[row] * inv) % prime
        below = a[row + 1:, col].copy()
        if below.size:
            a[row + 1:] = (a[row + 1:] - np.outer(below, a[row])) % prime
        rank += 1
        row += 1
        if row == size:
            break
    return rank == size - 1
