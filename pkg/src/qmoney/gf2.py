"""GF(2) linear algebra on rows packed into Python integers.

A row vector is an ``int`` whose bit ``j`` is the entry in column ``j``.
Python integers are arbitrary precision, so a row of any width is a single
object and row addition is ``^``.  All routines treat missing high bits as
zeros; ``width`` arguments are only needed where the ambient dimension
matters (null spaces).
"""

from __future__ import annotations

from typing import Iterable, Sequence

__all__ = [
    "rank",
    "rref",
    "in_rowspan",
    "solve",
    "nullspace",
]


def _lowest_bit(r: int) -> int:
    """Index of the lowest set bit of a nonzero int."""
    return (r & -r).bit_length() - 1


def rank(rows: Iterable[int]) -> int:
    """Rank of the row set over GF(2)."""
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            c = _lowest_bit(r)
            if c not in pivots:
                pivots[c] = r
                break
            r ^= pivots[c]
    return len(pivots)


def rref(rows: Iterable[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form.

    Returns ``(reduced, pivot_cols)`` sorted by pivot column; every pivot
    column has exactly one set bit across the reduced rows.  Zero rows are
    dropped, so the output is a canonical basis of the row span.
    """
    reduced: list[int] = []
    pivot_cols: list[int] = []
    for r in rows:
        for pr, pc in zip(reduced, pivot_cols):
            if (r >> pc) & 1:
                r ^= pr
        if r == 0:
            continue
        c = _lowest_bit(r)
        for i, pr in enumerate(reduced):
            if (pr >> c) & 1:
                reduced[i] = pr ^ r
        reduced.append(r)
        pivot_cols.append(c)
    order = sorted(range(len(reduced)), key=lambda i: pivot_cols[i])
    return [reduced[i] for i in order], [pivot_cols[i] for i in order]


def solve(rows: Sequence[int], target: int) -> int | None:
    """Express ``target`` as a XOR of ``rows``.

    Returns a combination mask (bit ``i`` set iff ``rows[i]`` participates)
    or ``None`` when ``target`` is outside the row span.  The empty
    combination ``0`` is returned for ``target == 0``.
    """
    pivots: dict[int, tuple[int, int]] = {}
    for i, r in enumerate(rows):
        combo = 1 << i
        while r:
            c = _lowest_bit(r)
            if c not in pivots:
                pivots[c] = (r, combo)
                break
            pr, pcombo = pivots[c]
            r ^= pr
            combo ^= pcombo
    combo = 0
    while target:
        c = _lowest_bit(target)
        if c not in pivots:
            return None
        pr, pcombo = pivots[c]
        target ^= pr
        combo ^= pcombo
    return combo


def in_rowspan(rows: Sequence[int], v: int) -> bool:
    """True iff ``v`` lies in the GF(2) span of ``rows``."""
    return solve(rows, v) is not None


def nullspace(rows: Iterable[int], width: int) -> list[int]:
    """Basis of ``{v : popcount(row & v) even for every row}`` in ``width`` bits.

    Returns ``width - rank`` vectors, one per free column of the RREF.
    """
    reduced, pivot_cols = rref(rows)
    pivot_set = set(pivot_cols)
    basis = []
    for f in range(width):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(reduced, pivot_cols):
            if (r >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis
