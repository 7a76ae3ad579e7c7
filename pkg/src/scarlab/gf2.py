"""Bitset Gaussian elimination over GF(2).

Rows are Python ints (arbitrary width, so the multi-word case is free).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np


class Infeasible(Exception):
    """Raised when a parity system has no solution."""


@dataclass(frozen=True)
class Gf2System:
    n_vars: int
    rows: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)  # (coefficients, parity)

    @classmethod
    def from_rows(cls, n_vars: int, rows: Sequence[Tuple[int, int]]) -> "Gf2System":
        return cls(n_vars, tuple((int(c), int(p) & 1) for c, p in rows))


def gf2_rank(rows: Sequence[int]) -> int:
    return len(_reduce([(r, 0) for r in rows])[0])


def _reduce(rows):
    """Reduced row echelon form. Returns (pivot rows, pivot columns, inconsistent)."""
    work = [list(r) for r in rows]
    pivots: List[List[int]] = []
    cols: List[int] = []
    inconsistent = False
    for coeff, par in work:
        for prow, pcol in zip(pivots, cols):
            if (coeff >> pcol) & 1:
                coeff ^= prow[0]
                par ^= prow[1]
        if coeff == 0:
            inconsistent |= bool(par)
            continue
        col = (coeff & -coeff).bit_length() - 1
        for prow in pivots:
            if (prow[0] >> col) & 1:
                prow[0] ^= coeff
                prow[1] ^= par
        pivots.append([coeff, par])
        cols.append(col)
    return pivots, cols, inconsistent


def gf2_affine_solutions(system: Gf2System) -> Tuple[int, List[int]]:
    """Particular solution and nullspace basis of ``A x = b``.

    Raises Infeasible if the parity bits contradict each other.
    """
    pivots, cols, bad = _reduce(system.rows)
    if bad:
        raise Infeasible("inconsistent parity constraints")
    pivot_cols = set(cols)
    particular = 0
    for (coeff, par), col in zip(pivots, cols):
        if par:
            particular |= 1 << col
    basis = []
    for free in range(system.n_vars):
        if free in pivot_cols:
            continue
        vec = 1 << free
        for (coeff, _), col in zip(pivots, cols):
            if (coeff >> free) & 1:
                vec |= 1 << col
        basis.append(vec)
    return particular, basis


def enumerate_affine(particular: int, basis: Sequence[int]) -> np.ndarray:
    """All ``2**len(basis)`` points of the affine space as an int64 array.

    Point ``i`` is ``particular ^ XOR_{j: bit j of i} basis[j]``.
    """
    out = np.array([particular], dtype=np.int64)
    for vec in basis:
        out = np.concatenate([out, out ^ np.int64(vec)])
    return out


def check_solution(system: Gf2System, x: int) -> bool:
    return all(bin(c & x).count("1") % 2 == p for c, p in system.rows)


def solve_or_none(system: Gf2System) -> Optional[Tuple[int, List[int]]]:
    try:
        return gf2_affine_solutions(system)
    except Infeasible:
        return None
