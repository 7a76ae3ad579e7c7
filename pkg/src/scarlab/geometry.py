"""Periodic L x k square lattice: links, plaquettes, sites and ribbons.

Link ids are column-major, horizontal before vertical inside a column::

    h(c, r) = c * 2k + r          # site (c, r) -> (c + 1, r)
    v(c, r) = c * 2k + k + r      # site (c, r) -> (c, r + 1)

Plaquette (c, r) sits between rows r and r + 1 and columns c and c + 1.
Its 1-based number is ``r * L + c + 1`` so the top row is 1..L and the next
row is L+1..2L.  Bit ``id`` of a configuration integer is link ``id``; a set
bit means sigma^z = -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

from .gf2 import Gf2System
from .pauli import PauliString


@dataclass(frozen=True)
class Geometry:
    L: int
    k: int = 2

    def __post_init__(self):
        if self.L < 2 or self.k < 2:
            raise ValueError(f"lattice needs L >= 2 and k >= 2, got L={self.L}, k={self.k}")

    @property
    def n_links(self) -> int:
        return 2 * self.L * self.k

    @property
    def n_plaquettes(self) -> int:
        return self.L * self.k

    @property
    def n_sites(self) -> int:
        return self.L * self.k

    def h(self, c: int, r: int) -> int:
        return (c % self.L) * 2 * self.k + (r % self.k)

    def v(self, c: int, r: int) -> int:
        return (c % self.L) * 2 * self.k + self.k + (r % self.k)

    def link_coords(self, link: int) -> Tuple[int, int, str]:
        c, rem = divmod(link, 2 * self.k)
        if rem < self.k:
            return c, rem, "h"
        return c, rem - self.k, "v"

    # plaquettes are addressed by 1-based number p
    def plaquette_number(self, c: int, r: int) -> int:
        return (r % self.k) * self.L + (c % self.L) + 1

    def plaquette_coords(self, p: int) -> Tuple[int, int]:
        r, c = divmod(p - 1, self.L)
        return c, r

    def plaquette_links(self, p: int) -> Tuple[int, int, int, int]:
        c, r = self.plaquette_coords(p)
        return (self.h(c, r), self.h(c, r + 1), self.v(c, r), self.v(c + 1, r))

    def site_links(self, c: int, r: int) -> Tuple[int, int, int, int]:
        return (self.h(c, r), self.h(c - 1, r), self.v(c, r), self.v(c, r - 1))

    @cached_property
    def plaquette_masks(self) -> Tuple[int, ...]:
        """Link bitmask of every plaquette, index 0 is plaquette 1."""
        return tuple(_mask(self.plaquette_links(p)) for p in range(1, self.n_plaquettes + 1))

    @cached_property
    def site_masks(self) -> Tuple[int, ...]:
        return tuple(
            _mask(self.site_links(c, r)) for r in range(self.k) for c in range(self.L)
        )

    @cached_property
    def ribbon_x(self) -> Tuple[int, ...]:
        """Links cut by a loop winding in x: the vertical links of row 0."""
        return tuple(self.v(c, 0) for c in range(self.L))

    @cached_property
    def ribbon_y(self) -> Tuple[int, ...]:
        """Links cut by a loop winding in y: the horizontal links of column 0."""
        return tuple(self.h(0, r) for r in range(self.k))

    @property
    def ribbon_x_mask(self) -> int:
        return _mask(self.ribbon_x)

    @property
    def ribbon_y_mask(self) -> int:
        return _mask(self.ribbon_y)

    def gauss_operator(self, site_index: int) -> PauliString:
        return PauliString.z_on(self.n_links, self.site_masks[site_index])

    def plaquette_operator(self, p: int) -> PauliString:
        return PauliString.x_on(self.n_links, self.plaquette_masks[p - 1])

    def constraint_system(self, v_x: int = 1, v_y: int = 1) -> Gf2System:
        """All Gauss laws at +1 plus both ribbons, as parity equations."""
        rows = [(m, 0) for m in self.site_masks]
        rows.append((self.ribbon_x_mask, 0 if v_x == 1 else 1))
        rows.append((self.ribbon_y_mask, 0 if v_y == 1 else 1))
        return Gf2System.from_rows(self.n_links, rows)


def build_geometry(L: int, k: int = 2) -> Geometry:
    return Geometry(L, k)


def _mask(links) -> int:
    m = 0
    for link in links:
        m ^= 1 << link
    return m
