"""Map between LGT link configurations and Ising plaquette configurations.

Ising qubit ``q = r * L + c`` sits on plaquette (c, r), i.e. plaquette
number ``q + 1``.  The electric operators map as

    sigma^z[h(c, r)] = Z(c, r) Z(c, r-1)   times V_y when r == 0
    sigma^z[v(c, r)] = Z(c, r) Z(c-1, r)   times V_x when c == 0

so the ribbon twists land on the seam of each direction, reproducing
``g~ = g (1 + V_y)`` on the rungs and ``g_L = V_x g`` on the last bond.
A physical LGT basis state |sigma> corresponds to the parity-even pair
(|s> + |~s>)/sqrt(2) where ``~s`` is the global spin flip.
"""

from __future__ import annotations

import numpy as np

from .geometry import Geometry
from .sectors import SectorBasis, StateVector, enumerate_ising_sector


def _bit(arr, pos):
    return (arr >> np.int64(pos)) & 1


def lgt_to_ising_configs(geom: Geometry, configs) -> np.ndarray:
    """Ising representative (plaquette (0,0) spin up) of each LGT config."""
    L, k = geom.L, geom.k
    configs = np.asarray(configs, dtype=np.int64)
    s = np.zeros_like(configs)
    row0 = np.zeros_like(configs)
    for c in range(L):
        if c > 0:
            row0 = row0 ^ _bit(configs, geom.v(c, 0))
        cur = row0
        s |= cur << np.int64(c)
        for r in range(1, k):
            cur = cur ^ _bit(configs, geom.h(c, r))
            s |= cur << np.int64(r * L + c)
    return s


def ising_to_lgt_configs(geom: Geometry, spins, v_x: int = 1, v_y: int = 1) -> np.ndarray:
    L, k = geom.L, geom.k
    spins = np.asarray(spins, dtype=np.int64)
    out = np.zeros_like(spins)

    def sb(c, r):
        return _bit(spins, (r % k) * L + (c % L))

    for c in range(L):
        for r in range(k):
            hb = sb(c, r) ^ sb(c, r - 1)
            if r == 0 and v_y == -1:
                hb = hb ^ 1
            vb = sb(c, r) ^ sb(c - 1, r)
            if c == 0 and v_x == -1:
                vb = vb ^ 1
            out |= hb << np.int64(geom.h(c, r))
            out |= vb << np.int64(geom.v(c, r))
    return out


def ising_state_to_lgt(psi: StateVector, lgt_basis: SectorBasis, atol: float = 1e-10) -> StateVector:
    """Image of a parity-even Ising vector in the LGT physical sector."""
    geom = lgt_basis.geometry
    amp = psi.amplitudes
    full = (1 << (2 * geom.L)) - 1
    idx = np.arange(amp.shape[0])
    if np.max(np.abs(amp - amp[idx ^ full])) > atol:
        raise ValueError("Ising state is not parity even")
    reps = lgt_to_ising_configs(geom, lgt_basis.states)
    return StateVector(lgt_basis, np.sqrt(2.0) * amp[reps])


def lgt_state_to_ising(phi: StateVector) -> StateVector:
    geom = phi.basis.geometry
    n = 2 * geom.L
    reps = lgt_to_ising_configs(geom, phi.basis.states)
    full = (1 << n) - 1
    out = np.zeros(1 << n, dtype=np.complex128)
    out[reps] = phi.amplitudes / np.sqrt(2.0)
    out[reps ^ full] = phi.amplitudes / np.sqrt(2.0)
    return StateVector(enumerate_ising_sector(geom.L), out)
