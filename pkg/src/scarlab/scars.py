"""Analytic stabilizer scar states on the L x 2 ladder and their effective Hamiltonian.

Every scar basis state is fixed by a pattern of rung eigenvalues
``zp[q] = <Z_q Z_{q+L}>`` and ``xp[q] = <X_q X_{q+L}>`` (q = 0..L-1 is the
column, plaquette numbers q+1 and q+1+L).  The vector is built from the seed
z-state with the bottom row up and the top row encoding ``zp``, followed by
the projector chain ``prod_q (1 + xp[q] X_q X_{q+L}) / sqrt(2)``.  That fixes
the global phase of every state so that the plaquette, rung and bond matrix
elements come out with the unsigned values 2, +-1 and 2 (times the signed
couplings of H_dual).

On the gauge side the same chain runs over the first L-1 rungs only, because
the last rung flip is the product of the others there; the result equals the
dual image of the Ising vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .duality import ising_to_lgt_configs
from .geometry import Geometry
from .gf2 import gf2_rank
from .hamiltonian import CouplingConfig, SparseOperator
from .pauli import PauliString
from .sectors import SectorBasis, StateVector, enumerate_ising_sector, enumerate_lgt_sector

S_SIGN = {1: 1, 2: -1, 3: -1, 4: 1}
T_SIGN = {1: -1, 2: 1, 3: -1, 4: 1}


@dataclass(frozen=True)
class ScarLabel:
    parity_class: str  # "even" or "odd"
    which: Optional[int] = None
    alpha: Optional[int] = None
    k: Optional[int] = None

    def validate(self, L: int) -> None:
        if self.parity_class == "even":
            if L % 2:
                raise ValueError("even scar label needs even L")
            if self.which not in (1, 2):
                raise ValueError("which must be 1 or 2")
        elif self.parity_class == "odd":
            if L % 2 == 0:
                raise ValueError("odd scar label needs odd L")
            if self.alpha not in (1, 2, 3, 4) or self.k is None or not 1 <= self.k <= L:
                raise ValueError(f"label out of range: alpha={self.alpha}, k={self.k}")
        else:
            raise ValueError(f"unknown parity class {self.parity_class!r}")

    def as_dict(self) -> dict:
        if self.parity_class == "even":
            return {"which": self.which}
        return {"alpha": self.alpha, "k": self.k}


def even_labels() -> List[ScarLabel]:
    return [ScarLabel("even", which=w) for w in (1, 2)]


def odd_labels(L: int) -> List[ScarLabel]:
    """All 4L odd labels in effective-Hamiltonian order (k outer, alpha inner)."""
    return [ScarLabel("odd", alpha=a, k=k) for k in range(1, L + 1) for a in (1, 2, 3, 4)]


def scar_labels(L: int) -> List[ScarLabel]:
    return even_labels() if L % 2 == 0 else odd_labels(L)


def scar_patterns(L: int, label: ScarLabel) -> Tuple[np.ndarray, np.ndarray]:
    """(zp, xp): rung Z and X eigenvalues, index q = column = plaquette - 1."""
    label.validate(L)
    q = np.arange(L)
    if label.parity_class == "even":
        pm = 1 if label.which == 1 else -1
        zp = pm * (-1) ** (q + 1)
        xp = -np.ones(L, dtype=int)
        return zp.astype(int), xp
    k = label.k - 1
    s, t = S_SIGN[label.alpha], T_SIGN[label.alpha]
    alt = (-1) ** np.abs(k - q)
    zp = np.where(q < k, s * alt, np.where(q > k, -s * alt, t))
    xp = np.where(q == k, 1, -1)
    return zp.astype(int), xp.astype(int)


@dataclass(frozen=True)
class StabilizerSpec:
    n_qubits: int
    generators: Tuple[Tuple[PauliString, int], ...]

    def is_complete(self) -> bool:
        paulis = [p for p, _ in self.generators]
        commuting = all(a.commutes(b) for i, a in enumerate(paulis) for b in paulis[i + 1 :])
        rows = [(p.x_mask << self.n_qubits) | p.z_mask for p in paulis]
        return commuting and len(paulis) == self.n_qubits and gf2_rank(rows) == self.n_qubits

    def table(self) -> List[dict]:
        return [{"pauli": p.label(), "eigenvalue": int(v)} for p, v in self.generators]


def rung_x_mask_lgt(geom: Geometry, c: int) -> int:
    """Links of X_q X_{q+L} on the gauge side: the four verticals of two adjacent rungs."""
    return sum(1 << geom.v(cc, r) for cc in (c, c + 1) for r in (0, 1))


def _ising_rung_mask(L: int, q: int) -> int:
    return (1 << q) | (1 << (q + L))


def scar_spec(L: int, label: ScarLabel, side: str = "ising", v_x: int = 1, v_y: int = 1) -> StabilizerSpec:
    zp, xp = scar_patterns(L, label)
    gens = []
    if side == "ising":
        n = 2 * L
        for q in range(L):
            gens.append((PauliString.z_on(n, _ising_rung_mask(L, q)), int(zp[q])))
        for q in range(L):
            gens.append((PauliString.x_on(n, _ising_rung_mask(L, q)), int(xp[q])))
        return StabilizerSpec(n, tuple(gens))
    if side != "lgt":
        raise ValueError(f"unknown side {side!r}")
    geom = Geometry(L, 2)
    n = geom.n_links
    for c in range(L):
        gens.append((PauliString.z_on(n, 1 << geom.h(c, 1)), int(zp[c])))
    for c in range(L - 1):
        gens.append((PauliString.x_on(n, rung_x_mask_lgt(geom, c)), int(xp[c])))
    for m in geom.site_masks[:-1]:
        gens.append((PauliString.z_on(n, m), 1))
    gens.append((PauliString.z_on(n, geom.ribbon_x_mask), v_x))
    gens.append((PauliString.z_on(n, geom.ribbon_y_mask), v_y))
    return StabilizerSpec(n, tuple(gens))


def even_scar_spec(L: int, which: int, side: str = "ising") -> StabilizerSpec:
    if L % 2:
        raise ValueError("even_scar_spec needs even L")
    return scar_spec(L, ScarLabel("even", which=which), side)


def odd_scar_spec(L: int, label: ScarLabel, side: str = "ising") -> StabilizerSpec:
    if L % 2 == 0:
        raise ValueError("odd_scar_spec needs odd L")
    return scar_spec(L, label, side)


def _chain(seed: int, masks: Sequence[int], signs: Sequence[int]):
    """Configs and amplitudes of prod_j (1 + signs[j] X^{masks[j]}) / sqrt(2) |seed>."""
    cfg = np.array([seed], dtype=np.int64)
    amp = np.array([1.0])
    for m, s in zip(masks, signs):
        cfg = np.concatenate([cfg, cfg ^ np.int64(m)])
        amp = np.concatenate([amp, s * amp]) / np.sqrt(2.0)
    return cfg, amp


def ising_seed(L: int, zp) -> int:
    return sum(1 << q for q in range(L) if zp[q] == -1)


def scar_state(L: int, label: ScarLabel, side: str = "ising", basis: Optional[SectorBasis] = None,
               v_x: int = 1, v_y: int = 1) -> StateVector:
    zp, xp = scar_patterns(L, label)
    seed = ising_seed(L, zp)
    if side == "ising":
        basis = basis or enumerate_ising_sector(L)
        masks = [_ising_rung_mask(L, q) for q in range(L)]
        cfg, amp = _chain(seed, masks, xp)
    elif side == "lgt":
        geom = Geometry(L, 2)
        basis = basis or enumerate_lgt_sector(geom, v_x, v_y)
        lab = basis.label
        v_x, v_y = lab.v_x, lab.v_y
        lgt_seed = int(ising_to_lgt_configs(geom, [seed], v_x, v_y)[0])
        masks = [rung_x_mask_lgt(geom, c) for c in range(L - 1)]
        cfg, amp = _chain(lgt_seed, masks, xp[: L - 1])
    else:
        raise ValueError(f"unknown side {side!r}")
    out = np.zeros(len(basis), dtype=np.complex128)
    out[basis.lookup(cfg)] = amp
    return StateVector(basis, out)


def even_scar_state(L: int, which: int, side: str = "ising", basis=None) -> StateVector:
    if L % 2:
        raise ValueError("even scar states need even L")
    return scar_state(L, ScarLabel("even", which=which), side, basis)


def odd_scar_state(L: int, label: ScarLabel, side: str = "ising", basis=None) -> StateVector:
    if L % 2 == 0:
        raise ValueError("odd scar states need odd L")
    return scar_state(L, label, side, basis)


def scar_basis_matrix(L: int, side: str = "ising", basis: Optional[SectorBasis] = None) -> np.ndarray:
    """Columns are the scar basis vectors in label order."""
    if basis is None:
        basis = enumerate_ising_sector(L) if side == "ising" else enumerate_lgt_sector(Geometry(L, 2))
    cols = [scar_state(L, lab, side, basis).amplitudes for lab in scar_labels(L)]
    return np.stack(cols, axis=1)


def effective_hamiltonian(L: int, cfg: CouplingConfig) -> np.ndarray:
    """H_dual inside the odd-L scar span, from the analytic matrix elements.

    Plaquette term: -2 between (alpha 1, 4) and (2, 3) at equal k.
    Rung term: diagonal -sum_q g~_q zp[q], which is -g~ t_alpha without the break.
    Bond term: -2 g_{k-1} between (3, k-1)-(1, k) and (4, k-1)-(2, k); k = 1 wraps
    to k-1 = L through the V_x-twisted bond.
    """
    if L % 2 == 0:
        raise ValueError("effective Hamiltonian is defined for odd L")
    dim = 4 * L

    def idx(alpha, k):
        return ((k - 1) % L) * 4 + alpha - 1

    h = np.zeros((dim, dim))
    g_rung = np.array([cfg.rung_coupling(p) for p in range(1, L + 1)])
    for k in range(1, L + 1):
        for a, b in ((1, 4), (2, 3)):
            h[idx(a, k), idx(b, k)] = h[idx(b, k), idx(a, k)] = -2.0
        for alpha in (1, 2, 3, 4):
            zp, _ = scar_patterns(L, ScarLabel("odd", alpha=alpha, k=k))
            h[idx(alpha, k), idx(alpha, k)] = -float(g_rung @ zp)
        bond = k - 1 if k > 1 else L
        gb = cfg.bond_coupling(bond, L)
        for a, b in ((3, 1), (4, 2)):
            h[idx(a, k - 1), idx(b, k)] += -2.0 * gb
            h[idx(b, k), idx(a, k - 1)] += -2.0 * gb
    return h


def projected_hamiltonian(H: SparseOperator, vectors: np.ndarray) -> np.ndarray:
    return vectors.conj().T @ (H.matrix @ vectors)


def check_subspace_invariance(H: SparseOperator, scar_states: Sequence[StateVector],
                              atol: float = 1e-10) -> float:
    """max over states of ||(1 - P) H |phi>||, P the projector onto their span."""
    v = np.stack([s.amplitudes for s in scar_states], axis=1)
    gram = v.conj().T @ v
    if np.max(np.abs(gram - np.eye(v.shape[1]))) > atol:
        raise ValueError("scar states are not orthonormal")
    hv = H.matrix @ v
    resid = hv - v @ (v.conj().T @ hv)
    return float(np.max(np.linalg.norm(resid, axis=0)))


def scar_table_json(L: int, side: str = "ising") -> str:
    rows = []
    for lab in scar_labels(L):
        row = lab.as_dict()
        row["stabilizers"] = scar_spec(L, lab, side).table()
        rows.append(row)
    return json.dumps(rows, indent=1)
