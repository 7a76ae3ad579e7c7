"""Constrained computational bases and state vectors living on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Geometry
from .gf2 import Infeasible, enumerate_affine, gf2_affine_solutions
from .pauli import PauliString, parity_array


class EmptySectorError(ValueError):
    pass


class SectorBreakingError(ValueError):
    pass


@dataclass(frozen=True)
class SectorLabel:
    kind: str  # "lgt", "ising" or "full"
    v_x: int = 1
    v_y: int = 1
    parity: int = 1

    def as_dict(self) -> dict:
        if self.kind == "lgt":
            return {"sector": "lgt", "gauss": 1, "v_x": self.v_x, "v_y": self.v_y}
        if self.kind == "full":
            return {"sector": "full"}
        return {"sector": "ising", "parity": self.parity}


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Sorted z-basis configurations with O(1)-amortized index lookup.

    ``lookup`` is a vectorized binary search (``np.searchsorted``) over the
    sorted ``states`` array.
    """

    n_qubits: int
    states: np.ndarray
    label: SectorLabel
    geometry: Optional[Geometry] = None

    def __len__(self) -> int:
        return int(self.states.shape[0])

    @property
    def dim(self) -> int:
        return len(self)

    def lookup(self, configs, strict: bool = True) -> np.ndarray:
        configs = np.asarray(configs, dtype=np.int64)
        pos = np.searchsorted(self.states, configs)
        pos_c = np.minimum(pos, len(self) - 1)
        found = self.states[pos_c] == configs
        if strict and not np.all(found):
            raise SectorBreakingError("configuration not in sector")
        return np.where(found, pos_c, -1)

    def index(self, config: int) -> int:
        return int(self.lookup([config])[0])

    def bitstrings(self) -> list:
        """Basis dump lines, most-significant qubit first."""
        n = self.n_qubits
        return [format(int(s), f"0{n}b") for s in self.states]

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.bitstrings():
                fh.write(line + "\n")

    # Ising parity handled by a projector, not by the basis
    def parity_projector(self):
        if self.label.kind != "ising":
            raise ValueError("parity projector only exists for the Ising basis")
        import scipy.sparse as sp

        dim = len(self)
        full = (1 << self.n_qubits) - 1
        idx = np.arange(dim)
        flip = sp.csr_matrix((np.ones(dim), (idx ^ full, idx)), shape=(dim, dim))
        return 0.5 * (sp.identity(dim, format="csr") + self.label.parity * flip)

    @property
    def projected_dim(self) -> int:
        if self.label.kind == "ising":
            return len(self) // 2
        return len(self)


@dataclass
class StateVector:
    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (len(self.basis),):
            raise ValueError("amplitude length does not match basis")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes / self.norm())

    def inner(self, other: "StateVector") -> complex:
        if other.basis is not self.basis:
            raise ValueError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes.copy())

    @classmethod
    def basis_state(cls, basis: SectorBasis, config: int) -> "StateVector":
        amp = np.zeros(len(basis), dtype=np.complex128)
        amp[basis.index(config)] = 1.0
        return cls(basis, amp)


def enumerate_lgt_sector(geom: Geometry, v_x: int = 1, v_y: int = 1) -> SectorBasis:
    """Physical sector: every Gauss law +1 and the given ribbon eigenvalues."""
    try:
        particular, basis = gf2_affine_solutions(geom.constraint_system(v_x, v_y))
    except Infeasible as exc:
        raise EmptySectorError(f"no states with V_x={v_x}, V_y={v_y}") from exc
    states = np.sort(enumerate_affine(particular, basis))
    return SectorBasis(geom.n_links, states, SectorLabel("lgt", v_x, v_y), geom)


def enumerate_ising_sector(L: int, parity: int = 1) -> SectorBasis:
    """Full ``2**(2L)`` z-basis; the X-parity lives in ``parity_projector``."""
    if L < 2:
        raise ValueError("L must be >= 2")
    n = 2 * L
    states = np.arange(1 << n, dtype=np.int64)
    return SectorBasis(n, states, SectorLabel("ising", parity=parity))


def apply_pauli(basis: SectorBasis, P: PauliString, v: StateVector) -> StateVector:
    if P.n != basis.n_qubits:
        raise ValueError("Pauli string size does not match basis")
    tgt_cfg, coeff = P.apply_to_indices(basis.states)
    try:
        tgt = basis.lookup(tgt_cfg)
    except SectorBreakingError as exc:
        raise SectorBreakingError("sector-breaking operator") from exc
    out = np.zeros(len(basis), dtype=np.complex128)
    out[tgt] = coeff * v.amplitudes
    return StateVector(basis, out)


def z_values(states: np.ndarray, qubit: int) -> np.ndarray:
    """sigma^z eigenvalue (+1/-1) of one qubit across an array of configs."""
    return 1 - 2 * ((states >> qubit) & 1)


def z_product(states: np.ndarray, mask: int) -> np.ndarray:
    return 1 - 2 * parity_array(np.asarray(states) & mask).astype(np.int64)


class PlaquetteFrame:
    """LGT sector indexed by plaquette-flip coordinates.

    Frame index ``i`` (``2L*k - 1`` bits for an L x k lattice) labels the
    configuration ``reference ^ XOR_j [bit j of i] plaquette_mask[j]``.
    Flipping plaquette ``j < n_plaquettes - 1`` is ``i ^ (1 << j)``; the last
    plaquette is the product of all others, so it is ``i ^ (2**nbits - 1)``.
    """

    def __init__(self, basis: SectorBasis):
        geom = basis.geometry
        if geom is None:
            raise ValueError("frame needs an LGT basis")
        self.geometry = geom
        self.basis = basis
        self.reference = int(basis.states[0])
        masks = geom.plaquette_masks
        self.nbits = len(masks) - 1
        configs = enumerate_affine(self.reference, masks[:-1])
        if configs.shape[0] != len(basis):
            raise ValueError("plaquette flips do not generate this sector")
        self.configs = configs
        self.to_sorted = basis.lookup(configs)  # frame index -> sorted index

    @property
    def dim(self) -> int:
        return self.configs.shape[0]

    def to_frame(self, amplitudes: np.ndarray) -> np.ndarray:
        return np.asarray(amplitudes)[self.to_sorted]

    def from_frame(self, amplitudes: np.ndarray) -> np.ndarray:
        out = np.empty_like(amplitudes)
        out[self.to_sorted] = amplitudes
        return out


def basis_from_configs(n_qubits: int, configs: Sequence[int], label: SectorLabel, geom=None) -> SectorBasis:
    states = np.unique(np.asarray(configs, dtype=np.int64))
    return SectorBasis(n_qubits, states, label, geom)
