"""Reduced density matrices along the ladder and the distillable/symmetry split.

A cut ``(a, b)`` takes the site columns ``a+1 .. b`` (mod L) as subsystem A.
On the gauge side A holds every vertical link of those columns and the
horizontal links strictly between them; the horizontal links h(a, r) and
h(b, r) are the boundary links and live in the complement.  On the Ising
side A is the plaquette columns ``a+1 .. b-1`` (both rows), the plaquettes
whose links all lie in A.  Width ``(b - a) mod L`` ranges over 2..L-1.

Superselection labels of the gauge side are z-diagonal parities of the A
configuration: the remnant Gauss law at each boundary site (equal to
sigma^z of the adjacent boundary link) and the partial ribbon
V_x^A = prod of sigma^z over the row-0 verticals inside A.

Blocks are built from the amplitude matrix M[a_config, abar_config]:
rho_A^(s) = M_s M_s^dag, so its spectrum is the squared singular values of
M_s and rho_A itself is never formed for large A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Geometry
from .pauli import parity_array
from .sectors import StateVector

EIG_DROP = 1e-14
NEG_TOL = -1e-10


class EntanglementError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Cut:
    side: str
    L: int
    a: int
    b: int
    k: int = 2

    def __post_init__(self):
        if self.side not in ("lgt", "ising"):
            raise ValueError(f"unknown side {self.side!r}")
        w = (self.b - self.a) % self.L
        if not 2 <= w <= self.L - 1:
            raise ValueError(f"cut width {w} outside 2..{self.L - 1}")
        if self.side == "ising" and self.k != 2:
            raise ValueError("the Ising dual exists for k = 2 only")

    @property
    def width(self) -> int:
        return (self.b - self.a) % self.L

    @property
    def geometry(self) -> Geometry:
        return Geometry(self.L, self.k)

    @property
    def columns(self) -> List[int]:
        """Site columns in A."""
        return [(self.a + 1 + j) % self.L for j in range(self.width)]

    @property
    def n_qubits(self) -> int:
        return self.geometry.n_links if self.side == "lgt" else 2 * self.L

    @property
    def qubits_A(self) -> Tuple[int, ...]:
        geom = self.geometry
        cols = self.columns
        if self.side == "lgt":
            verts = [geom.v(c, r) for c in cols for r in range(self.k)]
            hors = [geom.h(c, r) for c in cols[:-1] for r in range(self.k)]
            return tuple(sorted(verts + hors))
        return tuple(sorted(r * self.L + c for c in cols[:-1] for r in range(2)))

    @property
    def qubits_Abar(self) -> Tuple[int, ...]:
        inside = set(self.qubits_A)
        return tuple(q for q in range(self.n_qubits) if q not in inside)

    @property
    def boundary_links(self) -> Tuple[int, ...]:
        """nu^a_r then nu^b_r (gauge side)."""
        geom = self.geometry
        return tuple(geom.h(self.a, r) for r in range(self.k)) + tuple(
            geom.h(self.b, r) for r in range(self.k)
        )

    @property
    def ribbon_x_A(self) -> Tuple[int, ...]:
        inside = set(self.qubits_A)
        return tuple(q for q in self.geometry.ribbon_x if q in inside)

    def label_masks(self) -> List[int]:
        """Gauge-side superselection operators as z-masks over A links.

        The remnant Gauss laws at the boundary sites (a+1, r) and (b, r),
        followed by the partial ribbon.
        """
        geom = self.geometry
        inside = set(self.qubits_A)
        masks = []
        for col in (self.columns[0], self.columns[-1]):
            for r in range(self.k):
                masks.append(sum(1 << q for q in geom.site_links(col, r) if q in inside))
        masks.append(sum(1 << q for q in self.ribbon_x_A))
        return masks


def all_cuts(L: int, side: str, k: int = 2) -> List[Cut]:
    return [Cut(side, L, a, (a + w) % L, k) for a in range(L) for w in range(2, L)]


def half_cut(L: int, side: str, k: int = 2) -> Cut:
    return Cut(side, L, 0, (L + 1) // 2, k)


def _gather(states: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    out = np.zeros(states.shape[0], dtype=np.int64)
    for j, q in enumerate(qubits):
        out |= ((states >> np.int64(q)) & 1) << np.int64(j)
    return out


@dataclass
class ReducedDensityMatrix:
    """rho_A in factorized form: rho_A = M M^dag.

    ``a_configs`` are the A configurations of the rows of M, as full-width
    integers with only A bits set.
    """

    cut: Cut
    M: np.ndarray
    a_configs: np.ndarray
    abar_configs: np.ndarray

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.M @ self.M.conj().T

    def trace(self) -> float:
        return float(np.real(np.vdot(self.M, self.M)))

    def eigenvalues(self) -> np.ndarray:
        s = np.linalg.svd(self.M, compute_uv=False)
        return s * s


def reduced_density_matrix(state: StateVector, cut: Cut, atol: float = 1e-12) -> ReducedDensityMatrix:
    basis = state.basis
    if basis.n_qubits != cut.n_qubits:
        raise ValueError("cut and state live on different registers")
    if cut.side == "lgt" and basis.label.kind not in ("lgt", "full"):
        raise ValueError("gauge-side cut needs a gauge-side state")
    if cut.side == "ising" and basis.label.kind != "ising":
        raise ValueError("Ising cut needs an Ising state")
    amp = state.amplitudes
    if abs(np.vdot(amp, amp).real - 1.0) > 1e-10:
        raise ValueError("state is not normalized")
    nz = np.abs(amp) > 0
    states = basis.states[nz]
    qa, qb = cut.qubits_A, cut.qubits_Abar
    ia, ib = _gather(states, qa), _gather(states, qb)
    if cut.side == "ising":
        # full register: keep every A configuration so the parity pairing is total
        a_keys = np.arange(1 << len(qa), dtype=np.int64)
        rows = ia
    else:
        a_keys, rows = np.unique(ia, return_inverse=True)
    b_keys, cols = np.unique(ib, return_inverse=True)
    M = np.zeros((a_keys.shape[0], b_keys.shape[0]), dtype=np.complex128)
    M[rows, cols] = amp[nz]
    a_full = np.zeros_like(a_keys)
    for j, q in enumerate(qa):
        a_full |= ((a_keys >> np.int64(j)) & 1) << np.int64(q)
    b_full = np.zeros_like(b_keys)
    for j, q in enumerate(qb):
        b_full |= ((b_keys >> np.int64(j)) & 1) << np.int64(q)
    rdm = ReducedDensityMatrix(cut, M, a_full, b_full)
    if abs(rdm.trace() - 1.0) > atol:
        raise EntanglementError("reduced density matrix trace differs from 1")
    return rdm


@dataclass
class Block:
    label: Tuple[int, ...]
    p: float
    eigenvalues: np.ndarray  # of the normalized block, descending
    M: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def matrix(self) -> np.ndarray:
        """Normalized block rho~ = M_s M_s^dag / p_s."""
        return (self.M @ self.M.conj().T) / self.p

    def rank(self, tol: float = 1e-10) -> int:
        return int(np.sum(self.eigenvalues > tol))


@dataclass
class BlockDecomposition:
    blocks: List[Block]
    S_dist: float
    S_symm: float
    S_total: float

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def von_neumann(eigs: np.ndarray) -> float:
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size and eigs.min() < NEG_TOL:
        raise EntanglementError(f"negative eigenvalue {eigs.min():.3e}")
    e = eigs[eigs > EIG_DROP]
    return float(-np.sum(e * np.log(e)))


def entropy_decomposition(blocks: Sequence[Block]) -> Tuple[float, float, float]:
    """(S_dist, S_symm, S_total) with S_total = S_dist - sum p log p."""
    ps = np.array([b.p for b in blocks])
    if ps.size and ps.min() < NEG_TOL:
        raise EntanglementError("negative block weight")
    s_dist = float(sum(b.p * von_neumann(b.eigenvalues) for b in blocks))
    s_symm = von_neumann(ps)
    return s_dist, s_symm, s_dist + s_symm


def _decompose(pieces) -> BlockDecomposition:
    blocks = []
    for label, Ms in pieces:
        sv = np.linalg.svd(Ms, compute_uv=False)
        w = sv * sv
        p = float(w.sum())
        if p <= EIG_DROP:
            continue
        blocks.append(Block(tuple(int(x) for x in label), p, w / p, Ms))
    total = sum(b.p for b in blocks)
    if abs(total - 1.0) > 1e-10:
        raise EntanglementError(f"block weights sum to {total}")
    return BlockDecomposition(blocks, *entropy_decomposition(blocks))


def lgt_labels(rdm: ReducedDensityMatrix, include_ribbon: bool = True) -> np.ndarray:
    """(n_rows, n_labels) array of +-1 superselection values per A configuration."""
    masks = rdm.cut.label_masks()
    if not include_ribbon:
        masks = masks[:-1]
    cfg = rdm.a_configs
    return np.stack([1 - 2 * parity_array(cfg & np.int64(m)).astype(np.int64) for m in masks], axis=1)


def lgt_superselection_blocks(rdm: ReducedDensityMatrix, cut: Optional[Cut] = None,
                              include_ribbon: bool = True) -> BlockDecomposition:
    """Block rho_A by the boundary labels and, by default, the partial ribbon.

    The nonzero spectrum of each block equals that of the matching block of
    rho_Abar, since every label is also fixed by the complement configuration.
    """
    cut = cut or rdm.cut
    if cut.side != "lgt":
        raise ValueError("superselection blocks need a gauge-side cut")
    labels = lgt_labels(rdm, include_ribbon)
    keys, inv = np.unique(labels, axis=0, return_inverse=True)
    inv = inv.ravel()
    M = rdm.M
    # rho commutes with the labels iff no complement column couples two blocks
    support = np.abs(M) > 0
    owners = [support[inv == j].any(axis=0) for j in range(len(keys))]
    if len(keys) > 1:
        overlap = np.sum(np.stack(owners), axis=0)
        if np.any(overlap > 1):
            rho = rdm.matrix
            off = np.abs(rho[inv[:, None] != inv[None, :]])
            if off.size and off.max() > 1e-12:
                raise EntanglementError("reduced density matrix mixes superselection blocks")
    pieces = [(keys[j], M[inv == j]) for j in range(len(keys))]
    return _decompose(pieces)


def ising_parity_blocks(rdm: ReducedDensityMatrix, cut: Optional[Cut] = None) -> BlockDecomposition:
    """Split rho_A by the A-parity prod_{p in A} X_p."""
    cut = cut or rdm.cut
    if cut.side != "ising":
        raise ValueError("parity blocks need an Ising cut")
    nA = len(cut.qubits_A)
    M = rdm.M
    full = (1 << nA) - 1
    reps = np.arange(1 << (nA - 1), dtype=np.int64)  # top A bit 0
    plus = (M[reps] + M[reps ^ full]) / np.sqrt(2.0)
    minus = (M[reps] - M[reps ^ full]) / np.sqrt(2.0)
    return _decompose([((1,), plus), ((-1,), minus)])


def entropy_direct(rho: np.ndarray) -> float:
    """-Tr rho log rho from a dense eigendecomposition (oracle)."""
    return von_neumann(np.linalg.eigvalsh((rho + rho.conj().T) / 2))


def decompose(state: StateVector, cut: Cut) -> BlockDecomposition:
    rdm = reduced_density_matrix(state, cut)
    if cut.side == "lgt":
        return lgt_superselection_blocks(rdm)
    return ising_parity_blocks(rdm)


def symmetry_cap(side: str) -> float:
    """Largest possible S_symm: 3 log 2 for the gauge side, log 2 for Ising."""
    return 3 * math.log(2) if side == "lgt" else math.log(2)
