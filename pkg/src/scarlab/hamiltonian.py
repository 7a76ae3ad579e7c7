"""Sparse LGT and dual-Ising Hamiltonians, spectra and the duality check.

Both Hamiltonians carry the signed convention

    H     = - sum_p prod_{nu in p} sigma^x_nu  - sum_nu g_nu sigma^z_nu
    H_dual = - sum_p (X_p + X_{p+L}) - sum_p g~_p Z_p Z_{p+L}
             - sum_p g_p (Z_p Z_{p+1} + Z_{p+L} Z_{p+L+1})

with ``g~_p = g_p' (1 + V_y)``, ``g_L = V_x g`` and ``g_p' = g + epsilon`` on
the single rung ``p = epsilon_site``.  On the gauge side the same shift sits
on both horizontal links of column ``epsilon_site - 1``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import Geometry
from .sectors import SectorBasis, SectorLabel, enumerate_ising_sector, enumerate_lgt_sector, z_values

DENSE_CAP = 1 << 15


@dataclass(frozen=True)
class CouplingConfig:
    g: float
    epsilon: float = 0.0
    epsilon_site: int = 1
    v_x: int = 1
    v_y: int = 1

    def __post_init__(self):
        if not math.isfinite(self.g):
            raise ValueError("g must be finite")
        if not (self.epsilon >= 0.0):
            raise ValueError("epsilon must be >= 0")
        if self.v_x not in (1, -1) or self.v_y not in (1, -1):
            raise ValueError("ribbon eigenvalues must be +1 or -1")

    @property
    def g_tilde(self) -> float:
        return self.g * (1 + self.v_y)

    def rung_coupling(self, p: int) -> float:
        """g~ in front of Z_p Z_{p+L}, including the degeneracy break."""
        g = self.g + (self.epsilon if p == self.epsilon_site else 0.0)
        return g * (1 + self.v_y)

    def bond_coupling(self, p: int, L: int) -> float:
        return self.v_x * self.g if p == L else self.g


def apply_degeneracy_break(cfg: CouplingConfig, L: int, epsilon: Optional[float] = None,
                           site: Optional[int] = None) -> CouplingConfig:
    """Shift the coupling of the single rung term Z_p Z_{p+L} by epsilon."""
    eps = cfg.epsilon if epsilon is None else epsilon
    p = cfg.epsilon_site if site is None else site
    if not 1 <= p <= L:
        raise ValueError(f"epsilon_site {p} outside 1..{L}")
    if eps <= 0:
        raise ValueError("degeneracy break needs epsilon > 0")
    return replace(cfg, epsilon=eps, epsilon_site=p)


@dataclass(frozen=True, eq=False)
class SparseOperator:
    matrix: sp.csr_matrix
    hermitian: bool
    label: str = ""

    def __post_init__(self):
        if self.hermitian:
            diff = self.matrix - self.matrix.conj().T
            if diff.nnz and np.max(np.abs(diff.data)) != 0.0:
                raise ValueError("operator flagged hermitian is not")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, v):
        return self.matrix @ v

    def norm_bound(self) -> float:
        """Max absolute row sum, an upper bound on the spectral norm."""
        return float(np.max(np.asarray(np.abs(self.matrix).sum(axis=1)).ravel()))

    def trace(self) -> float:
        return float(np.real(self.matrix.diagonal().sum()))

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    sector_label: dict


def full_lgt_basis(geom: Geometry) -> SectorBasis:
    """Every link configuration, for operator identities off the physical sector."""
    states = np.arange(1 << geom.n_links, dtype=np.int64)
    return SectorBasis(geom.n_links, states, SectorLabel("full"), geom)


def link_couplings(geom: Geometry, cfg: CouplingConfig) -> np.ndarray:
    g = np.full(geom.n_links, cfg.g, dtype=float)
    if cfg.epsilon:
        c = cfg.epsilon_site - 1
        for r in range(geom.k):
            g[geom.h(c, r)] += cfg.epsilon
    return g


def build_lgt_hamiltonian(geom: Geometry, basis: SectorBasis, cfg: CouplingConfig) -> SparseOperator:
    if basis.geometry != geom or basis.n_qubits != geom.n_links:
        raise ValueError("basis was not built on this geometry")
    lab = basis.label
    if lab.kind == "lgt" and (lab.v_x, lab.v_y) != (cfg.v_x, cfg.v_y):
        raise ValueError("coupling ribbon labels do not match the basis sector")
    if cfg.epsilon and not 1 <= cfg.epsilon_site <= geom.L:
        raise ValueError("epsilon_site out of range")
    states = basis.states
    dim = len(basis)
    diag = np.zeros(dim)
    for link, g in enumerate(link_couplings(geom, cfg)):
        if g:
            diag -= g * z_values(states, link)
    rows = [np.arange(dim)]
    cols = [np.arange(dim)]
    vals = [diag]
    src = np.arange(dim)
    for mask in geom.plaquette_masks:
        rows.append(basis.lookup(states ^ np.int64(mask)))
        cols.append(src)
        vals.append(np.full(dim, -1.0))
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return SparseOperator(mat, True, "lgt")


def build_ising_hamiltonian(L: int, cfg: CouplingConfig) -> SparseOperator:
    if L < 2:
        raise ValueError("L must be >= 2")
    if cfg.epsilon and not 1 <= cfg.epsilon_site <= L:
        raise ValueError("epsilon_site out of range")
    n = 2 * L
    dim = 1 << n
    s = np.arange(dim, dtype=np.int64)
    spin = 1 - 2 * ((s[:, None] >> np.arange(n)) & 1)  # dim x n, +1/-1
    diag = np.zeros(dim)
    for p in range(1, L + 1):
        q = p - 1
        diag -= cfg.rung_coupling(p) * spin[:, q] * spin[:, q + L]
        nxt = p % L
        gp = cfg.bond_coupling(p, L)
        diag -= gp * (spin[:, q] * spin[:, nxt] + spin[:, q + L] * spin[:, nxt + L])
    del spin
    rows = [s] + [s ^ np.int64(1 << q) for q in range(n)]
    cols = [s] * (n + 1)
    vals = [diag] + [np.full(dim, -1.0)] * n
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return SparseOperator(mat, True, "ising")


def parity_operator(L: int) -> sp.csr_matrix:
    return enumerate_ising_sector(L).parity_projector() * 2 - sp.identity(1 << (2 * L), format="csr")


def commutator_norm(a, b) -> float:
    """Largest entry of |[a, b]| (zero exactly when the operators commute)."""
    a = a.matrix if isinstance(a, SparseOperator) else a
    b = b.matrix if isinstance(b, SparseOperator) else b
    c = sp.csr_matrix(a @ b - b @ a)
    return float(np.max(np.abs(c.data))) if c.nnz else 0.0


def _check_residuals(op: SparseOperator, evals, evecs, tol=1e-10):
    scale = max(op.norm_bound(), 1.0)
    block = 512
    worst = 0.0
    for j in range(0, evecs.shape[1], block):
        v = evecs[:, j : j + block]
        r = op.matrix @ v - v * evals[j : j + block]
        worst = max(worst, float(np.max(np.linalg.norm(r, axis=0))))
    if worst > tol * scale:
        raise ArithmeticError(f"eigenpair residual {worst:.2e} exceeds {tol}*||H||")
    return worst


def spectrum_dense(op: SparseOperator, vectors: bool = True, cap: int = DENSE_CAP,
                   check: bool = True, sector_label: Optional[dict] = None) -> SpectrumResult:
    if op.dim > cap:
        raise ValueError(f"dimension {op.dim} exceeds dense cap {cap}; use spectrum_iterative")
    a = op.to_dense()
    if not np.iscomplexobj(a) or not np.any(a.imag):
        a = a.real.copy()
    if vectors:
        evals, evecs = sla.eigh(a, overwrite_a=True, check_finite=False)
        if check:
            _check_residuals(op, evals, evecs)
    else:
        evals, evecs = sla.eigh(a, eigvals_only=True, overwrite_a=True, check_finite=False), None
    return SpectrumResult(evals, evecs, dict(sector_label or {"operator": op.label}))


def spectrum_iterative(op: SparseOperator, n_eigs: int, sigma: float = 0.0,
                       tol: float = 1e-12, sector_label: Optional[dict] = None) -> SpectrumResult:
    """Eigenpairs closest to ``sigma`` by shift-invert Lanczos."""
    evals, evecs = spla.eigsh(op.matrix.tocsc(), k=n_eigs, sigma=sigma, which="LM", tol=tol)
    order = np.argsort(evals)
    evals, evecs = evals[order], evecs[:, order]
    _check_residuals(op, evals, evecs)
    return SpectrumResult(evals, evecs, dict(sector_label or {"operator": op.label}))


def degenerate_groups(evals: np.ndarray, tol: float = 1e-8):
    """Index ranges of (sorted) eigenvalues that agree within ``tol``."""
    groups, start = [], 0
    for i in range(1, len(evals) + 1):
        if i == len(evals) or evals[i] - evals[i - 1] > tol:
            groups.append((start, i))
            start = i
    return groups


def rotate_into_symmetry(evals, evecs, sym, tol: float = 1e-8):
    """Rotate each degenerate eigenspace into eigenvectors of a commuting ``sym``.

    Returns (eigenvalues, vectors, symmetry eigenvalues).
    """
    sv = sym @ evecs
    out_v = np.empty(evecs.shape, dtype=np.result_type(evecs, sv))
    sym_vals = np.empty(len(evals))
    for a, b in degenerate_groups(evals, tol):
        v = evecs[:, a:b]
        m = v.conj().T @ sv[:, a:b]
        w, u = np.linalg.eigh((m + m.conj().T) / 2)
        out_v[:, a:b] = v @ u
        sym_vals[a:b] = w
    return evals, out_v, sym_vals


def ising_parity_spectrum(L: int, cfg: CouplingConfig, parity: int = 1,
                          vectors: bool = False) -> SpectrumResult:
    """Spectrum of H_dual restricted to the sector prod_p X_p = parity."""
    op = build_ising_hamiltonian(L, cfg)
    res = spectrum_dense(op, vectors=True)
    evals, evecs, pv = rotate_into_symmetry(res.eigenvalues, res.eigenvectors, parity_operator(L))
    if np.max(np.abs(np.abs(pv) - 1)) > 1e-8:
        raise ArithmeticError("parity eigenvalues are not +-1")
    keep = np.abs(pv - parity) < 0.5
    label = {"sector": "ising", "parity": parity}
    return SpectrumResult(evals[keep], evecs[:, keep] if vectors else None, label)


def lgt_spectrum(geom: Geometry, cfg: CouplingConfig, vectors: bool = False) -> SpectrumResult:
    basis = enumerate_lgt_sector(geom, cfg.v_x, cfg.v_y)
    op = build_lgt_hamiltonian(geom, basis, cfg)
    return spectrum_dense(op, vectors=vectors, sector_label=basis.label.as_dict())


def verify_duality(L: int, g: float, v_x: int = 1, v_y: int = 1, epsilon: float = 0.0,
                   epsilon_site: int = 1) -> float:
    """Max |lambda_LGT - lambda_Ising,even| over the sorted spectra."""
    cfg = CouplingConfig(g, epsilon, epsilon_site, v_x, v_y)
    lgt = lgt_spectrum(Geometry(L, 2), cfg).eigenvalues
    ising = ising_parity_spectrum(L, cfg, parity=1).eigenvalues
    if lgt.shape != ising.shape:
        return math.inf
    return float(np.max(np.abs(np.sort(lgt) - np.sort(ising))))


def write_spectrum_csv(path, result: SpectrumResult, comment: str = "") -> None:
    keys = sorted(result.sector_label)
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "energy", *keys])
        for i, e in enumerate(result.eigenvalues):
            w.writerow([i, repr(float(e)), *(result.sector_label[k] for k in keys)])
