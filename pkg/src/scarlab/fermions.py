"""Jordan-Wigner check of the fermionic structure of the dual Ising ladder.

JW order runs along the top row left to right (plaquettes 1..L, qubits
0..L-1) and then the bottom row (qubits L..2L-1).  The Majoranas are Pauli
strings,

    gamma_p     = prod_{q<p} (-X_q) Z_p
    gammabar_p  = i gamma_p X_p

so ``X_p = -i gamma_p gammabar_p`` and ``Z_p = prod_{q<p}(i gamma_q gammabar_q) gamma_p``.
Operators are scipy sparse matrices on the 2**(2L) space; all residuals are
the largest absolute matrix entry of the difference.

The boundary-bond string identity and the (N - L)^2 commutant hold on the
parity-even sector prod_p X_p = +1 (the image of the gauge theory), not on
the full space: the bottom row sees the top-row string only through
prod_p X_p.  Those two checks are therefore restricted to that sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import scipy.sparse as sp

from .hamiltonian import CouplingConfig
from .pauli import PauliString

MAX_L = 6


def _maxabs(m) -> float:
    m = sp.csr_matrix(m)
    m.eliminate_zeros()
    return float(np.max(np.abs(m.data))) if m.nnz else 0.0


def gamma_string(L: int, p: int) -> PauliString:
    """gamma_p for 0-based JW position p."""
    n = 2 * L
    xm = (1 << p) - 1
    # (-X)^{p} Z_p: the prefactor (-1)^p is phase 2p
    return PauliString(n, xm, 1 << p, 2 * p)


def gamma_bar_string(L: int, p: int) -> PauliString:
    n = 2 * L
    return PauliString(n, 0, 0, 1) * gamma_string(L, p) * PauliString.single(n, p, "X")


@dataclass
class FermionRep:
    L: int
    gamma: List[sp.csr_matrix]
    gamma_bar: List[sp.csr_matrix]
    c: List[sp.csr_matrix]
    cbar: List[sp.csr_matrix]
    N: sp.csr_matrix
    order: str = "top row left to right, then bottom row left to right"
    _pauli_cache: Dict[str, sp.csr_matrix] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return 1 << (2 * self.L)

    @property
    def cdag(self):
        return [m.conj().T.tocsr() for m in self.c]

    @property
    def cbardag(self):
        return [m.conj().T.tocsr() for m in self.cbar]

    def identity(self):
        return sp.identity(self.dim, dtype=complex, format="csr")

    def pauli(self, label_or_string) -> sp.csr_matrix:
        p = label_or_string
        if isinstance(p, str):
            p = PauliString.from_label(p)
        key = p.label()
        if key not in self._pauli_cache:
            self._pauli_cache[key] = p.to_sparse()
        return self._pauli_cache[key]

    def parity_even_projector(self):
        par = PauliString.x_on(2 * self.L, (1 << (2 * self.L)) - 1).to_sparse()
        return 0.5 * (self.identity() + par)

    def X(self, q):
        return self.pauli(PauliString.single(2 * self.L, q, "X"))

    def Z(self, q):
        return self.pauli(PauliString.single(2 * self.L, q, "Z"))


def build_fermion_rep(L: int) -> FermionRep:
    if L < 1 or L > MAX_L:
        raise ValueError(f"dense fermion check supports 1 <= L <= {MAX_L}, got {L}")
    n = 2 * L
    gamma = [gamma_string(L, p).to_sparse() for p in range(n)]
    gamma_bar = [gamma_bar_string(L, p).to_sparse() for p in range(n)]
    c = [0.5 * (gamma[p] - 1j * gamma[p + L]) for p in range(L)]
    cbar = [0.5 * (gamma_bar[p] - 1j * gamma_bar[p + L]) for p in range(L)]
    N = sp.csr_matrix((1 << n, 1 << n), dtype=complex)
    for p in range(L):
        N = N + c[p].conj().T @ c[p] + cbar[p].conj().T @ cbar[p]
    return FermionRep(L, gamma, gamma_bar, [sp.csr_matrix(m) for m in c],
                      [sp.csr_matrix(m) for m in cbar], sp.csr_matrix(N))


def anticommutator_residual(rep: FermionRep) -> float:
    n = 2 * rep.L
    eye = rep.identity()
    worst = 0.0
    majoranas = rep.gamma + rep.gamma_bar
    for i, a in enumerate(majoranas):
        for j, b in enumerate(majoranas):
            target = 2 * eye if i == j else 0 * eye
            worst = max(worst, _maxabs(a @ b + b @ a - target))
    # c_p and cbar_p are canonical fermions
    modes = rep.c + rep.cbar
    for i, a in enumerate(modes):
        for j, b in enumerate(modes):
            worst = max(worst, _maxabs(a @ b.conj().T + b.conj().T @ a - (eye if i == j else 0 * eye)))
            worst = max(worst, _maxabs(a @ b + b @ a))
    assert len(majoranas) == 2 * n
    return worst


def local_parity(rep: FermionRep, p: int):
    """(-1)^{n_p + nbar_p} for rung p (0-based)."""
    eye = rep.identity()
    n_p = rep.c[p].conj().T @ rep.c[p]
    nb_p = rep.cbar[p].conj().T @ rep.cbar[p]
    return (eye - 2 * n_p) @ (eye - 2 * nb_p)


def pauli_identity_residuals(rep: FermionRep) -> Dict[str, float]:
    L = rep.L
    out = {}
    out["x_from_majoranas"] = max(
        _maxabs(rep.X(p) - (-1j) * rep.gamma[p] @ rep.gamma_bar[p]) for p in range(2 * L)
    )
    eye = rep.identity()
    worst = 0.0
    for p in range(2 * L):
        string = eye
        for q in range(p):
            string = string @ (1j * rep.gamma[q] @ rep.gamma_bar[q])
        worst = max(worst, _maxabs(rep.Z(p) - string @ rep.gamma[p]))
    out["z_from_majoranas"] = worst
    eye = rep.identity()
    out["species_parity_c"] = max(
        _maxabs(eye - 2 * rep.c[p].conj().T @ rep.c[p] - 1j * rep.gamma[p] @ rep.gamma[p + L])
        for p in range(L)
    )
    out["species_parity_cbar"] = max(
        _maxabs(eye - 2 * rep.cbar[p].conj().T @ rep.cbar[p] - 1j * rep.gamma_bar[p] @ rep.gamma_bar[p + L])
        for p in range(L)
    )
    out["rung_x_is_minus_local_parity"] = max(
        _maxabs(rep.X(p) @ rep.X(p + L) + local_parity(rep, p)) for p in range(L)
    )
    total_x = eye
    total_par = eye
    for p in range(L):
        total_x = total_x @ rep.X(p) @ rep.X(p + L)
        total_par = total_par @ local_parity(rep, p)
    out["global_parity"] = _maxabs(total_x - (-1) ** L * total_par)
    return out


def _rung_string(rep: FermionRep, start: int, length: int):
    """prod_{q=start}^{start+length-1} (i gamma_q gammabar_q), indices not wrapped."""
    out = rep.identity()
    for q in range(start, start + length):
        out = out @ (1j * rep.gamma[q] @ rep.gamma_bar[q])
    return out


def quadratic_term_residuals(rep: FermionRep) -> Dict[str, float]:
    """Spin terms of H_dual against their fermionic forms."""
    L = rep.L
    g, gb, c, cb = rep.gamma, rep.gamma_bar, rep.c, rep.cbar
    cd, cbd = rep.cdag, rep.cbardag
    X, Z = rep.X, rep.Z
    out = {}
    out["plaquette_majorana"] = max(
        _maxabs(X(p) + X(p + L) - (1j * gb[p] @ g[p] + 1j * gb[p + L] @ g[p + L])) for p in range(L)
    )
    out["plaquette_fermion"] = max(
        _maxabs(X(p) + X(p + L) - 2j * (cb[p] @ cd[p] + cbd[p] @ c[p])) for p in range(L)
    )
    if L >= 2:
        out["bond_majorana"] = max(
            _maxabs(Z(p) @ Z(p + 1) + Z(p + L) @ Z(p + L + 1)
                    - (1j * gb[p] @ g[p + 1] + 1j * gb[p + L] @ g[p + L + 1]))
            for p in range(L - 1)
        )
        out["bond_fermion"] = max(
            _maxabs(Z(p) @ Z(p + 1) + Z(p + L) @ Z(p + L + 1)
                    - 2j * (cb[p] @ cd[p + 1] + cbd[p] @ c[p + 1]))
            for p in range(L - 1)
        )
    # boundary bond p = L carries the full top-row string
    wrap = Z(0) @ Z(L - 1) + Z(L) @ Z(2 * L - 1)
    diff = wrap - _rung_string(rep, 0, L) @ (1j * g[0] @ gb[L - 1] + 1j * g[L] @ gb[2 * L - 1])
    out["boundary_bond_string"] = _maxabs(diff @ rep.parity_even_projector())
    worst = 0.0
    for p in range(L):
        rhs = 1j * _rung_string(rep, p, L) @ (1j * g[p] @ g[p + L])
        worst = max(worst, _maxabs(Z(p) @ Z(p + L) - rhs))
    out["rung_string"] = worst
    return out


def verify_quadratic_terms(rep: FermionRep) -> float:
    return max(quadratic_term_residuals(rep).values())


def end_matter_plaquette_residual(rep: FermionRep) -> float:
    """Residual of the variant X_p + X_{p+L} = 2i(c cbar^dag + c^dag cbar)."""
    L = rep.L
    return max(
        _maxabs(rep.X(p) + rep.X(p + L) - 2j * (rep.c[p] @ rep.cbardag[p] + rep.cdag[p] @ rep.cbar[p]))
        for p in range(L)
    )


def hamiltonian_terms(rep: FermionRep, cfg: CouplingConfig) -> Dict[str, List[sp.csr_matrix]]:
    """The three term families of H_dual, one summand per rung or bond."""
    L = rep.L
    X, Z = rep.X, rep.Z
    plaq = [-(X(p) + X(p + L)) for p in range(L)]
    rung = [-cfg.rung_coupling(p + 1) * (Z(p) @ Z(p + L)) for p in range(L)]
    bond = []
    for p in range(L):
        nxt = (p + 1) % L
        bond.append(-cfg.bond_coupling(p + 1, L) * (Z(p) @ Z(nxt) + Z(p + L) @ Z(nxt + L)))
    return {"H_A": plaq, "H_B": rung, "H_C": bond}


def verify_commutant(rep: FermionRep, cfg: CouplingConfig, parity_even: bool = True) -> float:
    """max over every summand of ||[(N - L)^2, term]||, on the parity-even sector by default."""
    shifted = rep.N - rep.L * rep.identity()
    c2 = shifted @ shifted
    proj = rep.parity_even_projector() if parity_even else rep.identity()
    worst = 0.0
    for terms in hamiltonian_terms(rep, cfg).values():
        for t in terms:
            worst = max(worst, _maxabs((c2 @ t - t @ c2) @ proj))
    return worst


def number_commutator(rep: FermionRep, cfg: CouplingConfig) -> Dict[str, float]:
    """||[N, term]|| per family; only H_A and the bulk bonds conserve N."""
    out = {}
    for name, terms in hamiltonian_terms(rep, cfg).items():
        out[name] = max(_maxabs(rep.N @ t - t @ rep.N) for t in terms)
    return out


def number_eigenspace(rep: FermionRep, values) -> np.ndarray:
    """Orthonormal basis (columns) of the N eigenspace for the given eigenvalues."""
    # N is diagonal in the mode occupation basis, not in z; diagonalize densely
    evals, evecs = np.linalg.eigh(rep.N.toarray())
    keep = np.zeros(len(evals), dtype=bool)
    for v in values:
        keep |= np.abs(evals - v) < 1e-8
    return evecs[:, keep]


def subspace_residual(vectors: np.ndarray, basis: np.ndarray) -> float:
    """max_j ||(1 - P_basis) v_j||."""
    resid = vectors - basis @ (basis.conj().T @ vectors)
    return float(np.max(np.linalg.norm(resid, axis=0)))


def fermion_report(L: int, cfg: CouplingConfig) -> Dict[str, float]:
    rep = build_fermion_rep(L)
    out = {"anticommutators": anticommutator_residual(rep)}
    out.update(pauli_identity_residuals(rep))
    out.update(quadratic_term_residuals(rep))
    out["commutant"] = verify_commutant(rep, cfg)
    out["commutant_full_space"] = verify_commutant(rep, cfg, parity_even=False)
    out["plaquette_fermion_alt_sign"] = end_matter_plaquette_residual(rep)
    return out
